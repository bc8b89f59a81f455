"""Command-line entry point.

Usage::

    elastic-spheres --config run.json [--output DIR] [--jobs N] [--seed S]

The configuration is a JSON object with the sections ``command``,
``materials``, ``controls``, ``observables`` and ``output``.  An optional
``runs`` list holds per-run overrides for parameter sweeps.
"""

from __future__ import annotations

import argparse
import copy
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .bodies import (
    MatterDistribution,
    ShellRequest,
    assemble,
    ball_bounds,
    build_ball,
    build_inner_shell,
    r_max_scan,
    r_min,
    shell_bounds,
    verify_distribution,
)
from .calibration import KS_from_shell, K_from_central, K_from_surface, Observables
from .equilibrium import Controls
from .diagnostics import (
    default_bumps,
    energy_functional,
    fd_first_variation,
    first_variation,
    mass_neutral,
    reconstruct_reference_radius,
    variation_scale,
)
from .errors import ConfigError, ElasticSpheresError, VerificationFailed
from .export import orbit_csv, profile_csv, summary_json, table_csv, write_text
from .materials import Family, MaterialSpec, validate_material
from .seth import analyse, boundary_pressure_derivative, fixed_points, integrate_orbit, self_similar

COMMANDS = ("ball", "shell", "multibody", "validate-material", "selfsimilar", "phase", "calibrate", "verify")


# ---------------------------------------------------------------- config helpers

def load_config(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def _blocks(cfg: dict) -> list:
    mats = cfg.get("materials")
    if isinstance(mats, dict):
        return [mats]
    if isinstance(mats, list) and mats and all(isinstance(b, dict) for b in mats):
        return mats
    raise ConfigError("'materials' must be an object or a non-empty list of objects")


def _num(block: dict, key: str, default=None) -> float:
    if key not in block or block[key] is None:
        if default is None:
            raise ConfigError(f"missing numeric field '{key}'")
        return default
    try:
        return float(block[key])
    except (TypeError, ValueError):
        raise ConfigError(f"field '{key}' must be a number") from None


def _controls(cfg: dict) -> Controls:
    block = cfg.get("controls") or {}
    if not isinstance(block, dict):
        raise ConfigError("'controls' must be an object")
    try:
        return Controls.from_dict(block)
    except TypeError as exc:
        raise ConfigError(f"bad controls: {exc}") from None


def _shell_r0(block: dict, spec: MaterialSpec, S: float) -> Optional[float]:
    r0 = block.get("r0", "r_min")
    if r0 == "r_min":
        return r_min(spec.lame, S)
    return _num(block, "r0")


def _distribution(cfg: dict, controls: Controls) -> MatterDistribution:
    blocks = _blocks(cfg)
    first = blocks[0]
    spec = MaterialSpec.from_dict(first)
    if "rho_c" in first:
        core = build_ball(spec, _num(first, "K"), _num(first, "rho_c"), controls)
    else:
        S = _num(first, "S")
        core = build_inner_shell(spec, _num(first, "K"), S, _shell_r0(first, spec, S), controls)
    requests = []
    for block in blocks[1:]:
        sp = MaterialSpec.from_dict(block)
        S = _num(block, "S") if block.get("S") is not None else None
        r0 = block.get("r0")
        r0 = None if r0 in (None, "r_min") else _num(block, "r0")
        requests.append(ShellRequest(sp, _num(block, "K"), S, r0, _num(block, "s_factor", 1.05)))
    return assemble(core, requests, controls)


def _body_report(body) -> dict:
    out = body.summary()
    prof = body.profile
    out["termination"] = prof.termination.value
    out["samples"] = len(prof)
    out["rho_start"] = body.K * float(prof.delta[0])
    out["rho_end"] = body.K * float(prof.delta[-1])
    return out


def _diagnostics(body) -> dict:
    """Lagrangian residual, and energy plus first variations for hyperelastic bodies."""
    out = {"reference_radius_max_residual": reconstruct_reference_radius(body.profile, body.K).max_residual}
    spec, K, prof = body.material, body.K, body.profile
    if not spec.is_hyperelastic:
        return out
    out["energy"] = energy_functional(spec, K, prof).as_dict()
    b = default_bumps(prof)
    rows = []
    for i, j in ((0, 1), (1, 2), (0, 2)):
        phi = mass_neutral(b[i], b[j])
        direct = first_variation(spec, K, prof, phi)
        rows.append({"bumps": [i, j], "dE_dtau": direct, "dE_dtau_fd": fd_first_variation(spec, K, prof, phi),
                     "scaled": direct / variation_scale(spec, K, prof, phi)})
    out["first_variation"] = rows
    return out


# ---------------------------------------------------------------- commands

def cmd_ball(cfg, out: Path) -> dict:
    block = _blocks(cfg)[0]
    spec = MaterialSpec.from_dict(block)
    K, rho_c = _num(block, "K"), _num(block, "rho_c")
    body = build_ball(spec, K, rho_c, _controls(cfg))
    summary = {"body": _body_report(body), "r1": body.r_end, "M": body.total_mass}
    if spec.family is Family.SETH:
        summary["bounds"] = ball_bounds(spec.lame, K, rho_c, body.total_mass, body.r_end)
    summary["verification"] = verify_distribution(MatterDistribution((body,))).as_dict()
    summary["diagnostics"] = _diagnostics(body)
    write_text(out / "profile.csv", profile_csv([body.profile]))
    return summary


def cmd_shell(cfg, out: Path) -> dict:
    block = _blocks(cfg)[0]
    spec = MaterialSpec.from_dict(block)
    K, S = _num(block, "K"), _num(block, "S")
    r0 = _shell_r0(block, spec, S)
    body = build_inner_shell(spec, K, S, r0, _controls(cfg))
    summary = {"body": _body_report(body), "r0": body.r_start, "r1": body.r_end, "M": body.total_mass,
               "r_min": r_min(spec.lame, S),
               "bounds": shell_bounds(spec.lame, K, S, body.total_mass, body.r_end),
               "verification": verify_distribution(MatterDistribution((body,))).as_dict(),
               "diagnostics": _diagnostics(body)}
    write_text(out / "profile.csv", profile_csv([body.profile]))
    return summary


def _distribution_summary(dist: MatterDistribution, tol: float) -> dict:
    report = verify_distribution(dist, tol)
    return {"bodies": [_body_report(b) for b in dist.bodies], "core": dist.core.value,
            "interface_radii": dist.interface_radii, "M": dist.total_mass, "verification": report.as_dict()}, report


def cmd_multibody(cfg, out: Path) -> dict:
    controls = _controls(cfg)
    dist = _distribution(cfg, controls)
    tol = _num(cfg.get("controls") or {}, "verify_tol", 1e-8)
    summary, _ = _distribution_summary(dist, tol)
    # r_max of each shell given what it encloses
    r_max = []
    for j, b in enumerate(dist.bodies):
        if b.is_ball:
            continue
        r_max.append({"body": j, "r_max": r_max_scan(b.material.lame, b.K, b.S, b.enclosed_mass),
                      "F_r0": boundary_pressure_derivative(b.material.lame, b.K, (b.S / b.r_start) ** 3,
                                                           b.enclosed_mass, b.r_start)})
    summary["shell_windows"] = r_max
    write_text(out / "profile.csv", profile_csv([b.profile for b in dist.bodies], with_body=True))
    return summary


def cmd_verify(cfg, out: Path) -> dict:
    dist = _distribution(cfg, _controls(cfg))
    tol = _num(cfg.get("controls") or {}, "verify_tol", 1e-8)
    summary, report = _distribution_summary(dist, tol)
    write_text(out / "profile.csv", profile_csv([b.profile for b in dist.bodies], with_body=True))
    if not report.ok:
        write_text(out / "summary.json", summary_json({"command": "verify", **summary}))
        failed = sorted(k for k, v in report.passed.items() if not v)
        raise VerificationFailed(f"conditions failed: {', '.join(failed)}", report)
    return summary


def cmd_validate(cfg, out: Path) -> dict:
    fd_step = _num(cfg.get("controls") or {}, "fd_step", 1e-5)
    reports = [validate_material(MaterialSpec.from_dict(b), fd_step).as_dict() for b in _blocks(cfg)]
    rows = []
    for k, r in enumerate(reports):
        hyper = r["hyperelastic_deviation"]
        rows.append((k, r["natural_state_p_rad"], r["natural_state_p_tan"], r["jacobian_deviation"],
                     r["diagonal_isotropy"], math.nan if hyper is None else hyper))
    cols = ("material", "natural_p_rad", "natural_p_tan", "jacobian_deviation", "diagonal_isotropy",
            "hyperelastic_deviation")
    write_text(out / "validation.csv", table_csv(cols, rows, int_columns=1))
    for r in reports:
        hyper = r["hyperelastic_deviation"]
        print(f"{r['family']:<10} natural=({r['natural_state_p_rad']:.1e}, {r['natural_state_p_tan']:.1e}) "
              f"hooke={r['jacobian_deviation']:.1e} iso={r['diagonal_isotropy']:.1e} "
              f"hyper={'n/a' if hyper is None else format(hyper, '.1e')}")
    return {"reports": reports}


def _seth_block(cfg):
    block = _blocks(cfg)[0]
    spec = MaterialSpec.from_dict(block)
    if spec.family is not Family.SETH:
        raise ConfigError("this command needs a Seth material")
    return block, spec


def _analysis_dict(an) -> dict:
    return {"a": an.a, "b": an.b, "theta_len": an.theta_len, "c": an.c_const, "R_star": an.R_star,
            "u_P": an.u_P, "y_P": an.y_P, "p0": an.p0}


def _fixed_point_dict(a, b) -> dict:
    return {name: {"u": fp.u, "y": fp.y, "eigenvalues": [complex(e) if isinstance(e, complex) else e
                                                          for e in fp.eigenvalues],
                   "z_eigenvalue": fp.z_eigenvalue, "classification": fp.classification}
            for name, fp in fixed_points(a, b).items()}


def cmd_selfsimilar(cfg, out: Path) -> dict:
    block, spec = _seth_block(cfg)
    K = _num(block, "K", 1.0)
    an = analyse(spec.lame, K)
    ctl = cfg.get("controls") or {}
    lo = _num(ctl, "r_min", 0.1 / an.theta_len)
    hi = _num(ctl, "r_max", 10.0 / an.theta_len)
    n = int(_num(ctl, "n_samples", 50))
    if not (0 < lo < hi and n >= 2):
        raise ConfigError("selfsimilar grid needs 0 < r_min < r_max and n_samples >= 2")
    r = np.geomspace(lo, hi, n)
    d, e, m, pr, pt = self_similar(spec.lame, K, r)
    write_text(out / "profile.csv", table_csv(("r", "delta", "eta", "m", "rho", "p_rad", "p_tan"),
                                               np.column_stack([r, d, e, m, K * d, pr, pt])))
    summary = {"analysis": _analysis_dict(an)}
    if an.a >= 1.0:
        summary["fixed_points"] = _fixed_point_dict(an.a, an.b)
    return summary


def cmd_phase(cfg, out: Path) -> dict:
    block, spec = _seth_block(cfg)
    an = analyse(spec.lame, _num(block, "K", 1.0))
    ctl = cfg.get("controls") or {}
    seeds = ctl.get("seeds", [[0.5 * an.u_P, 0.9, 1.0], [2.0 * an.u_P, 0.2, 1.0], [1e-3, 0.999, 1.0]])
    try:
        seeds = [tuple(float(v) for v in s) for s in seeds]
    except (TypeError, ValueError):
        raise ConfigError("phase seeds must be lists of three numbers") from None
    if any(len(s) != 3 for s in seeds):
        raise ConfigError("phase seeds must be lists of three numbers")
    xi_max = _num(ctl, "xi_max", 20.0)
    n_out = int(_num(ctl, "n_out", 201))
    orbits = [integrate_orbit(an.a, an.b, s, xi_max, n_out) for s in seeds]
    write_text(out / "orbits.csv", orbit_csv(orbits))
    return {"analysis": _analysis_dict(an), "fixed_points": _fixed_point_dict(an.a, an.b),
            "orbit_ends": [o[-1, 1:] for o in orbits]}


def cmd_calibrate(cfg, out: Path) -> dict:
    spec = MaterialSpec.from_dict(_blocks(cfg)[0])
    block = cfg.get("observables")
    if not isinstance(block, dict):
        raise ConfigError("calibrate needs an 'observables' object")
    try:
        obs = Observables.from_dict(block)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ElasticSpheresError):
            raise
        raise ConfigError(f"bad observables: {exc}") from None
    result = {}
    if obs.rho_c is not None and obs.p_c is not None:
        K = K_from_central(spec, obs.rho_c, obs.p_c)
        result["central"] = {"K": K, "residual": spec.p_rad(obs.rho_c / K, obs.rho_c / K) - obs.p_c}
    if obs.r0 is not None and None not in (obs.r1, obs.rho_r0, obs.rho_r1, obs.M):
        result["shell"] = KS_from_shell(spec, obs.r0, obs.r1, obs.rho_r0, obs.rho_r1, obs.M).as_dict()
    elif None not in (obs.r1, obs.rho_r1, obs.M):
        K = K_from_surface(spec, obs.rho_r1, obs.r1, obs.M)
        result["surface"] = {"K": K, "residual": spec.p_rad(obs.rho_r1 / K, obs.M / (4.0 / 3.0 * math.pi * K * obs.r1**3))}
    if not result:
        raise ConfigError("observables do not determine any calibration")
    return result


HANDLERS = {
    "ball": cmd_ball,
    "shell": cmd_shell,
    "multibody": cmd_multibody,
    "validate-material": cmd_validate,
    "selfsimilar": cmd_selfsimilar,
    "phase": cmd_phase,
    "calibrate": cmd_calibrate,
    "verify": cmd_verify,
}


# ---------------------------------------------------------------- driver

def run(cfg: dict, out_dir: Path, seed: Optional[int] = None) -> int:
    """Execute one configuration; write artifacts to ``out_dir`` and return the exit code."""
    out_dir = Path(out_dir)
    try:
        command = cfg.get("command")
        if command not in HANDLERS:
            raise ConfigError(f"unknown command {command!r}; expected one of {', '.join(COMMANDS)}")
        summary = HANDLERS[command](cfg, out_dir)
    except ElasticSpheresError as exc:
        print(f"error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return exc.exit_code
    summary = {"command": command, "version": __version__, **summary}
    if seed is not None:
        summary["seed"] = seed
    write_text(out_dir / "summary.json", summary_json(summary))
    print(f"{command}: ok -> {out_dir}")
    return 0


def _run_entry(args):
    cfg, out_dir, seed = args
    return run(cfg, out_dir, seed)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="elastic-spheres",
                description="Static self-gravitating elastic balls, shells and multi-body configurations.")
    p.add_argument("--config", required=True, help="JSON run configuration")
    p.add_argument("--output", help="output directory (overrides output.dir)")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers for sweep entries")
    p.add_argument("--seed", type=int, default=None, help="reserved for randomized grids; recorded in summaries")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    output = cfg.get("output") or {}
    out_dir = Path(args.output or (output.get("dir") if isinstance(output, dict) else None) or "out")
    runs = cfg.pop("runs", None)
    if runs is None:
        return run(cfg, out_dir, args.seed)
    if not isinstance(runs, list) or not all(isinstance(r, dict) for r in runs):
        print("error: 'runs' must be a list of objects", file=sys.stderr)
        return 1
    tasks = [(_merge(cfg, r), out_dir / f"run_{k:03d}", args.seed) for k, r in enumerate(runs)]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            codes = list(pool.map(_run_entry, tasks))
    else:
        codes = [_run_entry(t) for t in tasks]
    index = {"command": cfg.get("command"), "runs": [{"run": k, "exit_code": c, "dir": f"run_{k:03d}"}
                                                     for k, c in enumerate(codes)]}
    write_text(out_dir / "sweep.json", summary_json(index))
    return max(codes) if codes else 0


if __name__ == "__main__":
    sys.exit(main())
