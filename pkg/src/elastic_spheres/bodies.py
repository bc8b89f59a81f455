"""Balls, shells and recursively assembled n-body distributions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence, Union

import numpy as np
from scipy.optimize import brentq

from .equilibrium import (
    Controls,
    EquilibriumState,
    SolutionProfile,
    Termination,
    center_init,
    integrate,
    shell_init,
)
from .errors import (
    BoundViolation,
    DomainError,
    InadmissibleInnerRadius,
    NegativeBoundaryDerivative,
    NoBoundaryFound,
    NoEquilibrium,
)
from .materials import Family, LameCoefficients, MaterialSpec
from .seth import boundary_pressure_derivative

__all__ = [
    "Core",
    "Body",
    "MatterDistribution",
    "ShellRequest",
    "INTERFACE_TOL",
    "seth_spec",
    "r_min",
    "ball_bounds",
    "shell_bounds",
    "build_ball",
    "build_inner_shell",
    "add_shell",
    "assemble",
    "next_shell_S",
    "r_max_scan",
    "VerificationReport",
    "verify_distribution",
]

FOUR_PI = 4.0 * math.pi
INTERFACE_TOL = 1e-10  # interface zeros of p_rad, relative to p0
R_MIN_SNAP = 1e-12  # r0 this close to r_min (relative) is treated as r_min


class Core(str, Enum):
    NON_VACUUM = "NonVacuumCore"
    VACUUM = "VacuumCore"


@dataclass(frozen=True)
class Body:
    material: MaterialSpec
    K: float
    S: Optional[float]
    r_start: float
    r_end: float
    profile: SolutionProfile
    total_mass: float
    enclosed_mass: float = 0.0

    @property
    def is_ball(self) -> bool:
        return self.S is None

    @property
    def support(self):
        return (self.r_start, self.r_end)

    def summary(self) -> dict:
        out = {"kind": "ball" if self.is_ball else "shell", "K": self.K, "S": self.S,
               "r_start": self.r_start, "r_end": self.r_end, "M": self.total_mass}
        out.update(self.material.to_dict())
        return out


@dataclass(frozen=True)
class MatterDistribution:
    bodies: tuple = ()

    @property
    def core(self) -> Core:
        if self.bodies and self.bodies[0].is_ball:
            return Core.NON_VACUUM
        return Core.VACUUM

    @property
    def interface_radii(self) -> np.ndarray:
        return np.array([x for b in self.bodies for x in b.support])

    @property
    def total_mass(self) -> float:
        return float(sum(b.total_mass for b in self.bodies))

    @property
    def outer_radius(self) -> float:
        return self.bodies[-1].r_end if self.bodies else 0.0

    def __len__(self):
        return len(self.bodies)

    def append(self, body: Body) -> "MatterDistribution":
        return MatterDistribution(self.bodies + (body,))

    def fields(self, r) -> dict:
        """Density, pressures and enclosed mass at radii ``r``; zero matter outside the support."""
        r = np.atleast_1d(np.asarray(r, float))
        out = {k: np.zeros_like(r) for k in ("rho", "p_rad", "p_tan", "m")}
        enclosed = 0.0
        for b in self.bodies:
            out["m"][r >= b.r_start] = enclosed
            inside = (r >= b.r_start) & (r <= b.r_end)
            if inside.any():
                d, e, m = b.profile(r[inside])
                out["rho"][inside] = b.K * d
                out["p_rad"][inside] = b.material.p_rad(d, e)
                out["p_tan"][inside] = b.material.p_tan(d, e)
                out["m"][inside] = m
            enclosed += b.total_mass
            out["m"][r > b.r_end] = enclosed
        return out


def seth_spec(material: Union[MaterialSpec, LameCoefficients]) -> MaterialSpec:
    if isinstance(material, LameCoefficients):
        return MaterialSpec(Family.SETH, material)
    if material.family is not Family.SETH:
        raise DomainError("shell constructors are defined for Seth materials")
    return material


def r_min(lame: LameCoefficients, S: float) -> float:
    """Smallest admissible inner radius of a Seth shell with reference radius S."""
    return math.sqrt(2.0 * lame.lam / (3.0 * lame.lam + 2.0 * lame.mu)) * S


def _bounds(lame, scale_radius, r1):
    lower = math.sqrt(2.0 * lame.lam / (3.0 * lame.lam + 2.0 * lame.mu)) * scale_radius
    return {"lower": lower, "r1": r1, "upper": scale_radius,
            "lower_ok": lower < r1, "upper_ok": r1 < scale_radius}


def ball_bounds(lame: LameCoefficients, K: float, rho_c: float, M: float, r1: float) -> dict:
    out = _bounds(lame, (3.0 * M / (FOUR_PI * K)) ** (1.0 / 3.0), r1)
    out["mass_cap"] = FOUR_PI / 3.0 * rho_c * r1**3
    out["mass_ok"] = M < out["mass_cap"]
    out["ok"] = out["lower_ok"] and out["upper_ok"] and out["mass_ok"]
    return out


def shell_bounds(lame: LameCoefficients, K: float, S: float, M: float, r1: float) -> dict:
    out = _bounds(lame, (S**3 + 3.0 * M / (FOUR_PI * K)) ** (1.0 / 3.0), r1)
    out["ok"] = out["lower_ok"] and out["upper_ok"]
    return out


def _finish(profile: SolutionProfile, what: str) -> None:
    if profile.termination is not Termination.PRESSURE_ZERO:
        raise NoBoundaryFound(f"{what}: no pressure zero before r_stop = {profile.r_end}", profile)


def build_ball(spec: MaterialSpec, K: float, rho_c: float, controls: Optional[Controls] = None) -> Body:
    """Ball with central density ``rho_c``; requires positive central pressure."""
    if not (K > 0 and rho_c > 0):
        raise DomainError("build_ball needs K > 0 and rho_c > 0")
    dc = rho_c / K
    pc = spec.p_rad(dc, dc)
    if not pc > 0:
        hint = " (Seth balls exist only for rho_c > K)" if spec.family is Family.SETH else ""
        raise NoEquilibrium(f"central pressure {pc} <= 0 at rho_c/K = {dc}{hint}")
    prof = integrate(spec, K, center_init(spec, K, dc), controls)
    _finish(prof, "ball")
    if not prof.delta[-1] > 0:
        raise BoundViolation(f"ball surface density {K * prof.delta[-1]} is not positive")
    M = float(prof.m[-1])
    if spec.family is Family.SETH:
        bb = ball_bounds(spec.lame, K, rho_c, M, prof.r_end)
        if not bb["ok"]:
            raise BoundViolation(f"ball radius/mass bounds violated: {bb}")
    return Body(spec, K, None, 0.0, prof.r_end, prof, M)


def build_inner_shell(material, K: float, S: float, r0: float, controls: Optional[Controls] = None) -> Body:
    """Seth shell around vacuum with reference inner radius ``S`` placed at ``r0``."""
    return add_shell(MatterDistribution(), material, K, S, r0, controls).bodies[-1]


def add_shell(dist: MatterDistribution, material, K: float, S: float, r0: float,
              controls: Optional[Controls] = None) -> MatterDistribution:
    """Wrap a Seth shell around ``dist``; returns the enlarged distribution."""
    spec = seth_spec(material)
    lame = spec.lame
    if not (K > 0 and S > 0 and r0 > 0):
        raise DomainError("shell needs K, S, r0 > 0")
    r_enc, M_int = dist.outer_radius, dist.total_mass
    rm = r_min(lame, S)
    if not rm > r_enc:
        raise InadmissibleInnerRadius(f"r_min = {rm} does not exceed the enclosed radius {r_enc}")
    at_rmin = abs(r0 - rm) <= R_MIN_SNAP * rm
    if not (rm <= r0 < S or at_rmin):
        raise InadmissibleInnerRadius(f"r0 = {r0} outside [r_min, S) = [{rm}, {S})")
    if at_rmin:
        # the density vanishes exactly; avoid sqrt amplification of rounding in eta
        r0 = rm
        init = EquilibriumState(rm, 0.0, _eta_cap(lame), M_int)
    else:
        init = shell_init(spec, K, S, r0, M_int)
    F = boundary_pressure_derivative(lame, K, init.eta, M_int, r0)
    if F < 0:
        raise NegativeBoundaryDerivative(f"p_rad would decrease from zero at r0 = {r0} (F = {F})")
    prof = integrate(spec, K, init, controls, S=S)
    _finish(prof, "shell")
    M = float(prof.m[-1] - M_int)
    sb = shell_bounds(lame, K, S, M, prof.r_end)
    if not sb["ok"]:
        raise BoundViolation(f"shell outer radius bounds violated: {sb}")
    return dist.append(Body(spec, K, S, r0, prof.r_end, prof, M, M_int))


def next_shell_S(lame: LameCoefficients, r_enclosed: float, factor: float = 1.05) -> float:
    """Reference radius ``factor * sqrt((3 lam + 2 mu)/(2 lam)) * r_enclosed``, factor > 1."""
    if not factor > 1:
        raise DomainError("the S rule needs factor > 1")
    return factor * math.sqrt((3.0 * lame.lam + 2.0 * lame.mu) / (2.0 * lame.lam)) * r_enclosed


@dataclass(frozen=True)
class ShellRequest:
    material: Union[MaterialSpec, LameCoefficients]
    K: float
    S: Optional[float] = None
    r0: Optional[float] = None
    s_factor: float = 1.05


def assemble(core: Optional[Body], shells: Sequence[ShellRequest],
             controls: Optional[Controls] = None) -> MatterDistribution:
    """Recursive construction: each missing S follows the enclosing-radius rule, missing r0 is r_min."""
    dist = MatterDistribution((core,) if core is not None else ())
    for req in shells:
        spec = seth_spec(req.material)
        S = req.S
        if S is None:
            if not dist.bodies:
                raise DomainError("the first shell around vacuum needs an explicit S")
            S = next_shell_S(spec.lame, dist.outer_radius, req.s_factor)
        r0 = req.r0 if req.r0 is not None else r_min(spec.lame, S)
        dist = add_shell(dist, spec, req.K, S, r0, controls)
    return dist


def r_max_scan(lame: LameCoefficients, K: float, S: float, M_interior: float, grid_n: int = 1000) -> float:
    """First zero of the boundary derivative F on [r_min, S), or S if F stays positive."""
    if grid_n < 100:
        raise DomainError("grid_n must be at least 100")
    rm = r_min(lame, S)

    def F(r):
        return boundary_pressure_derivative(lame, K, min((S / r) ** 3, _eta_cap(lame)), M_interior, r)

    if not F(rm) > 0:
        raise BoundViolation(f"F(r_min) = {F(rm)} is not positive")
    grid = rm + (S - rm) * np.arange(grid_n) / grid_n
    vals = [F(r) for r in grid]
    for i in range(1, grid_n):
        if vals[i] <= 0:
            if vals[i] == 0:
                return float(grid[i])
            return float(brentq(F, grid[i - 1], grid[i], xtol=1e-12 * S, rtol=1e-14))
    return float(S)


def _eta_cap(lame: LameCoefficients) -> float:
    return ((3.0 * lame.lam + 2.0 * lame.mu) / (2.0 * lame.lam)) ** 1.5


# ---------------------------------------------------------------- verification

@dataclass(frozen=True)
class VerificationReport:
    tol: float
    passed: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)
    skipped: tuple = ()

    @property
    def ok(self) -> bool:
        return all(self.passed.values())

    def as_dict(self) -> dict:
        return {"tol": self.tol, "ok": self.ok, "passed": dict(self.passed),
                "residuals": dict(self.residuals), "skipped": list(self.skipped)}


def _interior_probe(b: Body) -> np.ndarray:
    mids = b.profile.segment_midpoints()
    return mids[(mids > b.profile.r_start) & (mids < b.r_end)]


def verify_distribution(dist: MatterDistribution, tol: float = 1e-8) -> VerificationReport:
    """Check the matter-distribution conditions (i)-(vi) and report residuals."""
    passed, res, skipped = {}, {}, []
    bodies = dist.bodies
    radii = dist.interface_radii

    # (i) ordered, disjoint supports
    ordered = bool(len(radii) == 0 or (np.all(np.diff(radii) > 0) and radii[0] >= 0))
    passed["i_supports"] = ordered
    res["i_supports"] = float(np.min(np.diff(radii))) if len(radii) > 1 else 0.0

    # (ii) radial momentum balance and mass equation, integrated step by step
    worst_p, worst_m, mass_gap = 0.0, 0.0, 0.0
    enclosed = 0.0
    for b in bodies:
        prof, spec, K = b.profile, b.material, b.K
        if b.is_ball:
            mass_gap = max(mass_gap, abs(float(prof.m[0]) - FOUR_PI / 3 * K * prof.delta[0] * prof.r[0] ** 3))
        else:
            mass_gap = max(mass_gap, abs(float(prof.m[0]) - enclosed))
        enclosed += b.total_mass
        iv = prof.steps()
        d, e, m = prof(iv.ravel())
        p_ends = spec.p_rad(d, e).reshape(-1, 2)
        m_ends = m.reshape(-1, 2)
        dp = prof.step_integrals(
            lambda r, d, e, m: -2.0 / r * (spec.p_rad(d, e) - spec.p_tan(d, e)) - K * d * m / r**2)
        dm = prof.step_integrals(lambda r, d, e, m: FOUR_PI * K * r * r * d)
        worst_p = max(worst_p, float(np.max(np.abs(p_ends[:, 1] - p_ends[:, 0] - dp))) / spec.p0)
        worst_m = max(worst_m, float(np.max(np.abs(m_ends[:, 1] - m_ends[:, 0] - dm))) / max(b.total_mass, 1e-300))
    res["ii_momentum"] = worst_p
    res["ii_mass"] = worst_m
    res["ii_mass_continuity"] = mass_gap
    passed["ii_equations"] = worst_p < tol and worst_m < tol and mass_gap <= 1e-12 * max(dist.total_mass, 1e-300)

    # (iii) positive density and pressures strictly inside the supports
    worst = math.inf
    for b in bodies:
        rs = np.concatenate([b.profile.r[1:-1], _interior_probe(b)])
        rs = rs[(rs > b.profile.r_start) & (rs < b.r_end)]
        if len(rs) == 0:
            continue
        d, e, _ = b.profile(rs)
        vals = np.concatenate([d, b.material.p_rad(d, e) / b.material.p0, b.material.p_tan(d, e) / b.material.p0])
        worst = min(worst, float(np.min(vals)))
    res["iii_positivity"] = worst if bodies else 0.0
    passed["iii_positivity"] = bool(worst > 0) if bodies else True

    # (iv) p_rad vanishes at each outer radius and at each shell inner radius
    worst = 0.0
    ends_ok = True
    for b in bodies:
        prof, p0 = b.profile, b.material.p0
        pts = [prof.r_end] if b.is_ball else [prof.r_start, prof.r_end]
        for r in pts:
            d, e, _ = np.asarray(prof(r), float).reshape(3)
            worst = max(worst, abs(float(b.material.p_rad(d, e))) / p0)
        ends_ok &= prof.termination is Termination.PRESSURE_ZERO
    res["iv_interfaces"] = worst
    passed["iv_interfaces"] = bool(ends_ok and worst < INTERFACE_TOL)

    # (v) isotropic, positive centre pressure; vacuum cores need r_0 > 0 instead
    if dist.core is Core.NON_VACUUM:
        b = bodies[0]
        d, e = b.profile.delta[0], b.profile.eta[0]
        pr, pt = b.material.p_rad(d, e), b.material.p_tan(d, e)
        res["v_center"] = float(abs(pr - pt) / b.material.p0)
        passed["v_center"] = bool(res["v_center"] < tol and pr > 0)
    else:
        skipped.append("v_center")
        res["v_center"] = float(radii[0]) if len(radii) else 0.0
        passed["v_center"] = bool(len(radii) == 0 or radii[0] > 0)

    # (vi) no matter outside the closed support
    probes = []
    for left, right in zip(radii[1:-1:2], radii[2::2]):
        probes.append(0.5 * (left + right))
    if len(radii):
        probes += [radii[-1] * 1.5, radii[-1] * 10.0]
        if radii[0] > 0:
            probes.append(0.5 * radii[0])
    if probes:
        f = dist.fields(np.array(probes))
        worst = float(max(np.max(np.abs(f["rho"])), np.max(np.abs(f["p_rad"])), np.max(np.abs(f["p_tan"]))))
    else:
        worst = 0.0
    res["vi_vacuum"] = worst
    passed["vi_vacuum"] = worst == 0.0

    total = float(bodies[-1].profile.m[-1]) if bodies else 0.0
    res["mass_additivity"] = abs(total - dist.total_mass) / max(total, 1e-300)
    passed["mass_additivity"] = res["mass_additivity"] <= 1e-12
    return VerificationReport(tol, passed, res, tuple(skipped))
