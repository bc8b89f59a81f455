"""Recover reference parameters (K, and S for shells) from observable data."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .equilibrium import integrate, shell_init
from .errors import DomainError, ElasticSpheresError, MultipleRoots, NoConvergence, NoRoot, NotInvertible, OutOfRange
from .materials import Family, MaterialSpec

__all__ = [
    "Observables",
    "CalibrationControls",
    "ShellCalibration",
    "K_from_central",
    "K_from_surface",
    "KS_from_shell",
]

FOUR_PI_3 = 4.0 * math.pi / 3.0
_RTOL = 4.0 * np.finfo(float).eps  # tightest relative tolerance brentq accepts


@dataclass(frozen=True)
class Observables:
    rho_c: Optional[float] = None
    p_c: Optional[float] = None
    r0: Optional[float] = None
    r1: Optional[float] = None
    rho_r0: Optional[float] = None
    rho_r1: Optional[float] = None
    M: Optional[float] = None

    def __post_init__(self):
        for name in ("rho_c", "r0", "r1", "rho_r1", "M"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise DomainError(f"observable {name} must be positive")
        if self.rho_r0 is not None and self.rho_r0 < 0:
            raise DomainError("observable rho_r0 must be non-negative")
        if self.r0 is not None and self.r1 is not None and not self.r0 < self.r1:
            raise DomainError("observables need r0 < r1")

    @classmethod
    def from_dict(cls, block: dict) -> "Observables":
        names = cls.__dataclass_fields__
        return cls(**{k: float(v) for k, v in block.items() if k in names and v is not None})


@dataclass(frozen=True)
class CalibrationControls:
    bracket_lo: float = 1e-6
    bracket_hi: float = 1e6
    points_per_decade: int = 100
    max_iter: int = 200
    damping_floor: float = 2.0**-20
    fd_step: float = 1e-7
    tol: float = 1e-12


def _seth_central(spec: MaterialSpec, rho_c: float, p_c: float) -> float:
    p0 = spec.p0
    if not p_c > -p0:
        raise OutOfRange(f"p_c = {p_c} is not above the infimum -p0 = {-p0} of the central pressure")
    return rho_c * (p_c / p0 + 1.0) ** -1.5


def K_from_central(spec: MaterialSpec, rho_c: float, p_c: float, method: str = "auto",
                   controls: CalibrationControls = CalibrationControls()) -> float:
    """K such that the isotropic central pressure at density ``rho_c`` equals ``p_c``.

    ``method`` is "auto" (closed form for Seth), "closed" or "root".
    """
    if not rho_c > 0:
        raise DomainError("rho_c must be positive")
    if p_c == 0.0:
        return float(rho_c)
    if method == "closed" or (method == "auto" and spec.family is Family.SETH):
        if spec.family is not Family.SETH:
            raise DomainError("closed-form central inversion exists only for Seth")
        return _seth_central(spec, rho_c, p_c)

    def F(d):
        return spec.p_rad(d, d) - p_c

    # march away from the natural state until p_c is passed, requiring monotonicity
    up = p_c > 0
    factor = 2.0 if up else 0.5
    limit = controls.bracket_hi if up else controls.bracket_lo
    d_prev, f_prev = 1.0, F(1.0)
    while True:
        d = d_prev * factor
        if (up and d > limit) or (not up and d < limit):
            raise OutOfRange(f"p_c = {p_c} not reached for rho_c/K in [{controls.bracket_lo}, {controls.bracket_hi}]")
        f = F(d)
        if not np.isfinite(f) or (up and f <= f_prev) or (not up and f >= f_prev):
            raise NotInvertible(f"central pressure is not monotone near rho_c/K = {d}")
        if f == 0 or (f > 0) != (f_prev > 0):
            break
        d_prev, f_prev = d, f
    delta = d if f == 0 else brentq(F, min(d, d_prev), max(d, d_prev), xtol=1e-300, rtol=_RTOL)
    return float(rho_c / delta)


def K_from_surface(spec: MaterialSpec, rho_r1: float, r1: float, M: float,
                   controls: CalibrationControls = CalibrationControls()) -> float:
    """K making the radial pressure vanish at the surface of a ball."""
    if not (rho_r1 > 0 and r1 > 0 and M > 0):
        raise DomainError("surface calibration needs positive rho_r1, r1 and M")
    mass_density = M / (FOUR_PI_3 * r1**3)

    def g(K):
        return spec.p_rad(rho_r1 / K, mass_density / K)

    decades = math.log10(controls.bracket_hi / controls.bracket_lo)
    Ks = rho_r1 * np.geomspace(controls.bracket_lo, controls.bracket_hi,
                               int(round(decades * controls.points_per_decade)) + 1)
    with np.errstate(all="ignore"):
        vals = np.array([g(K) for K in Ks])
    brackets = []
    for i in range(len(Ks) - 1):
        a, b = vals[i], vals[i + 1]
        if np.isfinite(a) and np.isfinite(b) and (a == 0 or a * b < 0):
            brackets.append((float(Ks[i]), float(Ks[i + 1])))
    if not brackets:
        raise NoRoot(f"no surface root for K in [{Ks[0]}, {Ks[-1]}]")
    if len(brackets) > 1:
        raise MultipleRoots(f"{len(brackets)} surface roots found", brackets)
    lo, hi = brackets[0]
    if g(lo) == 0:
        return lo
    return float(brentq(g, lo, hi, xtol=1e-300, rtol=_RTOL))


@dataclass(frozen=True)
class ShellCalibration:
    K: float
    S: float
    residuals: tuple
    iterations: int
    candidates: tuple = ()
    radius_mismatch: Optional[float] = None

    def as_dict(self) -> dict:
        return {"K": self.K, "S": self.S, "residuals": list(self.residuals), "iterations": self.iterations,
                "candidates": [list(c) for c in self.candidates], "radius_mismatch": self.radius_mismatch}


def _shell_residual(spec, r0, r1, rho_r0, rho_r1, M, K, S):
    eta0 = (S / r0) ** 3
    eta1 = (S / r1) ** 3 + M / (FOUR_PI_3 * K * r1**3)
    return np.array([spec.p_rad(rho_r0 / K, eta0), spec.p_rad(rho_r1 / K, eta1)])


def _newton(R, x, target, controls):
    """Damped Newton on the log parameters; returns (x, residual, iterations)."""
    res = R(x)
    for it in range(controls.max_iter + 1):
        if np.all(np.abs(res) < target):
            return x, res, it
        if it == controls.max_iter:
            break
        J = np.empty((2, 2))
        for j in range(2):
            xp = x.copy()
            xp[j] += controls.fd_step
            J[:, j] = (R(xp) - res) / controls.fd_step
        try:
            step = np.linalg.solve(J, -res)
        except np.linalg.LinAlgError:
            raise NoConvergence("singular Jacobian in shell calibration", tuple(float(r) for r in res)) from None
        lam = 1.0
        norm = np.linalg.norm(res)
        while lam >= controls.damping_floor:
            trial = x + lam * step
            with np.errstate(all="ignore"):
                r_trial = R(trial)
            if np.all(np.isfinite(r_trial)) and np.linalg.norm(r_trial) < norm:
                break
            lam *= 0.5
        else:
            raise NoConvergence(f"damping fell below {controls.damping_floor}", tuple(float(r) for r in res))
        x, res = trial, r_trial
    raise NoConvergence(f"no convergence after {controls.max_iter} iterations", tuple(float(r) for r in res))


# extra starting points (multiples of rho_r1 and r0) used to look for further roots
_MULTISTART = tuple((fk, fs) for fk in (0.5, 1.0, 2.0) for fs in (1.1, 1.25, 1.5, 2.0))


def KS_from_shell(spec: MaterialSpec, r0: float, r1: float, rho_r0: float, rho_r1: float, M: float,
                  controls: CalibrationControls = CalibrationControls(),
                  disambiguate: bool = True) -> ShellCalibration:
    """Solve both boundary zero-pressure conditions of a shell for (K, S).

    Damped Newton in (log K, log S) with a forward-difference Jacobian,
    started from K = rho_r1, S = r0 (1 + 1e-3).  The two conditions can have
    several admissible solutions (S > r0); further starting points look for
    them, and when more than one is found the candidate whose shell,
    integrated outward from r0, ends closest to r1 is returned
    (``disambiguate=False`` raises :class:`MultipleRoots` instead).
    """
    Observables(r0=r0, r1=r1, rho_r0=rho_r0, rho_r1=rho_r1, M=M)
    target = controls.tol * spec.p0

    def R(v):
        return _shell_residual(spec, r0, r1, rho_r0, rho_r1, M, math.exp(v[0]), math.exp(v[1]))

    x, res, its = _newton(R, np.array([math.log(rho_r1), math.log(r0 * (1.0 + 1e-3))]), target, controls)
    found = [(x, res, its)]
    for fk, fs in _MULTISTART:
        try:
            cand = _newton(R, np.array([math.log(fk * rho_r1), math.log(fs * r0)]), target, controls)
        except NoConvergence:
            continue
        if all(np.max(np.abs(cand[0] - f[0])) > 1e-6 for f in found):
            found.append(cand)
    admissible = [f for f in found if math.exp(f[0][1]) > r0]
    if not admissible:
        raise NoConvergence("no solution with S > r0", tuple(float(r) for r in res))
    cands = tuple((math.exp(f[0][0]), math.exp(f[0][1])) for f in admissible)
    if len(admissible) == 1:
        x, res, its = admissible[0]
        return ShellCalibration(cands[0][0], cands[0][1], tuple(float(r) for r in res), its, cands)
    if not disambiguate:
        raise MultipleRoots(f"{len(admissible)} admissible (K, S) solutions", cands)
    mism = [_outer_radius_mismatch(spec, K, S, r0, r1) for K, S in cands]
    best = int(np.argmin(mism))
    x, res, its = admissible[best]
    return ShellCalibration(cands[best][0], cands[best][1], tuple(float(r) for r in res), its, cands,
                            float(mism[best]))


def _outer_radius_mismatch(spec: MaterialSpec, K: float, S: float, r0: float, r1: float) -> float:
    try:
        prof = integrate(spec, K, shell_init(spec, K, S, r0), S=S)
    except ElasticSpheresError:
        return math.inf
    return abs(prof.r_end - r1) / r1
