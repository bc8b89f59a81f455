"""Equilibrium ODE systems, initial data and the shooting integrator.

The state vector is ``(delta, eta, m)`` as a function of the physical
radius ``r``.  Units have ``G = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Sequence

import numpy as np
from numpy.polynomial import Chebyshev
from scipy.integrate import DOP853, DenseOutput, OdeSolution
from scipy.optimize import brentq

from .errors import (
    DomainError,
    EllipticityLoss,
    NoZeroPressureRoot,
    SingularityGuard,
    StepFailure,
)
from .materials import Family, LameCoefficients, MaterialSpec, zero_pressure_delta_seth

__all__ = [
    "EquilibriumState",
    "SethDimensionlessState",
    "Controls",
    "Termination",
    "SolutionProfile",
    "rhs_general",
    "rhs_seth",
    "rhs_xyz",
    "rhs_autonomous",
    "seth_thetas",
    "theta_length",
    "default_r_eps",
    "center_init",
    "shell_init",
    "integrate",
    "to_dimensionless",
    "from_dimensionless",
]

FOUR_PI = 4.0 * math.pi
# below this delta/eta a Seth shell starts on the delta**2 ~ (r - r0) branch
SQRT_START_RATIO = 1e-6
_RTOL = 4.0 * np.finfo(float).eps  # tightest relative tolerance brentq accepts
# DOP853 dense output is a degree-7 polynomial per step
_FIT_NODES = 8


@dataclass(frozen=True)
class EquilibriumState:
    r: float
    delta: float
    eta: float
    m: float

    def as_array(self) -> np.ndarray:
        return np.array([self.delta, self.eta, self.m])

    def rho(self, K: float) -> float:
        return K * self.delta


@dataclass(frozen=True)
class SethDimensionlessState:
    x: float
    y: float
    z: float
    theta_len: float


def theta_length(lame: LameCoefficients, K: float) -> float:
    """Seth length scale ``K sqrt(4 pi / (3 (lambda + 2 mu)))``; its inverse is the radial unit."""
    return K * math.sqrt(FOUR_PI / (3.0 * lame.longitudinal))


def default_r_eps(spec: MaterialSpec, K: float) -> float:
    return 1e-6 / theta_length(spec.lame, K)


def to_dimensionless(state: EquilibriumState, lame: LameCoefficients, K: float) -> SethDimensionlessState:
    if state.r <= 0 or state.eta <= 0:
        raise DomainError("dimensionless variables need r > 0 and eta > 0")
    th = theta_length(lame, K)
    z = 3.0 * state.m / (FOUR_PI * K * state.r**3 * state.eta)
    return SethDimensionlessState(th * state.eta ** (2.0 / 3.0), state.delta / state.eta, z, th)


def from_dimensionless(ds: SethDimensionlessState, r: float, K: float) -> EquilibriumState:
    if r <= 0:
        raise DomainError("r must be positive")
    eta = (ds.x / ds.theta_len) ** 1.5
    return EquilibriumState(r, ds.y * eta, eta, ds.z * FOUR_PI / 3.0 * K * r**3 * eta)


# ---------------------------------------------------------------- right-hand sides

def _rhs(spec: MaterialSpec, K: float, r: float, delta: float, eta: float, m: float):
    dd, de = spec.dp_rad(delta, eta)
    if not dd > 0:
        raise EllipticityLoss(f"d p_rad / d delta = {dd} <= 0 at r = {r}")
    num = (-3.0 / r * de * (delta - eta)
           - 2.0 / r * (spec.p_rad(delta, eta) - spec.p_tan(delta, eta))
           - K * delta * m / (r * r))
    return num / dd, 3.0 / r * (delta - eta), FOUR_PI * K * r * r * delta


def _check_state(state: EquilibriumState):
    if state.r <= 0:
        raise DomainError("r must be positive")
    if state.delta <= 0 or state.eta <= 0:
        raise DomainError("delta and eta must be positive")


def rhs_general(spec: MaterialSpec, K: float, state: EquilibriumState):
    """Derivatives ``(d delta/dr, d eta/dr, dm/dr)`` for any family."""
    _check_state(state)
    return _rhs(spec, K, state.r, state.delta, state.eta, state.m)


def seth_thetas(lame: LameCoefficients, K: float, delta, eta):
    lam, L = lame.lam, lame.longitudinal
    t1 = 2.0 / (3.0 * L) * (lam * eta / delta - L * delta / eta)
    t2 = lame.mu / L * (delta * delta - eta * eta) / delta
    t3 = K / L * eta ** (4.0 / 3.0) / delta
    return t1, t2, t3


def rhs_seth(lame: LameCoefficients, K: float, state: EquilibriumState):
    """Closed-form Seth right-hand side written with the theta coefficients."""
    _check_state(state)
    r, d, e, m = state.r, state.delta, state.eta, state.m
    t1, t2, t3 = seth_thetas(lame, K, d, e)
    return (-3.0 / r * t1 * (d - e) - 2.0 / r * t2 - t3 * m / (r * r) * d,
            3.0 / r * (d - e),
            FOUR_PI * K * r * r * d)


def rhs_xyz(a: float, b: float, r: float, x: float, y: float, z: float):
    if r <= 0 or y <= 0:
        raise DomainError("rhs_xyz needs r > 0 and y > 0")
    return (-2.0 * x / r * (1.0 - y),
            (a + b * y + y * y) * (1.0 - y) / (r * y) - r * x * x * z,
            3.0 * y / r * (1.0 - z))


def rhs_autonomous(a: float, b: float, u, y, z):
    """Autonomous Seth system in ``u = r x`` and ``d/dxi = r y d/dr``."""
    return (-u * (1.0 - 2.0 * y) * y,
            (a + b * y + y * y) * (1.0 - y) - u * u * y * z,
            3.0 * y * y * (1.0 - z))


# ---------------------------------------------------------------- initial data

def center_init(spec: MaterialSpec, K: float, delta_c: float, r_eps: Optional[float] = None) -> EquilibriumState:
    """Flat start ``delta = eta = delta_c`` at a small radius; error O(r_eps**2)."""
    if r_eps is None:
        r_eps = default_r_eps(spec, K)
    if delta_c <= 0 or r_eps <= 0:
        raise DomainError("center_init needs delta_c > 0 and r_eps > 0")
    return EquilibriumState(r_eps, delta_c, delta_c, FOUR_PI / 3.0 * K * delta_c * r_eps**3)


def zero_pressure_delta(spec: MaterialSpec, eta: float) -> float:
    """Smallest delta > 0 at which p_rad(., eta) crosses zero upwards."""
    if spec.family is Family.SETH and spec.lame.lam > 0:
        return zero_pressure_delta_seth(spec.lame, eta)
    grid = np.geomspace(1e-8, 1e8, 801)
    with np.errstate(all="ignore"):
        g = spec.p_rad(grid, eta)
    ok = np.isfinite(g)
    for i in range(len(grid) - 1):
        if ok[i] and ok[i + 1] and g[i] < 0 <= g[i + 1]:
            if g[i + 1] == 0:
                return float(grid[i + 1])
            return brentq(lambda d: spec.p_rad(d, eta), grid[i], grid[i + 1], xtol=1e-300, rtol=_RTOL)
    raise NoZeroPressureRoot(f"p_rad(., {eta}) has no positive root")


def shell_init(spec: MaterialSpec, K: float, S: float, r0: float, M_interior: float = 0.0) -> EquilibriumState:
    """Inner-boundary data of a shell with reference radius ``S`` placed at ``r0``.

    ``m(r0)`` is the mass enclosed by the shell; ``eta(r0) = (S/r0)**3`` holds
    regardless of it, since eta only counts the shell's own mass.
    """
    if r0 <= 0 or S <= 0 or K <= 0:
        raise DomainError("shell_init needs r0, S, K > 0")
    if M_interior < 0:
        raise DomainError("interior mass must be non-negative")
    eta0 = (S / r0) ** 3
    return EquilibriumState(r0, zero_pressure_delta(spec, eta0), eta0, float(M_interior))


# ---------------------------------------------------------------- integration

class Termination(str, Enum):
    PRESSURE_ZERO = "PressureZero"
    RADIUS_CUTOFF = "RadiusCutoff"
    SINGULARITY_GUARD = "SingularityGuard"
    STEP_FAILURE = "StepFailure"


@dataclass(frozen=True)
class Controls:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    r_stop: Optional[float] = None
    max_steps: int = 100_000
    detect_boundary: bool = True

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0 and self.max_steps > 0):
            raise DomainError("integration controls must be positive")
        if self.r_stop is not None and not self.r_stop > 0:
            raise DomainError("r_stop must be positive")

    @classmethod
    def from_dict(cls, block: Optional[dict]) -> "Controls":
        block = block or {}
        names = {f for f in cls.__dataclass_fields__}
        return cls(**{k: v for k, v in block.items() if k in names})


class _SqrtStart(DenseOutput):
    """Start-up segment near a zero-density shell boundary: delta**2 is linear in r."""

    def __init__(self, r0, r1, y0, y1):
        super().__init__(r0, r1)
        self.y0 = np.asarray(y0, float)
        self.y1 = np.asarray(y1, float)

    def _call_impl(self, t):
        s = np.clip((np.asarray(t) - self.t_old) / (self.t - self.t_old), 0.0, 1.0)
        lin = self.y0[:, None] + (self.y1 - self.y0)[:, None] * s
        lin[0] = np.sqrt(self.y0[0] ** 2 + (self.y1[0] ** 2 - self.y0[0] ** 2) * s)
        return lin


@dataclass(frozen=True)
class SolutionProfile:
    """Samples of one integration plus its piecewise dense output.

    Columns ``r, delta, eta, m`` hold the accepted steps (and the refined
    boundary point when a pressure zero terminated the run).
    """

    r: np.ndarray
    delta: np.ndarray
    eta: np.ndarray
    m: np.ndarray
    breakpoints: np.ndarray
    segments: tuple
    termination: Termination
    material: MaterialSpec
    K: float
    S: Optional[float] = None
    r_exact: Optional[float] = None
    _dense: OdeSolution = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self._dense is None and len(self.segments):
            object.__setattr__(self, "_dense", OdeSolution(self.breakpoints, list(self.segments)))

    @property
    def r_start(self) -> float:
        return float(self.r[0])

    @property
    def r_end(self) -> float:
        return float(self.r[-1])

    @property
    def rho(self) -> np.ndarray:
        return self.K * self.delta

    @property
    def p_rad(self) -> np.ndarray:
        return self.material.p_rad(self.delta, self.eta)

    @property
    def p_tan(self) -> np.ndarray:
        return self.material.p_tan(self.delta, self.eta)

    def state(self, i: int) -> EquilibriumState:
        return EquilibriumState(float(self.r[i]), float(self.delta[i]), float(self.eta[i]), float(self.m[i]))

    def __len__(self):
        return len(self.r)

    def __call__(self, r):
        """Dense-output ``(delta, eta, m)`` at ``r`` (clipped to the profile)."""
        rr = np.clip(r, self.r_start, self.r_end)
        return self._dense(rr)

    def segment_midpoints(self) -> np.ndarray:
        """Midpoints of the integrator steps that lie inside the profile."""
        b = self.breakpoints
        mids = 0.5 * (b[:-1] + b[1:])
        keep = [not isinstance(s, _SqrtStart) for s in self.segments]
        mids = mids[np.asarray(keep)]
        return mids[(mids > self.r_start) & (mids < self.r_end)]

    def derivative(self, r: np.ndarray) -> np.ndarray:
        """Derivative of the dense-output polynomial of the step containing ``r``."""
        r = np.atleast_1d(np.asarray(r, float))
        idx = np.clip(np.searchsorted(self.breakpoints, r) - 1, 0, len(self.segments) - 1)
        out = np.empty((3, len(r)))
        for k in np.unique(idx):
            sel = idx == k
            out[:, sel] = _segment_derivative(self.segments[k], r[sel])
        return out

    def steps(self) -> np.ndarray:
        """Step intervals ``[[lo, hi], ...]`` covering ``[r_start, r_end]``."""
        b = np.clip(self.breakpoints, self.r_start, self.r_end)
        iv = np.column_stack([b[:-1], b[1:]])
        return iv[iv[:, 1] > iv[:, 0]]

    def step_integrals(self, func, n: int = 8) -> np.ndarray:
        """Gauss-Legendre integral of ``func(r, delta, eta, m)`` over every step."""
        x, w = np.polynomial.legendre.leggauss(n)
        iv = self.steps()
        mid, half = 0.5 * (iv[:, 0] + iv[:, 1]), 0.5 * (iv[:, 1] - iv[:, 0])
        rr = (mid[:, None] + half[:, None] * x[None, :]).ravel()
        d, e, m = self(rr)
        vals = np.asarray(func(rr, d, e, m)).reshape(len(iv), n)
        return half * (vals @ w)

    def eta_identity_residual(self) -> np.ndarray:
        """Per-step mismatch of ``r**3 eta`` against ``3 int delta r**2``, relative to ``r**3 eta``."""
        iv = self.steps()
        _, e = self(iv.ravel())[:2]
        q = iv.ravel() ** 3 * e
        q = q.reshape(-1, 2)
        integ = self.step_integrals(lambda r, d, e, m: 3.0 * r * r * d)
        return np.abs(q[:, 1] - q[:, 0] - integ) / np.abs(q[:, 1])

    def truncated(self, r_cut: float) -> "SolutionProfile":
        """Copy ending at ``r_cut`` (used to build counterexamples and probes)."""
        keep = self.r < r_cut
        d, e, m = self(r_cut)
        return replace(self, r=np.append(self.r[keep], r_cut), delta=np.append(self.delta[keep], d),
                       eta=np.append(self.eta[keep], e), m=np.append(self.m[keep], m),
                       termination=Termination.RADIUS_CUTOFF, r_exact=None, _dense=self._dense)


def _segment_derivative(seg, t: np.ndarray) -> np.ndarray:
    if isinstance(seg, _SqrtStart):
        d2 = seg.y0[0] ** 2 + (seg.y1[0] ** 2 - seg.y0[0] ** 2) * (t - seg.t_old) / (seg.t - seg.t_old)
        slope = (seg.y1 - seg.y0) / (seg.t - seg.t_old)
        out = np.repeat(slope[:, None], len(t), axis=1)
        out[0] = (seg.y1[0] ** 2 - seg.y0[0] ** 2) / (seg.t - seg.t_old) / (2.0 * np.sqrt(d2))
        return out
    if hasattr(seg, "F") and hasattr(seg, "h"):
        # nested Horner form of the DOP853 interpolant, differentiated alongside
        x = ((t - seg.t_old) / seg.h)[:, None]
        y = np.zeros((len(t), seg.F.shape[1]))
        dy = np.zeros_like(y)
        for i, f in enumerate(reversed(seg.F)):
            y += f
            if i % 2 == 0:
                dy = dy * x + y
                y *= x
            else:
                dy = dy * (1 - x) - y
                y *= 1 - x
        return (dy / seg.h).T
    lo, hi = seg.t_min, seg.t_max
    nodes = 0.5 * (lo + hi) + 0.5 * (hi - lo) * np.cos(np.pi * (np.arange(_FIT_NODES) + 0.5) / _FIT_NODES)
    vals = seg(nodes)
    return np.array([Chebyshev.fit(nodes, v, _FIT_NODES - 1, domain=[lo, hi]).deriv()(t) for v in vals])


def _profile(rs, ys, bps, segs, term, spec, K, S, r_exact=None):
    ys = np.asarray(ys)
    return SolutionProfile(np.asarray(rs), ys[:, 0].copy(), ys[:, 1].copy(), ys[:, 2].copy(),
                           np.asarray(bps), tuple(segs), term, spec, K, S, r_exact)


def integrate(spec: MaterialSpec, K: float, init: EquilibriumState, controls: Optional[Controls] = None,
              S: Optional[float] = None) -> SolutionProfile:
    """Shoot outward from ``init`` until the radial pressure vanishes.

    Uses the DOP853 pair with its 7th-order dense output.  A downward zero
    crossing of ``p_rad`` between accepted steps is located with Brent's
    method on the dense output.  Raises :class:`SingularityGuard` or
    :class:`StepFailure` (carrying the partial profile) on failure.
    """
    c = controls or Controls()
    if K <= 0:
        raise DomainError("K must be positive")
    r_stop = c.r_stop if c.r_stop is not None else 1e3 / theta_length(spec.lame, K)
    if not r_stop > init.r:
        raise DomainError("r_stop must exceed the initial radius")

    rs = [init.r]
    ys = [init.as_array()]
    bps = [init.r]
    segs = []

    start = init
    if init.delta == 0.0 or (spec.family is Family.SETH and 0.0 < init.delta < SQRT_START_RATIO * init.eta):
        if spec.family is not Family.SETH:
            raise SingularityGuard("zero initial density is only supported for Seth shells")
        start = _sqrt_start(spec, K, init)
        segs.append(_SqrtStart(init.r, start.r, init.as_array(), start.as_array()))
        bps.append(start.r)
        rs.append(start.r)
        ys.append(start.as_array())
    elif init.delta < 0 or init.eta <= 0:
        raise DomainError("initial delta must be >= 0 and eta > 0")

    trouble = []

    def fun(r, y):
        # invalid trial states give NaN so the stepper rejects the step and shrinks it
        if not (y[0] > 0 and y[1] > 0):
            trouble.append(f"delta or eta left the positive range at r = {r}")
            return np.full(3, np.nan)
        try:
            return np.array(_rhs(spec, K, r, y[0], y[1], y[2]))
        except EllipticityLoss as exc:
            trouble.append(str(exc))
            return np.full(3, np.nan)

    def fail(exc_type, msg):
        prof = _profile(rs, ys, bps, segs, Termination(exc_type.__name__), spec, K, S)
        raise exc_type(msg, prof)

    try:
        _rhs(spec, K, start.r, start.delta, start.eta, start.m)
    except EllipticityLoss as exc:
        fail(SingularityGuard, str(exc))
    first = 4.0 * (start.r - init.r) if start is not init else None
    solver = DOP853(fun, start.r, start.as_array(), r_stop, rtol=c.rel_tol, atol=c.abs_tol, first_step=first)

    p0 = spec.p0
    g_old = spec.p_rad(start.delta, start.eta)
    for _ in range(c.max_steps):
        try:
            msg = solver.step()
        except (EllipticityLoss, DomainError, ZeroDivisionError, FloatingPointError) as exc:
            fail(SingularityGuard, str(exc))
        if solver.status == "failed":
            if trouble:
                fail(SingularityGuard, f"{msg}; last guard trip: {trouble[-1]}")
            fail(StepFailure, str(msg))
        trouble.clear()
        r_new, y_new = solver.t, solver.y.copy()
        if not np.all(np.isfinite(y_new)) or y_new[0] <= 0:
            fail(SingularityGuard, f"delta left the positive range at r = {r_new}")
        if not spec.dp_rad(y_new[0], y_new[1])[0] > 0:
            fail(SingularityGuard, f"ellipticity lost at r = {r_new}")
        dense = solver.dense_output()
        g_new = spec.p_rad(y_new[0], y_new[1])
        if c.detect_boundary and g_old > 0 >= g_new:
            r_old = solver.t_old
            g = lambda rr: spec.p_rad(*dense(rr)[:2])
            r_b = r_new if g_new == 0 else brentq(g, r_old, r_new, xtol=2e-14 * r_new, rtol=_RTOL)
            y_b = dense(r_b)
            segs.append(dense)
            bps.append(r_new)
            if r_b > rs[-1]:
                rs.append(r_b)
                ys.append(y_b)
            if abs(g(r_b)) > c.abs_tol * p0:
                fail(StepFailure, f"boundary refinement left |p_rad| = {abs(g(r_b))}")
            return _profile(rs, ys, bps, segs, Termination.PRESSURE_ZERO, spec, K, S, r_exact=float(r_b))
        segs.append(dense)
        bps.append(r_new)
        rs.append(r_new)
        ys.append(y_new)
        g_old = g_new
        if solver.status == "finished":
            return _profile(rs, ys, bps, segs, Termination.RADIUS_CUTOFF, spec, K, S)
    fail(StepFailure, f"max_steps = {c.max_steps} exhausted")


def _sqrt_start(spec: MaterialSpec, K: float, init: EquilibriumState, rel_h: float = 1e-12) -> EquilibriumState:
    """Leave a (nearly) zero-density Seth boundary along delta**2 ~ delta0**2 + 2 a eta**2 (r - r0) / r0."""
    lame = spec.lame
    a = 2.0 * (lame.lam + lame.mu) / lame.longitudinal
    r0, d0, e0 = init.r, init.delta, init.eta
    h = rel_h * r0
    d1 = math.sqrt(d0 * d0 + 2.0 * a * h / r0 * e0 * e0)
    e1 = e0 - 3.0 * (e0 - 0.5 * (d0 + d1)) * h / r0
    m1 = init.m + FOUR_PI * K * r0 * r0 * 0.5 * (d0 + d1) * h
    return EquilibriumState(r0 + h, d1, e1, m1)


def sample_rhs(spec: MaterialSpec, K: float, profile: SolutionProfile, r: Sequence[float]) -> np.ndarray:
    """Right-hand side evaluated on the dense-output state at ``r``."""
    out = np.empty((3, len(r)))
    for j, rj in enumerate(r):
        d, e, m = profile(rj)
        out[:, j] = _rhs(spec, K, rj, d, e, m)
    return out
