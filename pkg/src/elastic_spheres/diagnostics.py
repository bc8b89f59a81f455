"""Variational and Lagrangian cross-checks on computed profiles."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.integrate import cumulative_simpson, simpson

from .equilibrium import SolutionProfile
from .errors import DomainError, MonotonicityViolation, NotHyperelastic, QuadratureNotConverged
from .materials import MaterialSpec

__all__ = [
    "BumpFunction",
    "CompositeBump",
    "mass_neutral",
    "EnergyResult",
    "energy_functional",
    "energy_of_density",
    "first_variation",
    "fd_first_variation",
    "chemical_potential",
    "ReferenceRadius",
    "reconstruct_reference_radius",
    "variation_scale",
    "default_bumps",
]

FOUR_PI = 4.0 * math.pi
DEFAULT_NODES = 4096
_R_ROUNDING = 8.0 * np.finfo(float).eps


@dataclass(frozen=True)
class BumpFunction:
    """Polynomial bump ``amplitude * (1 - s**2)**4`` with ``s = (r - center)/width``."""

    center: float
    width: float
    amplitude: float = 1.0

    def __post_init__(self):
        if not self.width > 0:
            raise DomainError("bump width must be positive")

    @property
    def support(self):
        return (self.center - self.width, self.center + self.width)

    def __call__(self, r):
        s = (np.asarray(r, float) - self.center) / self.width
        return np.where(np.abs(s) < 1.0, self.amplitude * (1.0 - s * s) ** 4, 0.0)


@dataclass(frozen=True)
class CompositeBump:
    """Linear combination ``sum_i weights[i] * bumps[i]``."""

    bumps: tuple
    weights: tuple

    @property
    def support(self):
        return (min(b.support[0] for b in self.bumps), max(b.support[1] for b in self.bumps))

    def __call__(self, r):
        return sum(w * b(r) for b, w in zip(self.bumps, self.weights))


def _moment(bump, lo, hi, n=2049):
    r = np.linspace(lo, hi, n)
    return simpson(bump(r) * r * r, x=r)


def mass_neutral(first: BumpFunction, second: BumpFunction) -> CompositeBump:
    """``first - k * second`` with ``k`` chosen so the perturbation adds no mass."""
    m1 = _moment(first, *first.support)
    m2 = _moment(second, *second.support)
    return CompositeBump((first, second), (1.0, -m1 / m2))


def _grid(profile: SolutionProfile, n: int) -> np.ndarray:
    if n < 4 or n % 2:
        raise DomainError("node count must be even and at least 4")
    return np.linspace(profile.r_start, profile.r_end, n + 1)


def _require_hyperelastic(spec: MaterialSpec):
    if not spec.is_hyperelastic:
        raise NotHyperelastic(f"{spec.family.value} has no stored energy; no variational formulation")


def _start_values(profile: SolutionProfile):
    r0 = profile.r_start
    return r0, float(profile.eta[0]) * r0**3, float(profile.m[0])


def _energy_terms(spec, K, r, delta, r3eta0, m0):
    """Internal and gravitational energy for density ``delta`` sampled on grid ``r``."""
    q = 3.0 * cumulative_simpson(delta * r * r, x=r, initial=0.0)
    eta = (r3eta0 + q) / r**3
    m = m0 + K * FOUR_PI / 3.0 * q
    with np.errstate(all="ignore"):
        dens = np.where(delta > 0, delta * spec.w(np.where(delta > 0, delta, 1.0), eta), 0.0)
    internal = simpson(dens * r * r, x=r)
    grav = simpson(m * m / (r * r), x=r) + m[-1] ** 2 / r[-1]
    return internal, -grav / (2.0 * FOUR_PI), eta, m


@dataclass(frozen=True)
class EnergyResult:
    E: float
    internal: float
    gravitational: float
    error_estimate: float
    r: np.ndarray
    m: np.ndarray

    def as_dict(self) -> dict:
        return {"E": self.E, "internal": self.internal, "gravitational": self.gravitational,
                "error_estimate": self.error_estimate}


def energy_of_density(spec: MaterialSpec, K: float, r: np.ndarray, delta: np.ndarray,
                      r3eta0: float = 0.0, m0: float = 0.0) -> float:
    """Energy of an arbitrary density sample; eta and m follow from delta."""
    _require_hyperelastic(spec)
    internal, grav, _, _ = _energy_terms(spec, K, np.asarray(r, float), np.asarray(delta, float), r3eta0, m0)
    return internal + grav


def energy_functional(spec: MaterialSpec, K: float, profile: SolutionProfile, n: int = DEFAULT_NODES,
                      rel_tol: float = 1e-6) -> EnergyResult:
    """Internal plus gravitational energy, with a grid-halving error estimate.

    The exterior contributes ``M**2 / (8 pi r_end)`` to the gravitational part.
    """
    _require_hyperelastic(spec)
    r = _grid(profile, n)
    delta = profile(r)[0]
    _, r3eta0, m0 = _start_values(profile)
    internal, grav, _, m = _energy_terms(spec, K, r, delta, r3eta0, m0)
    E = internal + grav
    if n >= 8 and n % 4 == 0:
        i2, g2, _, _ = _energy_terms(spec, K, r[::2], delta[::2], r3eta0, m0)
        err = abs(E - (i2 + g2))
    else:
        err = math.nan
    scale = abs(internal) + abs(grav)
    if scale > 0 and err > rel_tol * scale:
        raise QuadratureNotConverged(f"energy halving estimate {err} exceeds {rel_tol} * {scale}")
    return EnergyResult(E, internal, grav, err, r, m)


def _tail(f, r):
    """``int_r^{r_end} f`` on the grid."""
    c = cumulative_simpson(f, x=r, initial=0.0)
    return c[-1] - c


def chemical_potential(spec: MaterialSpec, K: float, profile: SolutionProfile, n: int = DEFAULT_NODES):
    """Integrand ``G(r)`` of the first variation on a uniform grid.

    ``G = (w + p_rad/delta)/K + Lambda_0 + V_0`` where the two tail terms are
    integrated from r out to the boundary, and V_0 carries the exterior
    contribution ``-M / r_end``.
    """
    _require_hyperelastic(spec)
    r = _grid(profile, n)
    delta, eta, m = profile(r)
    pr, pt = spec.p_rad(delta, eta), spec.p_tan(delta, eta)
    local = (spec.w(delta, eta) + pr / delta) / K
    lam_tail = _tail(2.0 * (pt - pr) / (K * eta * r), r)
    V0 = -_tail(m / (r * r), r) - m[-1] / r[-1]
    return r, local + lam_tail + V0


def first_variation(spec: MaterialSpec, K: float, profile: SolutionProfile, bump,
                    n: int = DEFAULT_NODES) -> float:
    """Direct ``dE/dtau`` at tau = 0 for the density perturbation ``tau * bump``."""
    r, G = chemical_potential(spec, K, profile, n)
    phi = bump(r)
    if not np.any(phi):
        return 0.0
    return float(simpson(G * phi * r * r, x=r))


def variation_scale(spec: MaterialSpec, K: float, profile: SolutionProfile, bump, n: int = DEFAULT_NODES) -> float:
    """``int |G| |phi| r**2``, the size of the terms that cancel in a stationary profile."""
    r, G = chemical_potential(spec, K, profile, n)
    return float(simpson(np.abs(G * bump(r)) * r * r, x=r))


def fd_first_variation(spec: MaterialSpec, K: float, profile: SolutionProfile, bump, tau: float = 1e-5,
                       n: int = DEFAULT_NODES) -> float:
    """Central difference of the energy along ``rho + tau * bump``; eta and m are recomputed."""
    _require_hyperelastic(spec)
    r = _grid(profile, n)
    delta = profile(r)[0]
    phi = bump(r) / K
    _, r3eta0, m0 = _start_values(profile)
    e_plus = energy_of_density(spec, K, r, delta + tau * phi, r3eta0, m0)
    e_minus = energy_of_density(spec, K, r, delta - tau * phi, r3eta0, m0)
    return float((e_plus - e_minus) / (2.0 * tau))


@dataclass(frozen=True)
class ReferenceRadius:
    r: np.ndarray
    R: np.ndarray
    step_residual: np.ndarray

    @property
    def max_residual(self) -> float:
        return float(np.max(self.step_residual)) if len(self.step_residual) else 0.0

    def rows(self):
        return np.column_stack([self.r, self.R])


def reconstruct_reference_radius(profile: SolutionProfile, K: float, check: bool = True) -> ReferenceRadius:
    """Reference radius ``R = r eta**(1/3)`` at the profile samples.

    R must be non-decreasing; decreases beyond rounding raise
    :class:`MonotonicityViolation`.

    ``step_residual[k]`` compares the difference quotient of R over step k
    with the step average of ``delta r**2 / R**2``, scaled by the step length
    over R, so that dR/dr = delta r**2 / R**2 is tested in integrated form.
    """
    r = profile.r
    R = r * profile.eta ** (1.0 / 3.0)
    # R is flat to rounding where delta = 0 (shell started at r_min)
    dR = np.diff(R)
    if check and np.any(dR < -_R_ROUNDING * R[1:]):
        k = int(np.argmin(dR / R[1:]))
        raise MonotonicityViolation(f"reference radius decreases between r = {r[k]} and {r[k + 1]}")
    iv = profile.steps()
    _, e_ends, _ = profile(iv.ravel())
    R_ends = (iv.ravel() * e_ends ** (1.0 / 3.0)).reshape(-1, 2)
    integ = profile.step_integrals(lambda rr, d, e, m: d * rr * rr / (rr * rr * e ** (2.0 / 3.0)))
    res = np.abs(R_ends[:, 1] - R_ends[:, 0] - integ) / R_ends[:, 1]
    return ReferenceRadius(r.copy(), R, res)


def default_bumps(profile: SolutionProfile, centers: Sequence[float] = (0.3, 0.5, 0.7),
                  width: float = 0.15) -> list:
    """Bumps at fractions of the support, each clear of both ends."""
    lo, hi = profile.r_start, profile.r_end
    span = hi - lo
    return [BumpFunction(lo + c * span, width * span) for c in centers]
