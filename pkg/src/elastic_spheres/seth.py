"""Closed-form analysis of the Seth model.

Covers the self-similar solution, the material constants ``a, b``, the
fixed points of the autonomous ``(u, y, z)`` system and a few sampled
inequality checks used as property tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .equilibrium import SolutionProfile, rhs_autonomous, theta_length
from .errors import DomainError, ProfileTooShort, StepFailure
from .materials import LameCoefficients, zero_pressure_delta_seth

__all__ = [
    "material_constants_ab",
    "SethAnalysis",
    "analyse",
    "self_similar",
    "self_similar_derivative",
    "FixedPoint",
    "fixed_points",
    "classify",
    "Asymptotics",
    "asymptotics_check",
    "profile_uyz",
    "boundary_pressure_derivative",
    "divergence",
    "divergence_grid",
    "disk_dissipation",
    "disk_boundary_samples",
    "integrate_orbit",
]


def material_constants_ab(lame: LameCoefficients):
    L = lame.longitudinal
    return 2.0 * (lame.lam + lame.mu) / L, 2.0 * lame.mu / L


def _seth_p0(lame: LameCoefficients) -> float:
    return 0.5 * (3.0 * lame.lam + 2.0 * lame.mu)


def _amplitude(lame: LameCoefficients, K: float) -> float:
    return (3.0 / math.pi) ** 0.75 * (9.0 * lame.lam + 14.0 * lame.mu) ** 0.75 / (16.0 * math.sqrt(K))


@dataclass(frozen=True)
class SethAnalysis:
    lame: LameCoefficients
    K: float
    a: float
    b: float
    theta_len: float
    c_const: float
    R_star: float
    u_P: float
    y_P: float = 0.5
    u_Q: float = 0.0
    y_Q: float = 1.0

    @property
    def p0(self) -> float:
        return _seth_p0(self.lame)

    @property
    def scale(self) -> float:
        """``(2c/K)**(2/3)``, the length in the self-similar pressures."""
        return (2.0 * self.c_const / self.K) ** (2.0 / 3.0)


def analyse(lame: LameCoefficients, K: float) -> SethAnalysis:
    if K <= 0:
        raise DomainError("K must be positive")
    lam, mu = lame.lam, lame.mu
    if not 9.0 * lam + 14.0 * mu > 0:
        raise DomainError("self-similar amplitude needs 9 lambda + 14 mu > 0")
    a, b = material_constants_ab(lame)
    c = _amplitude(lame, K)
    scale = (2.0 * c / K) ** (2.0 / 3.0)
    R = scale * (9.0 * lam + 2.0 * mu) / (12.0 * lam + 8.0 * mu)
    return SethAnalysis(lame, K, a, b, theta_length(lame, K), c, R, 0.5 * math.sqrt(1.0 + 4.0 * a + 2.0 * b))


def self_similar(lame: LameCoefficients, K: float, r):
    """Self-similar Seth solution ``(delta, eta, m, p_rad, p_tan)`` at ``r``."""
    r = np.asarray(r, float)
    if np.any(r <= 0):
        raise DomainError("self-similar solution needs r > 0")
    c = _amplitude(lame, K)
    lam, mu = lame.lam, lame.mu
    p0 = _seth_p0(lame)
    scale = (2.0 * c / K) ** (2.0 / 3.0)
    delta = c / (K * r**1.5)
    m = 8.0 * math.pi * c / 3.0 * r**1.5
    p_rad = -p0 + (9.0 * lam + 2.0 * mu) / 8.0 * scale / r
    p_tan = -p0 + (9.0 * lam + 8.0 * mu) / 8.0 * scale / r
    return delta, 2.0 * delta, m, p_rad, p_tan


def self_similar_derivative(lame: LameCoefficients, K: float, r):
    """Analytic r-derivative of ``(delta, eta, m)`` for the self-similar solution."""
    delta, eta, m, _, _ = self_similar(lame, K, r)
    return -1.5 * delta / r, -1.5 * eta / r, 1.5 * m / r


# ---------------------------------------------------------------- fixed points

@dataclass(frozen=True)
class FixedPoint:
    u: float
    y: float
    eigenvalues: tuple
    z_eigenvalue: float
    classification: str


def classify(eigs) -> str:
    re = [complex(e).real for e in eigs]
    if all(x < 0 for x in re):
        return "sink"
    if all(x > 0 for x in re):
        return "source"
    if any(x == 0 for x in re):
        return "non-hyperbolic"
    return "saddle"


def _eig2(tr: float, det: float):
    disc = complex(tr * tr - 4.0 * det) ** 0.5
    e1, e2 = 0.5 * (tr + disc), 0.5 * (tr - disc)
    if e1.imag == 0 and e2.imag == 0:
        return (e1.real, e2.real)
    return (e1, e2)


def fixed_points(a: float, b: float) -> dict:
    """Fixed points P and Q of the autonomous system on the surface z = 1."""
    if not (a >= 1.0 and 0.0 < b <= 1.0):
        raise DomainError(f"(a, b) = ({a}, {b}) outside a >= 1, 0 < b <= 1")
    u_P = 0.5 * math.sqrt(1.0 + 4.0 * a + 2.0 * b)
    # Jacobian at P is [[0, u_P], [-u_P, -2a - b/2]]
    eig_P = _eig2(-2.0 * a - 0.5 * b, u_P * u_P)
    # Jacobian at Q is diag(1, -(1 + a + b))
    eig_Q = (1.0, -(1.0 + a + b))
    return {
        "P": FixedPoint(u_P, 0.5, eig_P, -0.75, classify(eig_P)),
        "Q": FixedPoint(0.0, 1.0, eig_Q, -3.0, classify(eig_Q)),
    }


# ---------------------------------------------------------------- asymptotics

@dataclass(frozen=True)
class Asymptotics:
    r_probe: float
    dy: float
    du: float
    dz: float
    dp: float

    def as_dict(self):
        return {"r_probe": self.r_probe, "dy": self.dy, "du": self.du, "dz": self.dz, "dp": self.dp}


def profile_uyz(profile: SolutionProfile, analysis: SethAnalysis, r):
    """Map profile states at ``r`` to ``(u, y, z)``."""
    r = np.asarray(r, float)
    d, e, m = profile(r)
    x = analysis.theta_len * e ** (2.0 / 3.0)
    return r * x, d / e, 3.0 * m / (4.0 * math.pi * analysis.K * r**3 * e)


def asymptotics_check(profile: SolutionProfile, analysis: SethAnalysis, r_probe: float) -> Asymptotics:
    if r_probe > profile.r_end * (1.0 + 1e-12) or r_probe < profile.r_start:
        raise ProfileTooShort(f"profile covers [{profile.r_start}, {profile.r_end}], probe at {r_probe}")
    u, y, z = profile_uyz(profile, analysis, r_probe)
    d, e, _ = profile(r_probe)
    p = profile.material.p_rad(d, e)
    p0 = analysis.p0
    return Asymptotics(float(r_probe), float(abs(y - 0.5)), float(abs(u - analysis.u_P)),
                       float(abs(z - 1.0)), float(abs(p + p0) / p0))


# ---------------------------------------------------------------- boundary derivative

def boundary_pressure_derivative(lame: LameCoefficients, K: float, eta: float, m: float, r: float) -> float:
    """d p_rad / dr at a radius where p_rad vanishes, as a function of eta and m."""
    if r <= 0:
        raise DomainError("r must be positive")
    delta = zero_pressure_delta_seth(lame, eta)
    lam, mu = lame.lam, lame.mu
    return (2.0 * mu / r * (3.0 * lam + 2.0 * mu) / lame.longitudinal * (eta ** (2.0 / 3.0) - 1.0)
            - K / (r * r) * m * delta)


# ---------------------------------------------------------------- inequality probes

def divergence(a: float, b: float, u, y):
    """Divergence of the planar (u, y) field on z = 1."""
    return b - a + y - 2.0 * b * y - u * u - y * y


def divergence_grid(a: float, b: float, n: int = 100):
    """Grid over (0, 3 u_P] x (0, 1) and the divergence sampled on it."""
    u_P = 0.5 * math.sqrt(1.0 + 4.0 * a + 2.0 * b)
    u = 3.0 * u_P * np.arange(1, n + 1) / n
    y = np.arange(1, n + 1) / (n + 1.0)
    U, Y = np.meshgrid(u, y, indexing="ij")
    return U, Y, divergence(a, b, U, Y)


def disk_dissipation(a: float, b: float, u, y):
    """d/dxi of the squared distance to P along the z = 1 flow."""
    u_P = 0.5 * math.sqrt(1.0 + 4.0 * a + 2.0 * b)
    du, dy, _ = rhs_autonomous(a, b, u, y, 1.0)
    return 2.0 * (u - u_P) * du + 2.0 * (y - 0.5) * dy


def disk_boundary_samples(a: float, b: float, n: int = 720, radius2: float = 0.5):
    """Points of the circle of squared radius ``radius2`` about P inside u > 0, 0 < y < 1."""
    u_P = 0.5 * math.sqrt(1.0 + 4.0 * a + 2.0 * b)
    t = 2.0 * math.pi * np.arange(n) / n
    rad = math.sqrt(radius2)
    u = u_P + rad * np.cos(t)
    y = 0.5 + rad * np.sin(t)
    keep = (u > 0) & (y > 0) & (y < 1)
    return u[keep], y[keep]


def integrate_orbit(a: float, b: float, seed, xi_max: float, n_out: int = 201,
                    rtol: float = 1e-10, atol: float = 1e-12) -> np.ndarray:
    """Orbit table with rows ``(xi, u, y, z)`` from ``seed = (u, y, z)``."""
    if xi_max <= 0 or n_out < 2:
        raise DomainError("orbit needs xi_max > 0 and n_out >= 2")
    xi = np.linspace(0.0, xi_max, n_out)
    sol = solve_ivp(lambda t, s: rhs_autonomous(a, b, *s), (0.0, xi_max), list(seed), method="DOP853",
                    t_eval=xi, rtol=rtol, atol=atol)
    if sol.status != 0:
        raise StepFailure(f"orbit integration failed: {sol.message}")
    return np.column_stack([sol.t, sol.y.T])
