"""Constitutive catalog for spherically symmetric elastic matter.

Each family is written in Euler variables: the dimensionless density
``delta = rho / K`` and the dimensionless local mass ``eta``.  All pressure
functions accept floats or numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .errors import DomainError, InvalidMaterial, NotHyperelastic

__all__ = [
    "Family",
    "LameCoefficients",
    "HadamardParams",
    "MaterialSpec",
    "ValidationReport",
    "p_rad_hat",
    "p_tan_hat",
    "stored_energy",
    "validate_material",
    "zero_pressure_delta_seth",
    "seth_eta_bound",
    "DIAGONAL_GRID",
    "HYPERELASTIC_GRID",
]

TWO_THIRDS = 2.0 / 3.0
FOUR_THIRDS = 4.0 / 3.0

DIAGONAL_GRID = (0.5, 0.8, 1.0, 1.25, 2.0, 4.0)
HYPERELASTIC_GRID = tuple(np.linspace(0.5, 2.0, 5))


class Family(str, Enum):
    SETH = "seth"
    SVK = "svk"
    SIGNORINI = "signorini"
    HADAMARD = "hadamard"
    LINEAR = "linear"

    @classmethod
    def parse(cls, value) -> "Family":
        if isinstance(value, cls):
            return value
        aliases = {
            "saintvenantkirchhoff": cls.SVK,
            "saint-venant-kirchhoff": cls.SVK,
            "signoriniquasilinear": cls.SIGNORINI,
            "linearconstitutive": cls.LINEAR,
        }
        key = str(value).strip().lower()
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise InvalidMaterial(f"unknown material family {value!r}") from None


@dataclass(frozen=True)
class LameCoefficients:
    lam: float
    mu: float

    def __post_init__(self):
        if not (np.isfinite(self.lam) and np.isfinite(self.mu)):
            raise InvalidMaterial("Lame coefficients must be finite")
        if self.mu <= 0:
            raise InvalidMaterial(f"mu must be positive, got {self.mu}")

    @property
    def poisson_ratio(self) -> float:
        return self.lam / (2.0 * (self.lam + self.mu))

    @property
    def longitudinal(self) -> float:
        """P-wave modulus lambda + 2 mu."""
        return self.lam + 2.0 * self.mu


@dataclass(frozen=True)
class HadamardParams:
    """Split ``alpha + beta = mu`` and the auxiliary function ``h``.

    ``h_coeffs[k]`` multiplies ``(s - 1)**k``.
    """

    alpha: float
    beta: float
    h_coeffs: tuple

    def __post_init__(self):
        c = np.asarray(self.h_coeffs, float)
        if c.ndim != 1 or c.size == 0:
            raise InvalidMaterial("h_coeffs must be a non-empty list of numbers")
        P = np.polynomial.polynomial
        object.__setattr__(self, "_derivs", (c, P.polyder(c, 1), P.polyder(c, 2)))

    def h(self, s, order: int = 0):
        return np.polynomial.polynomial.polyval(np.asarray(s) - 1.0, self._derivs[order])


def default_hadamard(lame: LameCoefficients, alpha=None, beta=None) -> HadamardParams:
    if alpha is None and beta is None:
        alpha = beta = 0.5 * lame.mu
    elif alpha is None:
        alpha = lame.mu - beta
    elif beta is None:
        beta = lame.mu - alpha
    # minimal polynomial meeting h'(1) and h''(1)
    coeffs = (0.0, -(alpha + 2.0 * beta), 0.25 * lame.longitudinal)
    return HadamardParams(float(alpha), float(beta), coeffs)


@dataclass(frozen=True)
class MaterialSpec:
    family: Family
    lame: LameCoefficients
    hadamard: Optional[HadamardParams] = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "family", Family.parse(self.family))
        lam, mu = self.lame.lam, self.lame.mu
        if self.family is Family.SIGNORINI:
            if 9.0 * lam + 5.0 * mu <= 0:
                raise InvalidMaterial("Signorini materials require 9*lambda + 5*mu > 0")
        elif 3.0 * lam + 2.0 * mu <= 0:
            raise InvalidMaterial(f"{self.family.value} materials require 3*lambda + 2*mu > 0")
        if self.family is Family.HADAMARD:
            if self.hadamard is None:
                object.__setattr__(self, "hadamard", default_hadamard(self.lame))
            self._check_hadamard()
        elif self.hadamard is not None:
            raise InvalidMaterial("Hadamard parameters given for a non-Hadamard family")

    def _check_hadamard(self):
        hp = self.hadamard
        scale = self.lame.longitudinal
        tol = 1e-12 * scale
        if abs(hp.alpha + hp.beta - self.lame.mu) > tol:
            raise InvalidMaterial("Hadamard parameters must satisfy alpha + beta = mu")
        if abs(float(hp.h(1.0, 1)) + hp.alpha + 2.0 * hp.beta) > tol:
            raise InvalidMaterial("Hadamard h must satisfy h'(1) = -(alpha + 2 beta)")
        if abs(float(hp.h(1.0, 2)) - 0.5 * scale) > tol:
            raise InvalidMaterial("Hadamard h must satisfy h''(1) = (lambda + 2 mu)/2")

    @classmethod
    def from_dict(cls, block: dict) -> "MaterialSpec":
        try:
            family = Family.parse(block["family"])
            lame = LameCoefficients(float(block["lambda"]), float(block["mu"]))
        except KeyError as exc:
            raise InvalidMaterial(f"material block missing field {exc}") from None
        except (TypeError, ValueError) as exc:
            if isinstance(exc, InvalidMaterial):
                raise
            raise InvalidMaterial(f"bad material block: {exc}") from None
        hadamard = None
        if family is Family.HADAMARD:
            hadamard = default_hadamard(lame, block.get("alpha"), block.get("beta"))
            if block.get("h_coeffs") is not None:
                hadamard = HadamardParams(hadamard.alpha, hadamard.beta,
                                          tuple(float(c) for c in block["h_coeffs"]))
        return cls(family, lame, hadamard)

    def to_dict(self) -> dict:
        out = {"family": self.family.value, "lambda": self.lame.lam, "mu": self.lame.mu}
        if self.hadamard is not None:
            out.update(alpha=self.hadamard.alpha, beta=self.hadamard.beta,
                       h_coeffs=list(self.hadamard.h_coeffs))
        return out

    @property
    def p0(self) -> float:
        """Pressure offset of the family; sets the natural stress scale."""
        lam, mu = self.lame.lam, self.lame.mu
        if self.family is Family.SETH:
            return 0.5 * (3.0 * lam + 2.0 * mu)
        if self.family is Family.SIGNORINI:
            return (9.0 * lam + 5.0 * mu) / 8.0
        if self.family is Family.LINEAR:
            return (3.0 * lam + 2.0 * mu) / 3.0
        # SVK and Hadamard carry no explicit offset; use the linear one as scale
        return (3.0 * lam + 2.0 * mu) / 3.0

    @property
    def is_hyperelastic(self) -> bool:
        return self.family is not Family.SETH

    # closed forms, no domain checks
    def p_rad(self, delta, eta):
        return _P_RAD[self.family](self, delta, eta)

    def p_tan(self, delta, eta):
        return _P_TAN[self.family](self, delta, eta)

    def dp_rad(self, delta, eta):
        """Return (d p_rad / d delta, d p_rad / d eta)."""
        return _DP_RAD[self.family](self, delta, eta)

    def w(self, delta, eta):
        if self.family is Family.SETH:
            raise NotHyperelastic("the Seth model has no stored energy function")
        return _W[self.family](self, delta, eta)


# ---------------------------------------------------------------- Seth

def _seth_p_rad(s, d, e):
    lam, mu = s.lame.lam, s.lame.mu
    return lam * e**TWO_THIRDS + 0.5 * (lam + 2 * mu) * e**-FOUR_THIRDS * d * d - s.p0


def _seth_p_tan(s, d, e):
    lam, mu = s.lame.lam, s.lame.mu
    return (lam + mu) * e**TWO_THIRDS + 0.5 * lam * e**-FOUR_THIRDS * d * d - s.p0


def _seth_dp(s, d, e):
    lam, mu = s.lame.lam, s.lame.mu
    L = lam + 2 * mu
    return (L * e**-FOUR_THIRDS * d,
            TWO_THIRDS * lam * e ** (-1.0 / 3.0) - TWO_THIRDS * L * e ** (-7.0 / 3.0) * d * d)


# ---------------------------------------------------------------- Saint Venant-Kirchhoff

def _svk_p_rad(s, d, e):
    lam, mu = s.lame.lam, s.lame.mu
    e23 = e**TWO_THIRDS
    e43 = e23 * e23
    return ((mu + 1.5 * lam) * e43 / d - (mu + 0.5 * lam) * e43 * e43 / d**3
            - lam * e23 / d)


def _svk_p_tan(s, d, e):
    lam, mu = s.lame.lam, s.lame.mu
    e23 = e**TWO_THIRDS
    return (mu * d / e23 * (1.0 - 1.0 / e23)
            + 0.5 * lam * d / e23 * (3.0 - 2.0 / e23 - e23 * e23 / (d * d)))


def _svk_dp(s, d, e):
    lam, mu = s.lame.lam, s.lame.mu
    e13 = e ** (1.0 / 3.0)
    e23 = e13 * e13
    e43 = e23 * e23
    dd = (-(mu + 1.5 * lam) * e43 / d**2 + 3.0 * (mu + 0.5 * lam) * e43 * e43 / d**4
          + lam * e23 / d**2)
    de = (FOUR_THIRDS * (mu + 1.5 * lam) * e13 / d
          - 8.0 / 3.0 * (mu + 0.5 * lam) * e43 * e13 / d**3
          - TWO_THIRDS * lam / (e13 * d))
    return dd, de


def _svk_w(s, d, e):
    lam, mu = s.lame.lam, s.lame.mu
    e23 = e**TWO_THIRDS
    i1 = e23 * e23 / (d * d) + 2.0 / e23 - 3.0
    i2 = 2.0 * e23 / (d * d) + 1.0 / (e23 * e23) - 3.0
    return 0.125 * (lam + 2 * mu) * i1 * i1 + mu * i1 - 0.5 * mu * i2


# ---------------------------------------------------------------- Signorini

def _sig_p_rad(s, d, e):
    lam, mu = s.lame.lam, s.lame.mu
    y2 = (d / e) ** 2
    e23 = e**TWO_THIRDS
    return ((lam + mu) / 8.0 * e23 * e23 * (3.0 * y2 * y2 + 4.0 * y2 - 4.0)
            + (3 * lam + mu) / 4.0 * e23 * (2.0 - y2) - s.p0)


def _sig_p_tan(s, d, e):
    lam, mu = s.lame.lam, s.lame.mu
    y2 = (d / e) ** 2
    e43 = e**FOUR_THIRDS
    return (lam + mu) / 8.0 * e43 * (4.0 - y2 * y2) + (3 * lam + mu) / 4.0 * d * d / e43 - s.p0


def _sig_dp(s, d, e):
    lam, mu = s.lame.lam, s.lame.mu
    A, B = (lam + mu) / 8.0, (3 * lam + mu) / 4.0
    dd = A * (12.0 * d**3 * e ** (-8.0 / 3.0) + 8.0 * d * e ** (-TWO_THIRDS)) - 2.0 * B * d * e**-FOUR_THIRDS
    de = (A * (-8.0 * d**4 * e ** (-11.0 / 3.0) - 8.0 / 3.0 * d * d * e ** (-5.0 / 3.0)
               - 16.0 / 3.0 * e ** (1.0 / 3.0))
          + B * FOUR_THIRDS * (e ** (-1.0 / 3.0) + d * d * e ** (-7.0 / 3.0)))
    return dd, de


def _sig_w(s, d, e):
    lam, mu = s.lame.lam, s.lame.mu
    c = d * d / e**FOUR_THIRDS + 2.0 * e**TWO_THIRDS
    return (0.125 * (c - 3.0) ** 2 * (lam + mu) + 0.5 * mu * (c - 1.0)) / d - mu


# ---------------------------------------------------------------- Hadamard

def _had_p_rad(s, d, e):
    hp = s.hadamard
    e23 = e**TWO_THIRDS
    return -(hp.alpha * e23 * e23 + 2.0 * hp.beta * e23 + hp.h(d**-2.0, 1)) / d


def _had_p_tan(s, d, e):
    hp = s.hadamard
    e23 = e**TWO_THIRDS
    y2 = (d / e) ** 2
    return -(hp.alpha * e23 * e23 * y2 + hp.beta * e23 * (1.0 + y2) + hp.h(d**-2.0, 1)) / d


def _had_dp(s, d, e):
    hp = s.hadamard
    e13 = e ** (1.0 / 3.0)
    e23 = e13 * e13
    inv2 = d**-2.0
    dd = (hp.alpha * e23 * e23 + 2.0 * hp.beta * e23 + hp.h(inv2, 1)) * inv2 + 2.0 * hp.h(inv2, 2) * inv2 * inv2
    de = -FOUR_THIRDS * (hp.alpha * e13 + hp.beta / e13) / d
    return dd, de


def _had_w(s, d, e):
    hp = s.hadamard
    e23 = e**TWO_THIRDS
    i1 = e23 * e23 / (d * d) + 2.0 / e23 - 3.0
    i2 = 2.0 * e23 / (d * d) + 1.0 / (e23 * e23) - 3.0
    return 0.5 * (hp.alpha * i1 + hp.beta * i2 + hp.h(d**-2.0) - hp.h(1.0))


# ---------------------------------------------------------------- linear

def _lin_p_rad(s, d, e):
    lam, mu = s.lame.lam, s.lame.mu
    return (lam + 2 * mu) * d - FOUR_THIRDS * mu * e - s.p0


def _lin_p_tan(s, d, e):
    lam, mu = s.lame.lam, s.lame.mu
    return lam * d + TWO_THIRDS * mu * e - s.p0


def _lin_dp(s, d, e):
    lam, mu = s.lame.lam, s.lame.mu
    return (lam + 2 * mu) + 0.0 * d, -FOUR_THIRDS * mu + 0.0 * e


def _lin_w(s, d, e):
    lam, mu = s.lame.lam, s.lame.mu
    return ((lam + 2 * mu) * np.log(d) - FOUR_THIRDS * mu * np.log(e) + FOUR_THIRDS * mu * e / d
            + (3 * lam + 2 * mu) / (3.0 * d) - lam - 2 * mu)


_P_RAD = {Family.SETH: _seth_p_rad, Family.SVK: _svk_p_rad, Family.SIGNORINI: _sig_p_rad,
          Family.HADAMARD: _had_p_rad, Family.LINEAR: _lin_p_rad}
_P_TAN = {Family.SETH: _seth_p_tan, Family.SVK: _svk_p_tan, Family.SIGNORINI: _sig_p_tan,
          Family.HADAMARD: _had_p_tan, Family.LINEAR: _lin_p_tan}
_DP_RAD = {Family.SETH: _seth_dp, Family.SVK: _svk_dp, Family.SIGNORINI: _sig_dp,
           Family.HADAMARD: _had_dp, Family.LINEAR: _lin_dp}
_W = {Family.SVK: _svk_w, Family.SIGNORINI: _sig_w, Family.HADAMARD: _had_w, Family.LINEAR: _lin_w}


# ---------------------------------------------------------------- public API

def _check_args(delta, eta):
    if np.any(np.asarray(delta) <= 0) or np.any(np.asarray(eta) <= 0):
        raise DomainError("delta and eta must be positive")


def p_rad_hat(spec: MaterialSpec, delta, eta):
    """Radial pressure of ``spec`` at ``(delta, eta)``."""
    _check_args(delta, eta)
    return spec.p_rad(delta, eta)


def p_tan_hat(spec: MaterialSpec, delta, eta):
    """Tangential pressure of ``spec`` at ``(delta, eta)``."""
    _check_args(delta, eta)
    return spec.p_tan(delta, eta)


def stored_energy(spec: MaterialSpec, delta, eta):
    """Stored energy ``w(delta, eta)``; ``w(1, 1) = 0``."""
    if not spec.is_hyperelastic:
        raise NotHyperelastic("the Seth model has no stored energy function")
    _check_args(delta, eta)
    return spec.w(delta, eta)


@dataclass(frozen=True)
class ValidationReport:
    family: str
    natural_state: tuple
    jacobian_fd: np.ndarray
    jacobian_expected: np.ndarray
    jacobian_deviation: float
    diagonal_isotropy: float
    hyperelastic_deviation: Optional[float]

    def as_dict(self) -> dict:
        return {
            "family": self.family,
            "natural_state_p_rad": float(self.natural_state[0]),
            "natural_state_p_tan": float(self.natural_state[1]),
            "jacobian_fd": self.jacobian_fd.tolist(),
            "jacobian_expected": self.jacobian_expected.tolist(),
            "jacobian_deviation": float(self.jacobian_deviation),
            "diagonal_isotropy": float(self.diagonal_isotropy),
            "hyperelastic_deviation": (None if self.hyperelastic_deviation is None
                                       else float(self.hyperelastic_deviation)),
        }


def validate_material(spec: MaterialSpec, fd_step: float = 1e-5) -> ValidationReport:
    """Numerical report on the compatibility conditions of ``spec``.

    Deviations are relative to ``lambda + 2 mu``, the largest entry of the
    Hooke matrix.  Thresholds are left to the caller.
    """
    if not 0 < fd_step <= 1e-3:
        raise DomainError("fd_step must lie in (0, 1e-3]")
    lam, mu = spec.lame.lam, spec.lame.mu
    scale = spec.lame.longitudinal
    h = fd_step

    natural = (abs(spec.p_rad(1.0, 1.0)), abs(spec.p_tan(1.0, 1.0)))

    jac = np.empty((2, 2))
    for i, f in enumerate((spec.p_rad, spec.p_tan)):
        jac[i, 0] = (f(1.0 + h, 1.0) - f(1.0 - h, 1.0)) / (2 * h)
        jac[i, 1] = (f(1.0, 1.0 + h) - f(1.0, 1.0 - h)) / (2 * h)
    expected = np.array([[lam + 2 * mu, -FOUR_THIRDS * mu], [lam, TWO_THIRDS * mu]])
    jac_dev = float(np.max(np.abs(jac - expected)) / scale)

    grid = np.asarray(DIAGONAL_GRID)
    iso = float(np.max(np.abs(spec.p_rad(grid, grid) - spec.p_tan(grid, grid))))

    hyper = None
    if spec.is_hyperelastic:
        D, E = np.meshgrid(HYPERELASTIC_GRID, HYPERELASTIC_GRID, indexing="ij")
        dw_dd = (spec.w(D * (1 + h), E) - spec.w(D * (1 - h), E)) / (2 * h * D)
        dw_de = (spec.w(D, E * (1 + h)) - spec.w(D, E * (1 - h))) / (2 * h * E)
        pr_fd = D * D * dw_dd
        pt_fd = pr_fd + 1.5 * D * E * dw_de
        pr, pt = spec.p_rad(D, E), spec.p_tan(D, E)
        denom = np.maximum(np.maximum(np.abs(pr), np.abs(pt)), scale)
        hyper = float(max(np.max(np.abs(pr_fd - pr) / denom), np.max(np.abs(pt_fd - pt) / denom)))

    return ValidationReport(spec.family.value, natural, jac, expected, jac_dev, iso, hyper)


def seth_eta_bound(lame: LameCoefficients) -> float:
    """Largest eta at which a Seth zero-pressure state has delta >= 0."""
    return ((3 * lame.lam + 2 * lame.mu) / (2 * lame.lam)) ** 1.5


def zero_pressure_delta_seth(lame: LameCoefficients, eta: float) -> float:
    """Density ``delta >= 0`` with ``p_rad(delta, eta) = 0`` for a Seth material."""
    lam, mu = lame.lam, lame.mu
    if lam <= 0:
        raise DomainError("zero-pressure density requires lambda > 0")
    if not eta > 0:
        raise DomainError("eta must be positive")
    ratio = (3 * lam + 2 * mu) / (2 * lam)
    e23 = eta**TWO_THIRDS
    gap = ratio - e23
    if gap < 0:
        # rounding at the saturation point eta = ratio**1.5
        if gap < -16 * np.finfo(float).eps * ratio:
            raise DomainError(f"eta = {eta} exceeds the zero-pressure bound {ratio ** 1.5}")
        gap = 0.0
    return float(e23 * np.sqrt(2 * lam / (lam + 2 * mu)) * np.sqrt(gap))
