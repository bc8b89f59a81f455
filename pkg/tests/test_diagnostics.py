import numpy as np
import pytest

from elastic_spheres.bodies import build_ball, build_inner_shell
from elastic_spheres.diagnostics import (
    BumpFunction,
    chemical_potential,
    default_bumps,
    energy_functional,
    fd_first_variation,
    first_variation,
    mass_neutral,
    reconstruct_reference_radius,
    variation_scale,
)
from elastic_spheres.errors import DomainError, NotHyperelastic
from elastic_spheres.materials import MaterialSpec

LINEAR = MaterialSpec.from_dict({"family": "linear", "lambda": 1.0, "mu": 1.0})
SETH = MaterialSpec.from_dict({"family": "seth", "lambda": 1.0, "mu": 1.0})


@pytest.fixture(scope="module")
def lin_ball():
    return build_ball(LINEAR, 1.0, 2.0)


def test_linear_ball_oracle(lin_ball):
    # frozen from this implementation
    assert lin_ball.r_end == pytest.approx(0.6485652692, rel=1e-9)
    E = energy_functional(LINEAR, 1.0, lin_ball.profile)
    assert E.E == pytest.approx(-0.196738837756, rel=1e-8)
    assert E.error_estimate < 1e-10


def test_bump_shape():
    b = BumpFunction(0.5, 0.1, 2.0)
    assert b(0.5) == 2.0
    assert b(0.61) == 0.0 and b(0.39) == 0.0
    with pytest.raises(DomainError):
        BumpFunction(0.5, 0.0)


def test_mass_neutral_has_zero_moment():
    phi = mass_neutral(BumpFunction(0.3, 0.1), BumpFunction(0.6, 0.2))
    r = np.linspace(0.0, 1.0, 20001)
    assert abs(np.trapezoid(phi(r) * r * r, r)) < 1e-8


def test_stationarity_against_mass_neutral_bumps(lin_ball):
    b = default_bumps(lin_ball.profile)
    for i, j in ((0, 1), (1, 2), (0, 2)):
        phi = mass_neutral(b[i], b[j])
        scaled = abs(first_variation(LINEAR, 1.0, lin_ball.profile, phi)) / variation_scale(
            LINEAR, 1.0, lin_ball.profile, phi)
        assert scaled < 1e-8


def test_chemical_potential_constant_inside(lin_ball):
    _, G = chemical_potential(LINEAR, 1.0, lin_ball.profile)
    assert np.ptp(G[1:-1]) < 1e-7 * np.max(np.abs(G))


def test_direct_and_fd_variations_agree(lin_ball):
    for bump in default_bumps(lin_ball.profile):
        d = first_variation(LINEAR, 1.0, lin_ball.profile, bump)
        f = fd_first_variation(LINEAR, 1.0, lin_ball.profile, bump)
        assert d == pytest.approx(f, rel=1e-6)


def test_reference_radius_ball_and_shell(lin_ball):
    assert reconstruct_reference_radius(lin_ball.profile, 1.0).max_residual < 1e-8
    shell = build_inner_shell(SETH, 1.0, 1.0, 0.7)
    ref = reconstruct_reference_radius(shell.profile, 1.0)
    assert ref.R[0] == pytest.approx(1.0, rel=1e-12)
    assert np.all(np.diff(ref.R) > 0)
    assert ref.rows().shape == (len(shell.profile), 2)


def test_seth_energy_unavailable():
    ball = build_ball(SETH, 1.0, 2.0)
    with pytest.raises(NotHyperelastic):
        energy_functional(SETH, 1.0, ball.profile)


def test_bad_node_count(lin_ball):
    with pytest.raises(DomainError):
        energy_functional(LINEAR, 1.0, lin_ball.profile, n=7)
