import math

import numpy as np
import pytest

from elastic_spheres.bodies import build_ball
from elastic_spheres.equilibrium import Controls, center_init, integrate, rhs_autonomous
from elastic_spheres.errors import DomainError, ProfileTooShort
from elastic_spheres.materials import LameCoefficients, MaterialSpec
from elastic_spheres.seth import (
    analyse,
    asymptotics_check,
    boundary_pressure_derivative,
    classify,
    disk_boundary_samples,
    disk_dissipation,
    divergence_grid,
    fixed_points,
    integrate_orbit,
    material_constants_ab,
    self_similar,
)

LAME = LameCoefficients(1.0, 1.0)
SETH = MaterialSpec.from_dict({"family": "seth", "lambda": 1.0, "mu": 1.0})


def test_constants_unit_lame():
    a, b = material_constants_ab(LAME)
    assert (a, b) == pytest.approx((4.0 / 3.0, 2.0 / 3.0))
    an = analyse(LAME, 1.0)
    # frozen from this implementation
    assert an.R_star == pytest.approx(0.6443952154622955, rel=1e-14)
    assert an.u_P == pytest.approx(0.5 * math.sqrt(1.0 + 16.0 / 3.0 + 4.0 / 3.0), rel=1e-15)


def test_self_similar_relations():
    r = np.array([0.1, 1.0, 7.0])
    d, e, m, pr, pt = self_similar(LAME, 2.0, r)
    assert np.allclose(e, 2.0 * d)
    assert np.allclose(m, 4.0 * math.pi / 3.0 * 2.0 * r**3 * e)
    assert np.allclose(pr, SETH.p_rad(d, e), rtol=1e-13)
    assert np.allclose(pt, SETH.p_tan(d, e), rtol=1e-13)


def test_self_similar_rejects_origin():
    with pytest.raises(DomainError):
        self_similar(LAME, 1.0, [0.0, 1.0])


def test_fixed_points_unit_lame():
    fps = fixed_points(4.0 / 3.0, 2.0 / 3.0)
    assert fps["P"].classification == "sink"
    assert fps["Q"].classification == "saddle"
    assert fps["P"].eigenvalues == pytest.approx((-0.9226497308103742, -2.0773502691896257), rel=1e-12)
    assert fps["Q"].eigenvalues == pytest.approx((1.0, -3.0))
    for fp in fps.values():
        assert max(abs(v) for v in rhs_autonomous(4.0 / 3.0, 2.0 / 3.0, fp.u, fp.y, 1.0)) < 1e-15


@pytest.mark.parametrize("eigs,label", [((-1, -2), "sink"), ((1, 2), "source"), ((1, -1), "saddle"),
                                        ((0, -1), "non-hyperbolic"), ((complex(-1, 1), complex(-1, -1)), "sink")])
def test_classify(eigs, label):
    assert classify(eigs) == label


def test_fixed_points_domain():
    with pytest.raises(DomainError):
        fixed_points(0.5, 0.5)


def test_divergence_negative_both_regimes():
    for lame in (LAME, LameCoefficients(5.0, 1.0)):
        a, b = material_constants_ab(lame)
        _, _, div = divergence_grid(a, b)
        assert div.shape == (100, 100)
        assert div.max() < 0


def test_disk_dissipation_sign_pattern():
    # negative on most of the circle, positive on a short arc just above y = 1/2
    a, b = material_constants_ab(LAME)
    u, y = disk_boundary_samples(a, b)
    g = disk_dissipation(a, b, u, y)
    assert np.mean(g < 0) > 0.8
    assert np.all(y[g > 0] > 0.5)


def test_orbit_converges_to_sink():
    a, b = material_constants_ab(LAME)
    u_P = fixed_points(a, b)["P"].u
    orb = integrate_orbit(a, b, (0.5 * u_P, 0.9, 1.0), 40.0)
    assert orb.shape == (201, 4)
    assert orb[-1, 1] == pytest.approx(u_P, abs=1e-6)
    assert orb[-1, 2] == pytest.approx(0.5, abs=1e-6)


def test_asymptotics_and_short_profile():
    an = analyse(LAME, 1.0)
    ball = build_ball(SETH, 1.0, 2.0)
    with pytest.raises(ProfileTooShort):
        asymptotics_check(ball.profile, an, 10.0)
    far = 1e3 / an.theta_len
    prof = integrate(SETH, 1.0, center_init(SETH, 1.0, 2.0), Controls(r_stop=far, detect_boundary=False))
    res = asymptotics_check(prof, an, far)
    assert res.dy < 1e-3 and res.dz < 1e-6 and res.dp < 1e-2


def test_boundary_pressure_derivative_positive_at_r_min():
    eta_cap = 2.5**1.5
    assert boundary_pressure_derivative(LAME, 1.0, eta_cap, 0.0, math.sqrt(0.4)) > 0
