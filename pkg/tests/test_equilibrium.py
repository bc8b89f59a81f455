import math

import numpy as np
import pytest

from elastic_spheres.equilibrium import (
    Controls,
    EquilibriumState,
    Termination,
    center_init,
    from_dimensionless,
    integrate,
    rhs_general,
    rhs_seth,
    sample_rhs,
    shell_init,
    theta_length,
    to_dimensionless,
)
from elastic_spheres.errors import DomainError, EllipticityLoss
from elastic_spheres.materials import MaterialSpec

SETH = MaterialSpec.from_dict({"family": "seth", "lambda": 1.0, "mu": 1.0})


@pytest.fixture(scope="module")
def ball():
    return integrate(SETH, 1.0, center_init(SETH, 1.0, 2.0))


def test_ball_oracle_values(ball):
    # frozen from this implementation at default controls
    assert ball.termination is Termination.PRESSURE_ZERO
    assert ball.r_end == pytest.approx(0.6231902173105389, rel=1e-9)
    assert ball.m[-1] == pytest.approx(1.4392165393206686, rel=1e-9)


def test_boundary_is_pressure_zero(ball):
    d, e, _ = ball(ball.r_end)
    assert abs(float(SETH.p_rad(d, e))) < 1e-12 * SETH.p0


def test_dense_output_matches_rhs(ball):
    # the first steps near the centre are too short for the polynomial derivative
    mids = ball.segment_midpoints()
    mids = mids[mids > 1e-2]
    num = ball.derivative(mids)
    ref = sample_rhs(SETH, 1.0, ball, mids)
    scale = np.max(np.abs(ref), axis=1, keepdims=True)
    assert np.max(np.abs(num - ref) / scale) < 1e-7


def test_eta_identity(ball):
    assert np.max(ball.eta_identity_residual()) < 1e-10


def test_center_init_mass():
    st = center_init(SETH, 2.0, 3.0, 1e-4)
    assert st.m == pytest.approx(4.0 * math.pi / 3.0 * 2.0 * 3.0 * 1e-12)


def test_shell_init_zero_pressure():
    st = shell_init(SETH, 1.0, 1.0, 0.8, 0.3)
    assert st.eta == pytest.approx(0.8**-3)
    assert st.m == 0.3
    assert abs(SETH.p_rad(st.delta, st.eta)) < 1e-13


def test_general_and_seth_rhs_agree():
    st = EquilibriumState(0.4, 1.3, 1.6, 0.2)
    assert np.allclose(rhs_general(SETH, 1.3, st), rhs_seth(SETH.lame, 1.3, st), rtol=1e-13, atol=0)


def test_dimensionless_round_trip():
    st = EquilibriumState(0.3, 1.2, 1.5, 0.05)
    back = from_dimensionless(to_dimensionless(st, SETH.lame, 1.7), 0.3, 1.7)
    assert np.allclose(back.as_array(), st.as_array(), rtol=1e-14)


def test_radius_cutoff_without_detection():
    prof = integrate(SETH, 1.0, center_init(SETH, 1.0, 2.0), Controls(r_stop=2.0, detect_boundary=False))
    assert prof.termination is Termination.RADIUS_CUTOFF
    assert prof.r_end == pytest.approx(2.0)


def test_ellipticity_loss_raised():
    lin = MaterialSpec.from_dict({"family": "svk", "lambda": 1.0, "mu": 1.0})
    st = EquilibriumState(0.5, 2.4537511066398165, 0.2758531617629184, 0.1)
    with pytest.raises(EllipticityLoss):
        rhs_general(lin, 1.0, st)


@pytest.mark.parametrize("bad", [dict(rel_tol=0), dict(abs_tol=-1), dict(r_stop=0.0)])
def test_controls_validation(bad):
    with pytest.raises(DomainError):
        Controls(**bad)


def test_truncated_profile(ball):
    cut = ball.truncated(0.3)
    assert cut.r_end == pytest.approx(0.3)
    assert np.allclose(cut(0.2), ball(0.2), rtol=1e-14)


def test_theta_length():
    assert theta_length(SETH.lame, 2.0) == pytest.approx(2.0 * math.sqrt(4.0 * math.pi / 9.0))
