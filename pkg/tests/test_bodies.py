import math

import numpy as np
import pytest

from elastic_spheres.bodies import (
    Core,
    MatterDistribution,
    ShellRequest,
    add_shell,
    assemble,
    build_ball,
    build_inner_shell,
    next_shell_S,
    r_max_scan,
    r_min,
    verify_distribution,
)
from elastic_spheres.equilibrium import Controls
from elastic_spheres.errors import (
    DomainError,
    InadmissibleInnerRadius,
    NoBoundaryFound,
    NoEquilibrium,
)
from elastic_spheres.materials import MaterialSpec

SETH = MaterialSpec.from_dict({"family": "seth", "lambda": 1.0, "mu": 1.0})

# frozen from this implementation at default controls
SHELL_ORACLE = {
    math.sqrt(0.4): (0.98846380882749, 4.31109644328018),
    0.7: (0.98803092255078, 3.5454093017137485),
    0.9: (0.99806439640264, 1.2547002474659048),
}


@pytest.fixture(scope="module")
def three():
    req = ShellRequest(SETH, 1.0)
    return assemble(build_ball(SETH, 1.0, 2.0), [req, req])


def test_ball_oracle():
    b = build_ball(SETH, 1.0, 2.0)
    assert b.is_ball and b.r_start == 0.0
    assert b.r_end == pytest.approx(0.6231902173105389, rel=1e-9)
    assert b.total_mass == pytest.approx(1.4392165393206686, rel=1e-9)


@pytest.mark.parametrize("rho_c", [0.5, 1.0])
def test_ball_requires_positive_central_pressure(rho_c):
    with pytest.raises(NoEquilibrium, match="rho_c > K"):
        build_ball(SETH, 1.0, rho_c)


def test_ball_without_boundary():
    with pytest.raises(NoBoundaryFound) as info:
        build_ball(SETH, 1.0, 2.0, Controls(r_stop=0.3))
    assert info.value.profile.r_end == pytest.approx(0.3)


@pytest.mark.parametrize("r0", sorted(SHELL_ORACLE))
def test_shell_oracle(r0):
    r1, M = SHELL_ORACLE[r0]
    s = build_inner_shell(SETH, 1.0, 1.0, r0)
    assert s.r_end == pytest.approx(r1, rel=1e-9)
    assert s.total_mass == pytest.approx(M, rel=1e-9)


@pytest.mark.parametrize("r0", [0.5, 1.0, 1.2])
def test_shell_inadmissible(r0):
    with pytest.raises(InadmissibleInnerRadius):
        build_inner_shell(SETH, 1.0, 1.0, r0)


def test_r_min_value():
    assert r_min(SETH.lame, 1.0) == pytest.approx(math.sqrt(0.4), rel=1e-15)
    assert next_shell_S(SETH.lame, 1.0, 1.0 + 1e-9) == pytest.approx(math.sqrt(2.5), rel=1e-8)
    with pytest.raises(DomainError):
        next_shell_S(SETH.lame, 1.0, 1.0)


def test_three_body_oracle(three):
    assert three.core is Core.NON_VACUUM
    assert np.allclose(three.interface_radii,
                       [0.0, 0.62319022, 0.65434973, 0.86390695, 0.90710229, 1.0479197], atol=1e-8)
    assert np.allclose([b.total_mass for b in three.bodies], [1.43921654, 1.86701493, 1.69913941], atol=1e-8)


def test_three_body_verifies(three):
    rep = verify_distribution(three)
    assert rep.ok, rep.as_dict()
    assert rep.residuals["mass_additivity"] < 1e-12


def test_fields_outside_matter(three):
    f = three.fields([0.64, 2.0])
    assert f["rho"][0] == 0.0 and f["rho"][1] == 0.0
    assert f["m"][0] == pytest.approx(three.bodies[0].total_mass)
    assert f["m"][1] == pytest.approx(three.total_mass)


def test_vacuum_core_shell_verifies():
    dist = MatterDistribution((build_inner_shell(SETH, 1.0, 1.0, 0.8),))
    rep = verify_distribution(dist)
    assert dist.core is Core.VACUUM
    assert rep.ok and "v_center" in rep.skipped


def test_shell_must_clear_enclosed_body():
    dist = MatterDistribution((build_ball(SETH, 1.0, 2.0),))
    with pytest.raises(InadmissibleInnerRadius):
        add_shell(dist, SETH, 1.0, 0.9, 0.8)


def test_shell_requires_seth():
    with pytest.raises(DomainError):
        build_inner_shell(MaterialSpec.from_dict({"family": "svk", "lambda": 1, "mu": 1}), 1.0, 1.0, 0.8)


def test_r_max_scan_oracle():
    assert r_max_scan(SETH.lame, 1.0, 1.0, 0.0) == pytest.approx(1.0)
    assert r_max_scan(SETH.lame, 1.0, 1.0, 0.5) == pytest.approx(0.9204043347176729, rel=1e-9)
