import numpy as np
import pytest

from trisect.forward import (BoundaryData, BoundStateSet, InvalidScatteringData, ScatteringData,
                             expansion_coefficients, expansion_residual, find_bound_states, product_identity_residuals,
                             sample_scattering_data, scattering_coefficients, unitarity_at, unitarity_residual,
                             validate_scattering_data, wronskian_identity_residuals,
                             wronskian_system_residuals)
from trisect.raygeom import zeta
from trisect.riemann import RayQuadrature
from trisect.volterra import SampledPotential

Z1, Z2, Z3 = zeta(1), zeta(2), zeta(3)
LAMS = [0.7, 1.3 - 0.4j, -0.9 + 1.1j, 2.5j]


@pytest.fixture(scope="module")
def coarse_q():
    return SampledPotential.from_function(lambda x: 0.1 * np.exp(-4 * x), 4.0, 200, a=4.0, compact=True)


@pytest.fixture(scope="module")
def sampled(coarse_q):
    quad = RayQuadrature.default(160, T=20.0)
    t = np.concatenate([-quad.t[::-1], quad.t])
    return sample_scattering_data(coarse_q, t)


@pytest.mark.parametrize("lam", LAMS)
def test_zero_potential_coefficients(zero_q, lam):
    B1, _, _ = expansion_coefficients(zero_q, lam)
    assert abs(B1 + 1j / (3 * lam)) < 1e-14 / abs(lam)
    s2, s3, c1 = scattering_coefficients(zero_q, lam)
    assert abs(s2 - Z3) < 1e-13
    assert abs(s3 - Z2) < 1e-13
    assert abs(c1 - 3j * lam) < 1e-13 * abs(lam)


@pytest.mark.parametrize("lam", LAMS)
def test_coefficient_rotation(small_q, lam):
    a = expansion_coefficients(small_q, lam * Z2)
    b = expansion_coefficients(small_q, lam)
    for p in range(3):
        assert abs(a[p] - b[(p + 1) % 3]) <= 1e-9 * max(abs(v) for v in b)


@pytest.mark.parametrize("lam", LAMS)
def test_expansion_reproduces_cauchy_solution(small_q, lam):
    assert expansion_residual(small_q, lam) < 1e-8


def test_coefficients_undefined_at_origin(small_q):
    with pytest.raises(ZeroDivisionError):
        expansion_coefficients(small_q, 0)
    with pytest.raises(ZeroDivisionError):
        scattering_coefficients(small_q, 0)


@pytest.mark.parametrize("lam", LAMS)
def test_product_identities(small_q, lam):
    triple, rotation = product_identity_residuals(small_q, lam)
    assert triple <= 1e-8 and rotation <= 1e-8


@pytest.mark.parametrize("lam", [0.7, 1.3 - 0.4j])
def test_unitarity_zero_potential(zero_q, lam):
    assert unitarity_at(zero_q, lam) < 1e-14
    assert unitarity_at(zero_q, lam * Z2) < 1e-14


def test_unitarity_closed_form():
    lam = 0.8 - 0.3j
    c1 = 3j * lam
    c1s = np.conj(3j * np.conj(lam))
    assert unitarity_residual(Z3, Z2, c1, lam, Z2, Z3, c1s) < 1e-15


@pytest.mark.parametrize("lam", [0.5, 1.0, -0.8])
def test_unitarity_small_potential(small_q, lam):
    r = unitarity_at(small_q, lam)
    assert r <= 1e-6
    assert abs(unitarity_at(small_q, lam * Z2) - r) <= 1e-6


def test_unitarity_rejects_origin():
    with pytest.raises(ZeroDivisionError):
        unitarity_residual(1, 1, 1, 0, 1, 1, 1)


@pytest.mark.parametrize("theta_arg", [0.0, 0.9])
def test_representations_agree(small_q, theta_arg):
    bd = BoundaryData.from_theta_arg(1.0, 0.3, theta_arg)
    assert bd.consistent
    for lam in LAMS:
        pc = scattering_coefficients(small_q, lam, bd, full=True)
        assert pc.representation_gap <= 1e-6


def test_representations_disagree_off_consistency(small_q):
    bd = BoundaryData(1.0, 0.0, 1.0, C=2.0)
    assert not bd.consistent
    pc = scattering_coefficients(small_q, 0.9 - 0.2j, bd, full=True)
    assert pc.representation_gap > 1e-3


def test_boundary_data_checks():
    with pytest.raises(ValueError):
        BoundaryData(theta=2.0)
    with pytest.raises(ValueError):
        BoundaryData(alpha=1j)


@pytest.mark.parametrize("lam", LAMS)
def test_wronskian_system(small_q, lam):
    assert wronskian_system_residuals(small_q, lam) <= 1e-6


@pytest.mark.parametrize("lam", LAMS)
def test_wronskian_identities(small_q, lam):
    assert max(wronskian_identity_residuals(small_q, lam).values()) <= 1e-6


def test_no_bound_states(zero_q, small_q):
    assert find_bound_states(zero_q).N == 0
    assert find_bound_states(small_q, n_scan=100).N == 0


def test_bound_state_points_are_symmetric():
    bs = BoundStateSet([0.5], [1.0], [1.0])
    pts = bs.lambda_points
    assert len(pts) == 6
    assert np.allclose(sorted(np.abs(pts)), 0.5)
    assert any(abs(p + 0.5 * Z3) < 1e-15 for p in pts)
    assert any(abs(p - 0.5 * Z2) < 1e-15 for p in pts)


def test_sampling_grid_avoids_zero(small_q):
    with pytest.raises(ValueError):
        sample_scattering_data(small_q, np.array([-1.0, 0.0, 1.0]))


def test_sampled_zero_potential(zero_q):
    t = np.array([-2.0, -1.0, -0.5, 0.5, 1.0, 2.0])
    data = sample_scattering_data(zero_q, t)
    assert np.allclose(data.s2, Z3, atol=1e-13)
    for k in range(3):
        assert np.allclose(data.c1[k], 3j * data.lam(k), atol=1e-12)
    assert data.kappas == []


def test_json_round_trip(sampled, tmp_path):
    path = tmp_path / "data.json"
    sampled.dump(path)
    back = ScatteringData.load(path)
    assert np.array_equal(back.t, sampled.t)
    assert np.array_equal(back.s2, sampled.s2)
    assert np.array_equal(back.c1, sampled.c1)
    assert back.theta == sampled.theta and back.kappas == sampled.kappas


def test_lookup_on_lines(sampled):
    lam = sampled.lam(2)[7]
    assert sampled.s2_at(lam) == sampled.s2[2, 7]
    with pytest.raises(KeyError):
        sampled.s2_at(1.0 + 0.3j)


def test_valid_data_accepted(sampled):
    rep = validate_scattering_data(sampled)
    assert rep["unitarity"] <= 1e-6 and rep["N"] == 0


def with_bound_state(data, b, b_tilde):
    return ScatteringData(data.t, data.s2, data.c1, [0.5], [b], [b_tilde], data.alpha, data.beta,
                          data.theta, data.a, data.radius)


def test_zero_norming_constant_rejected(sampled):
    with pytest.raises(InvalidScatteringData) as exc:
        validate_scattering_data(with_bound_state(sampled, 0.0, 1.0))
    assert exc.value.condition == "ii"
    with pytest.raises(InvalidScatteringData, match=r"condition \(ii\)"):
        validate_scattering_data(with_bound_state(sampled, 1.0, 0.0))


def test_unitarity_violation_rejected(sampled):
    c1 = sampled.c1.copy()
    j = int(np.argmin(np.abs(sampled.t - 1.0)))
    c1[0, j] *= 1.01
    bad = ScatteringData(sampled.t, sampled.s2, c1)
    with pytest.raises(InvalidScatteringData) as exc:
        validate_scattering_data(bad)
    assert exc.value.condition == "v"


def test_nonfinite_samples_rejected(sampled):
    s2 = sampled.s2.copy()
    s2[2, 3] = np.nan
    with pytest.raises(InvalidScatteringData) as exc:
        validate_scattering_data(ScatteringData(sampled.t, s2, sampled.c1))
    assert exc.value.condition == "iii"


def test_descending_kappas_rejected(sampled):
    bad = ScatteringData(sampled.t, sampled.s2, sampled.c1, [0.9, 0.4], [1, 1], [1, 1])
    with pytest.raises(InvalidScatteringData) as exc:
        validate_scattering_data(bad)
    assert exc.value.condition == "i"
