import numpy as np
import pytest

from trisect.cli import contour_sigma
from trisect.forward import DIRECTIONS, ScatteringData
from trisect.raygeom import zeta
from trisect.riemann import (BranchJump, ExtrapolationUnstable, OnContour, RayQuadrature, ZeroOnContour,
                             assemble_system, canonical_chi, chi_jump_residual, coupling_matrices,
                             d_on_contour, holomorphy_defect, jump_data, jump_residuals, probe_values,
                             reconstruct_psi1, recover_potential, richardson, rotation_residuals,
                             smoothed_derivative, solve_system)

Z2, Z3 = zeta(2), zeta(3)


@pytest.fixture(scope="module")
def quad():
    return RayQuadrature.default(160, T=200.0)


@pytest.fixture(scope="module")
def small_sigma(small_q, quad):
    return contour_sigma(small_q, quad)


def zero_data(quad, kappas=(), b=(), b_tilde=()):
    """Scattering data of the zero potential on the quadrature nodes, built in closed form."""
    t = np.concatenate([-quad.t[::-1], quad.t])
    s2 = np.full((3, len(t)), Z3, dtype=complex)
    c1 = np.array([3j * t * d for d in DIRECTIONS])
    return ScatteringData(t, s2, c1, list(kappas), list(b), list(b_tilde), a=12.0)


# quadrature and Cauchy matrices

def test_integrates_smooth_functions(quad):
    assert abs(quad.integrate(np.exp(-quad.t)) - (1 - np.exp(-quad.T))) < 1e-13


@pytest.mark.parametrize("z", [1 + 1j, 3 - 0.01j, -2.0, 500 + 2j])
def test_cauchy_of_constant(quad, z):
    got = quad.cauchy(z) @ np.ones(quad.n)
    want = np.log((quad.T - z) / (-z)) / (2j * np.pi)
    assert abs(got[0] - want) < 1e-12


def test_principal_value(quad):
    t0 = quad.t[[20, 75, 130]]
    got = quad.cauchy(t0, pv=True) @ np.ones(quad.n)
    want = np.log((quad.T - t0) / t0) / (2j * np.pi)
    assert np.max(np.abs(got - want)) < 1e-12


def test_on_axis_needs_principal_value(quad):
    with pytest.raises(OnContour):
        quad.cauchy(quad.t[40])


def test_plemelj(quad):
    f = np.exp(-quad.t) * np.cos(quad.t)
    t = quad.t[30:120:9]
    eps = 1e-9 * t
    up = quad.cauchy(t + 1j * eps) @ f
    down = quad.cauchy(t - 1j * eps) @ f
    pv = quad.cauchy(t, pv=True) @ f
    ft = np.exp(-t) * np.cos(t)
    assert np.max(np.abs(up - down - ft)) < 1e-6
    assert np.max(np.abs(up + down - 2 * pv)) < 1e-6


def test_nodes_round_trip(quad):
    back = RayQuadrature.from_nodes(quad.t)
    assert np.allclose(back.edges, quad.edges, rtol=1e-12)
    with pytest.raises(ValueError):
        RayQuadrature.from_nodes(np.linspace(0.1, 5, 32))


# canonical function

def test_chi_trivial_for_free_data(quad):
    chi = canonical_chi(np.full(quad.n, Z2), 0.7, quad)
    assert np.max(np.abs(chi(np.array([1j, 3 + 2j, -4 + 0.5j])) - 1)) < 1e-14


def test_chi_far_field(small_sigma, quad):
    chi = canonical_chi(small_sigma, 0.2, quad)
    lam0 = np.exp(0.3j)
    dev = [abs(chi(R * lam0) - 1) for R in (10.0, 100.0)]
    assert dev[1] < dev[0] / 5


def test_chi_jump_matches_d(small_sigma, quad):
    for x in (0.0, 0.5, 1.5):
        chi = canonical_chi(small_sigma, x, quad)
        assert chi_jump_residual(chi, small_sigma, quad.t[::7]) < 1e-5


def test_chi_sign_of_integral_form(small_sigma, quad):
    # the Cauchy form over the ray -i t equals +(1/2 pi) int ln dhat / (i t + lam) dt;
    # the same integral with a minus sign in front has the reciprocal jump
    chi = canonical_chi(small_sigma, 0.5, quad)
    lam = 0.8 + 0.6j
    direct = quad.integrate(chi.log_d / (1j * quad.t + lam)) / (2 * np.pi)
    tail = chi._tail(1j * lam)[0]
    assert abs(chi.log_chi(lam)[0] - (direct + tail)) < 1e-10
    assert abs(chi.log_chi(lam)[0] + (direct + tail)) > 1e-3


def test_chi_rejects_zero_and_winding(quad):
    sig = np.full(quad.n, Z2)
    sig[10] = 0
    with pytest.raises(ZeroOnContour):
        canonical_chi(sig, 0.0, quad)
    wind = Z2 * np.exp(2j * np.pi * np.clip(1 - quad.t / 5, 0, 1))
    with pytest.raises(BranchJump):
        canonical_chi(wind, 0.0, quad)


# jump coefficients

def test_q_product_identity(small_sigma, quad):
    for x in (0.0, 1.0, 3.0):
        assert jump_data(small_sigma, x, quad).product_residual < 1e-10


def test_jump_data_at_origin(small_sigma, quad):
    jd = jump_data(small_sigma, 0.0, quad)
    assert np.max(np.abs(jd.c2 - small_sigma / jd.chi_z2)) < 1e-14


def test_zero_potential_jump_data(quad):
    x = 1.3
    jd = jump_data(np.full(quad.n, Z2), x, quad)
    assert np.max(np.abs(jd.c2 - Z2 * np.exp(-1j * np.sqrt(3) * quad.t * x))) < 1e-13
    assert np.max(np.abs(jd.c3 - Z3 * np.exp(1j * np.sqrt(3) * quad.t * x))) < 1e-13


def test_coupling_matrices():
    for Q2 in (1.0, 0.3 + 2j, np.exp(1.1j)):
        m = coupling_matrices(Q2, 1 / Q2)
        assert abs(m["det_plus"] - (1.5 ** 2 + 1)) < 1e-14
        assert abs(m["det_minus"] - (0.5 ** 2 + 1)) < 1e-14
        assert np.max(np.abs(m["B"] - m["B_quoted"])) < 1e-14


def test_d_on_contour_free_value():
    t = np.array([0.5, 2.0])
    assert np.allclose(d_on_contour(Z2, t, 0.4), -Z3 * np.exp(-1j * np.sqrt(3) * t * 0.4))


# the singular system

def test_half_terms_in_blocks(quad):
    sys = assemble_system(zero_data(quad), 0.5, quad)
    M = quad.n
    top = sys.matrix[:M, M:2 * M] + Z2 * sys.blocks.pv
    bot = sys.matrix[M:2 * M, :M] - Z3 * sys.blocks.pv
    assert np.allclose(np.diag(top), -Z2 / 2) and np.allclose(np.diag(bot), Z3 / 2)
    assert sys.matrix.shape == (2 * M, 2 * M) and sys.N == 0


def test_elimination_matches_monolithic(quad):
    data = zero_data(quad, [0.5], [1 + 0.5j], [0.3 - 0.2j])
    for x in (0.5, 2.0):
        sys = assemble_system(data, x, quad)
        assert sys.matrix.shape == (2 * quad.n + 2, 2 * quad.n + 2)
        a = solve_system(sys)
        b = solve_system(sys, "elimination")
        assert np.max(np.abs(a.vector - b.vector)) < 1e-8


def test_reconstruction_off_contour_only(quad):
    sol = solve_system(assemble_system(zero_data(quad), 0.5, quad))
    with pytest.raises(OnContour):
        reconstruct_psi1(sol, [2.0])


def test_zero_data_give_unit_psi1(quad):
    # red: the collocated system as formulated does not reproduce the free solution
    sol = solve_system(assemble_system(zero_data(quad), 0.5, quad))
    psi1 = reconstruct_psi1(sol, [2j, 10j, 1 + 3j])
    assert np.max(np.abs(psi1 - 1)) < 1e-6


def test_zero_data_give_zero_potential(quad):
    # red for the same reason as the test above
    rec = recover_potential(zero_data(quad), np.linspace(0, 1, 11))
    assert np.max(np.abs(rec.q)) < 1e-8


# extrapolation and differentiation

def test_richardson_exact_for_polynomial_in_inverse_square():
    R = np.array([6.0, 9.0, 13.0, 20.0])
    v = 0.3 - 0.1j + 2 / R ** 2 - 5 / R ** 4
    P, err = richardson(R, v)
    assert abs(P - (0.3 - 0.1j)) < 1e-10 and err < 1e-8


def test_richardson_flags_disagreement():
    R = np.array([6.0, 9.0, 13.0, 20.0])
    with pytest.raises(ExtrapolationUnstable):
        richardson(R, np.array([1.0, -3.0, 7.0, 0.2]))


def test_smoothed_derivative():
    x = np.linspace(0, 2, 41)
    y = 3 * x ** 2 - x + 1j * x
    assert np.max(np.abs(smoothed_derivative(y, x) - (6 * x - 1 + 1j))) < 1e-10


# direct-problem identities

def test_jump_identities_zero_potential(zero_q):
    assert max(jump_residuals(zero_q, t=[0.5, 2.0]).values()) < 1e-10


def test_jump_identities_small_potential(small_q):
    assert max(jump_residuals(small_q).values()) < 1e-6


def test_rotation_identities(small_q):
    res = rotation_residuals(small_q, [0.6 + 0.4j, 1.3 - 0.7j])
    assert max(res.values()) < 1e-8


def test_reflected_piece_is_not_holomorphic(small_q):
    # g_21 is holomorphic, its reflection through the imaginary axis is not
    assert holomorphy_defect(small_q, 0.7 - 0.9j, reflected=False) < 1e-6
    assert holomorphy_defect(small_q, 0.7 - 0.9j, reflected=True) > 1e-2


def test_f12_tends_to_one(small_q):
    # pointwise for x > 0; at x = 0 the piece stays at 1 - zeta_2 for every lam
    from trisect.riemann import JumpFunctions
    jf = JumpFunctions(small_q)
    direction = np.exp(1j * np.radians(60))
    dev = [abs(jf.piece("f12", R * direction)[100] - 1) for R in (5.0, 20.0, 80.0)]
    assert dev[2] < dev[1] < dev[0] and dev[2] < 1e-6
    assert abs(jf.piece("f12", 80 * direction)[0] - (1 - Z2)) < 1e-4
