import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from trisect.raygeom import in_sector, omega_minus, zeta
from trisect.trig3 import growth_bound
from trisect.volterra import (DomainViolation, PotentialFormatError, RegionViolation, SampledPotential,
                              cauchy_estimate_bound, cauchy_solve, fourier_on_ray, fundamental_determinant,
                              iterated_kernels, jost_ode_oracle, jost_solve, kernel_K1, kernel_bound, psi,
                              parseval_ratio, read_potential_csv, resolvent_bound, sdiv, wronskian)

Z2, Z3 = zeta(2), zeta(3)
SQRT3 = np.sqrt(3)


def test_K1_at_zero_lambda():
    x, t = 0.3, 1.7
    assert abs(kernel_K1(0, x, t) - (t - x) ** 2 / 2) < 1e-15


@given(st.complex_numbers(max_magnitude=5), st.floats(0, 3))
def test_K1_vanishes_on_diagonal(lam, x):
    assert kernel_K1(lam, x, x) == 0


def test_K1_bound():
    rng = np.random.default_rng(0)
    for _ in range(100):
        lam = complex(*rng.uniform(-4, 4, 2))
        x = rng.uniform(0, 3)
        t = x + rng.uniform(0, 3)
        assert abs(kernel_K1(lam, x, t)) <= growth_bound(lam * (t - x)) / abs(lam) ** 2 * (1 + 1e-12)


@pytest.mark.parametrize("lam", [0, 0.7 + 0.4j, -1.5j, 2.5])
def test_iterated_kernel_bounds(small_q, lam):
    sig = small_q.sigma()
    for x, t in [(0.0, 0.5), (0.1, 2.0), (0.5, 3.9)]:
        vals, _ = iterated_kernels(small_q, lam, x, t, nmax=4, m=150)
        for n, v in enumerate(vals, start=1):
            assert abs(v) <= kernel_bound(lam, x, t, n, sig(t)) * (1 + 1e-12)


def test_resolvent_bound(small_q):
    sig = small_q.sigma()
    lam, x, t = 0.9 - 0.6j, 0.2, 1.5
    vals, _ = iterated_kernels(small_q, lam, x, t, nmax=10, m=150)
    N = sum((-1j) ** (n - 1) * v for n, v in enumerate(vals, start=1))
    assert abs(N) <= resolvent_bound(lam, x, t, sig(t))


@pytest.mark.parametrize("p", [1, 2, 3])
@pytest.mark.parametrize("lam", [0.8, 1.2 - 0.7j, 3j])
def test_jost_zero_potential(zero_q, lam, p):
    s = jost_solve(zero_q, lam, p)
    assert np.max(np.abs(s.e - np.exp(1j * lam * zeta(p) * s.x))) <= 1e-12
    assert s.iterations <= 1
    assert np.all(psi(zero_q, lam, p) == 1)


@pytest.mark.parametrize("lam", [0.6 + 0.2j, -1.1 + 0.9j, 2.0])
def test_jost_rotation_covariance(small_q, lam):
    for p in (1, 2, 3):
        a = jost_solve(small_q, lam * Z2, p).e
        b = jost_solve(small_q, lam, p % 3 + 1).e
        assert np.max(np.abs(a - b)) <= 1e-8 * max(1, np.max(np.abs(b)))


def test_jost_at_zero_lambda_against_ode():
    # the exact exponential in the oracle, a sampled one in the solver at twice the resolution
    f = lambda x: np.exp(-4 * x)
    q = SampledPotential.from_function(f, 4.0, 800, a=4.0, compact=True)
    s = jost_solve(q, 0, 1)
    xs = q.grid[::40]
    _, e, de, _ = jost_ode_oracle(q, 0, 1, xs=xs, qfun=lambda t: f(t) * (t <= 4.0))
    assert np.max(np.abs(s.e[::40] - e)) < 1e-5
    assert np.max(np.abs(s.de[::40] - de)) < 1e-5


def test_jost_against_ode(small_q):
    lam = 0.8 + 0.3j
    s = jost_solve(small_q, lam, 2)
    xs = small_q.grid[::50]
    _, e, _, _ = jost_ode_oracle(small_q, lam, 2, xs=xs)
    assert np.max(np.abs(s.e[::50] - e)) < 1e-5


def test_jost_domain_check():
    q = SampledPotential.from_function(lambda x: np.exp(-x), 4.0, 200, a=3.0, compact=False)
    with pytest.raises(DomainViolation):
        jost_solve(q, 1.5, 1)
    jost_solve(q, 0.5, 1)
    with pytest.raises(ValueError):
        jost_solve(q, 0.5, 4)


def test_jost_boundary_condition(small_q):
    lam = 1.3 - 0.4j
    for p in (1, 2, 3):
        s = jost_solve(small_q, lam, p)
        assert abs(s.psi[-1] - 1) < 1e-12


def test_derivative_asymptotics(small_q):
    P = small_q.integral_from()
    R = np.array([10.0, 20.0, 40.0])
    dev = [np.max(np.abs(jost_solve(small_q, 1j * r, 1).dpsi - (1j * 1j * r - P / (3 * 1j * r))))
           for r in R]
    slope = np.polyfit(np.log(R), np.log(dev), 1)[0]
    assert slope <= -2.5


@pytest.mark.parametrize("lam", [0.9 - 0.4j, 2.5j, 1e-9])
def test_cauchy_zero_potential(zero_q, lam):
    c = cauchy_solve(zero_q, lam, 1.0, 0.0)
    assert np.max(np.abs(c.w - sdiv(1, lam, c.x))) < 1e-12


def test_cauchy_zero_lambda_limits(zero_q):
    c = cauchy_solve(zero_q, 0, 1.0, 2.0)
    assert np.max(np.abs(c.w - (c.x + c.x ** 2))) < 1e-12


@pytest.mark.parametrize("lam", [0.7 + 0.5j, -1.2 + 2j, 3.0])
def test_cauchy_rotation_invariance(small_q, lam):
    a = cauchy_solve(small_q, lam, 1.0, 0.3).w
    b = cauchy_solve(small_q, lam * Z2, 1.0, 0.3).w
    assert np.max(np.abs(a - b)) <= 1e-8 * max(1, np.max(np.abs(a)))


@pytest.mark.parametrize("lam", [-1.5 - 2j, 0.5 - 3j, 6 * np.exp(-2j)])
def test_cauchy_estimate(small_q, lam):
    assert in_sector(lam, omega_minus(2))
    alpha, beta = 1.0, 0.5
    c = cauchy_solve(small_q, lam, alpha, beta)
    free = alpha * sdiv(1, lam, c.x) + beta * sdiv(2, lam, c.x)
    lhs = np.abs((c.w - free) * np.exp(-1j * lam * c.x))
    rhs = cauchy_estimate_bound(small_q, lam, alpha, beta)
    assert np.all(lhs <= rhs * (1 + 1e-12) + 1e-300)


def test_wronskian_zero_potential(zero_q):
    lam = 1.1 - 0.3j
    e = [jost_solve(zero_q, lam, p) for p in (1, 2, 3)]
    W12 = wronskian(e[0], e[1])
    want = SQRT3 * lam * Z3 * np.exp(-1j * lam * Z3 * e[0].x)
    assert np.max(np.abs(W12 - want)) < 1e-12 * np.max(np.abs(want))
    assert np.max(np.abs(wronskian(e[1], e[1]))) < 1e-15 * np.max(np.abs(e[1].de))


def test_wronskian_grid_mismatch():
    with pytest.raises(ValueError):
        wronskian((np.ones(3), np.ones(3)), (np.ones(4), np.ones(4)))


def test_determinant_zero_potential(zero_q):
    r = fundamental_determinant(zero_q, 1.0)
    assert np.max(np.abs(r.values + 3 * SQRT3)) < 1e-12


def test_determinant_constant(small_q):
    rng = np.random.default_rng(5)
    for _ in range(5):
        lam = complex(*rng.uniform(-2, 2, 2))
        r = fundamental_determinant(small_q, lam)
        assert r.max_deviation <= 1e-6
        # linear independence margin
        assert np.min(np.abs(r.values)) >= 0.5 * 3 * SQRT3 * abs(lam) ** 3


def test_determinant_cubic_at_origin(small_q):
    ratios = [abs(fundamental_determinant(small_q, lam).values[0]) / lam ** 3 for lam in (1e-1, 1e-2, 1e-3)]
    assert np.allclose(ratios, 3 * SQRT3, rtol=1e-8)


def test_fourier_examples():
    f = lambda x: np.exp(-x)
    assert abs(fourier_on_ray(f, 1, 0, a=1.0) - 1) < 1e-9
    for lam in (0.5, -2.0, 7.0):
        assert abs(fourier_on_ray(f, 1, lam, a=1.0) - 1 / (1 + 1j * lam)) < 1e-8


def test_fourier_region():
    with pytest.raises(RegionViolation):
        fourier_on_ray(lambda x: np.exp(-x), 1, 2j, a=1.0)


def test_parseval():
    x = np.linspace(0, 40, 4001)
    assert abs(parseval_ratio(lambda t: np.exp(-t), x) - 1) < 5e-3


def test_read_csv(tmp_path):
    p = tmp_path / "q.csv"
    p.write_text("x,q\n0,1\n1,0.5\n2,0.25\n3,0.125\n4,0.0625\n")
    q = read_potential_csv(p)
    assert q.xmax == 4 and q.values[1] == 0.5


@pytest.mark.parametrize("body, line", [
    ("x,q\n0,1\n1,abc\n2,0\n3,0\n4,0\n", 3),
    ("x,q\n0,1\n2,1\n1,0\n3,0\n4,0\n", 4),
    ("x,q\n0,1\n1\n2,0\n3,0\n4,0\n", 3),
])
def test_read_csv_names_line(tmp_path, body, line):
    p = tmp_path / "bad.csv"
    p.write_text(body)
    with pytest.raises(PotentialFormatError, match=f":{line}:"):
        read_potential_csv(p)


def test_potential_must_be_real():
    with pytest.raises(ValueError):
        SampledPotential(np.linspace(0, 1, 6), np.ones(6) * 1j)
