import cmath

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from trisect import trig3
from trisect.trig3 import (eval_s, find_zeros, growth_bound, identity_residuals, interlaces,
                           taylor_derivative, zero_equation)

Z2 = complex(-0.5, np.sqrt(3) / 2)


def disk(radius):
    return st.builds(lambda r, a: radius * np.sqrt(r) * cmath.exp(2j * np.pi * a),
                     st.floats(0, 1), st.floats(0, 1))


def test_values_at_origin():
    assert eval_s(0, 0) == 1
    assert eval_s(1, 0) == 0
    assert eval_s(2, 0) == 0


def test_small_argument_series():
    z = 0.01 + 0.02j
    assert abs(eval_s(1, z) - (z + z ** 4 / 24)) < 1e-13


def test_bad_family_index():
    with pytest.raises(ValueError):
        eval_s(3, 1.0)


def test_branches_agree_at_crossover():
    for a in np.linspace(0, 2 * np.pi, 13):
        z = trig3.CROSSOVER * cmath.exp(1j * a)
        zz = np.array([z])
        for p in range(3):
            s_series = trig3._taylor(p, zz)[0]
            s_exp = trig3._expsum(p, zz)[0]
            assert abs(s_series - s_exp) <= 1e-12 * max(1, abs(s_exp))


def test_zero_point_residuals_vanish():
    res = identity_residuals(0, 0)
    assert all(v == 0 for v in res.values()), res


@settings(max_examples=100, deadline=None)
@given(disk(3.0), disk(3.0))
def test_identities_hold(z, w):
    res = identity_residuals(z, w)
    assert max(res.values()) <= 1e-10, res


@given(disk(3.0))
def test_euler_formula(z):
    s0, s1, s2 = trig3.eval_all(z)
    assert abs(cmath.exp(z * Z2) - (s0 + Z2 * s1 + Z2 ** 2 * s2)) <= 1e-12 * max(1, abs(cmath.exp(z * Z2)))


@given(disk(5.0), st.integers(0, 2))
def test_p_evenness(z, p):
    assert abs(eval_s(p, Z2 * z) - Z2 ** p * eval_s(p, z)) <= 1e-12 * max(1, abs(eval_s(p, z)))


@given(disk(5.0), st.integers(0, 2))
def test_reality(z, p):
    v = eval_s(p, z)
    assert abs(np.conj(v) - eval_s(p, z.conjugate())) <= 1e-14 * max(1, abs(v))


def test_derivative_cycle_by_finite_differences():
    rng = np.random.default_rng(3)
    z = 2 * (rng.uniform(-1, 1, 50) + 1j * rng.uniform(-1, 1, 50))
    h = 1e-5
    for p in range(3):
        fd = (eval_s(p, z + h) - eval_s(p, z - h)) / (2 * h)
        assert np.max(np.abs(fd - eval_s((p - 1) % 3, z))) < 1e-8


def test_series_derivative():
    z = 0.7 - 1.2j
    for p in range(3):
        assert abs(taylor_derivative(p, z) - eval_s((p - 1) % 3, z)) < 1e-12


def test_printed_product_formulas_fail():
    # the commonly quoted product table has a wrong index; the corrected one holds
    z, w = 0.8 + 0.3j, -0.4 + 1.1j
    assert identity_residuals(z, w)["product"] < 1e-12
    assert identity_residuals(z, w, printed=True)["product"] > 1e-2


def test_growth_bound_examples():
    assert growth_bound(0) == 1
    assert abs(growth_bound(1j) - np.e) < 1e-15


@given(disk(5.0))
def test_growth_bound_dominates(lam):
    d = growth_bound(lam)
    assert max(abs(eval_s(p, 1j * lam)) for p in range(3)) <= d * (1 + 1e-12)


def test_first_zeros():
    assert find_zeros(1, 1)[0].x == 0
    assert find_zeros(2, 1)[0].x == 0
    x0 = find_zeros(0, 1)[0].x
    assert x0 > 0
    assert abs(np.cos(np.sqrt(3) * x0 / 2) + 0.5 * np.exp(-1.5 * x0)) < 1e-12
    assert abs(eval_s(0, -x0)) < 1e-10


@pytest.mark.parametrize("p", [0, 1, 2])
def test_zero_table(p):
    zs = find_zeros(p, 10)
    xs = [z.x for z in zs]
    assert xs == sorted(xs)
    for z in zs:
        assert abs(float(zero_equation(p, z.x_ext))) < 1e-12
        # images far out on the rays need the extended-precision root
        for img in z.ray_images_ext():
            assert abs(complex(eval_s(p, img))) < 1e-9


def test_ray_images_are_rotations():
    z = find_zeros(0, 3)[2]
    imgs = z.ray_images
    assert abs(imgs[1] + z.x) == 0
    assert abs(imgs[0] - imgs[1] * Z2.conjugate()) < 1e-12 * z.x
    assert abs(imgs[2] - imgs[1] * Z2) < 1e-12 * z.x


def test_zeros_interlace():
    x = [[z.x for z in find_zeros(p, 10)] for p in range(3)]
    assert interlaces(x[0], x[1])
    assert interlaces(x[1], x[2])


def test_find_zeros_arguments():
    with pytest.raises(ValueError):
        find_zeros(3, 1)
    with pytest.raises(ValueError):
        find_zeros(0, 0)
