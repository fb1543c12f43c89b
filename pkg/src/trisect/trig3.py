"""Generalized trigonometric functions for y''' = y.

The three functions

    s_p(z) = (1/3) * sum_k zeta_k**(-p) * exp(z * zeta_k),   p = 0, 1, 2

play the role that cosine and sine play for y'' = -y.  They are evaluated by
their Taylor series inside the unit disc (25 terms) and by the exponential sum
outside it.  Both routes accept numpy arrays of any complex dtype, including
``np.clongdouble`` which is used to certify zeros far out on the rays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

TAYLOR_TERMS = 25
CROSSOVER = 1.0


def _roots(dtype) -> tuple:
    """Cube roots of unity computed in the working precision of ``dtype``."""
    ctype = np.dtype(dtype).type
    real = np.finfo(dtype).dtype.type
    h = np.sqrt(real(3)) / 2
    z2 = real(-0.5) + h * ctype(1j)
    return ctype(1), z2, np.conj(z2)


def _working_dtype(z):
    z = np.asarray(z)
    if z.dtype in (np.longdouble, np.clongdouble):
        return np.clongdouble
    return np.complex128


def _taylor(p: int, z, terms: int = TAYLOR_TERMS):
    z = np.asarray(z)
    real = np.finfo(z.dtype).dtype.type
    z3 = z ** 3
    out = np.zeros_like(z)
    # Horner in z**3 on the coefficients 1/(3n+p)!
    for n in range(terms - 1, -1, -1):
        out = out * z3 + real(1) / real(math.factorial(3 * n + p))
    return out * z ** p


def _expsum(p: int, z):
    one, z2, z3 = _roots(z.dtype)
    # zeta_2**(-p) cycles through 1, zeta_3, zeta_2; taken from the table so the
    # weights sum to exactly 0 at z = 0
    w2 = (one, z3, z2)[p]
    w3 = (one, z2, z3)[p]
    return (np.exp(z) + w2 * np.exp(z * z2) + w3 * np.exp(z * z3)) / 3


def eval_s(p: int, z):
    """Return s_p(z) for p in {0, 1, 2}; scalar in, scalar out."""
    if p not in (0, 1, 2):
        raise ValueError(f"family index must be 0, 1 or 2, got {p!r}")
    scalar = np.ndim(z) == 0
    zz = np.asarray(z).astype(_working_dtype(z))
    small = np.abs(zz) < CROSSOVER
    out = np.empty_like(zz)
    if small.any():
        out[small] = _taylor(p, zz[small])
    if (~small).any():
        out[~small] = _expsum(p, zz[~small])
    if scalar:
        return out[()] if out.dtype == np.clongdouble else complex(out[()])
    return out


def eval_all(z):
    """Triple (s_0, s_1, s_2) at z."""
    return tuple(eval_s(p, z) for p in range(3))


def taylor_derivative(p: int, z, terms: int = 40):
    """Derivative of s_p from the termwise differentiated power series."""
    z = complex(z)
    total = 0j
    for n in range(terms):
        m = 3 * n + p
        if m == 0:
            continue
        total += z ** (m - 1) / math.factorial(m - 1)
    return total


def growth_bound(lam) -> float:
    """d(lam) = exp(|Im lam|) * cosh(sqrt(3) * Re(lam) / 2); bounds |s_p(i*lam)|."""
    lam = np.asarray(lam, dtype=complex)
    d = np.exp(np.abs(lam.imag)) * np.cosh(np.sqrt(3.0) * lam.real / 2)
    return float(d) if d.ndim == 0 else d


# ---------------------------------------------------------------------------
# identity algebra

Z2 = complex(-0.5, np.sqrt(3.0) / 2)
Z3 = Z2.conjugate()
ZS = (1.0 + 0j, Z2, Z3)


def _product_forms(s, z, w, printed: bool):
    """Residuals of the six product formulas.

    Summing s_p(z + zeta_k w) against the weights zeta_k**j picks out a single
    term of the addition formula, 3 s_a(z) s_b(w) with b = -j and a = p - b
    (mod 3).  ``printed=True`` evaluates the left-hand sides as they are usually
    quoted instead, with the nonexistent index 3 mapped to 2.
    """
    sz = [s(p, z) for p in range(3)]
    sw = [s(p, w) for p in range(3)]
    shifted = [[s(p, z + ZS[k] * w) for k in range(3)] for p in range(3)]

    def rhs(p, j):
        return sum(ZS[k] ** j * shifted[p][k] for k in range(3))

    cases = [(0, 0), (0, 1), (1, 0), (1, 1), (2, 0), (2, 1)]
    if printed:
        lhs = [3 * sz[0] * sw[0], 3 * sz[0] * sw[2], 3 * sz[0] * sw[1],
               3 * sz[2] * sw[2], 3 * sz[0] * sw[2], 3 * sz[1] * sw[1]]
    else:
        lhs = []
        for p, j in cases:
            b = (-j) % 3
            a = (p - b) % 3
            lhs.append(3 * sz[a] * sw[b])
    return [abs(l - rhs(p, j)) for l, (p, j) in zip(lhs, cases)]


def identity_residuals(z: complex, w: complex, printed: bool = False) -> dict:
    """Absolute residuals of the algebraic and differential identities at (z, w).

    Keys name the identity family; each value is the largest residual in that
    family.  ``printed=True`` swaps in the commonly printed (and partly
    erroneous) product and reduced-quadratic formulas for comparison.
    """
    z = complex(z)
    w = complex(w)
    s = eval_s
    s0, s1, s2 = eval_all(z)
    out = {}

    out["derivative"] = max(abs(taylor_derivative(p, z) - s((p - 1) % 3, z))
                            for p in range(3))
    out["reality"] = max(abs(np.conj(s(p, z)) - s(p, z.conjugate())) for p in range(3))
    out["p_evenness"] = max(abs(s(p, Z2 * z) - Z2 ** p * s(p, z)) for p in range(3))
    out["euler"] = max(abs(np.exp(z * zk) - (s0 + zk * s1 + zk ** 2 * s2)) for zk in ZS)
    out["initial_data"] = max(abs(s(0, 0) - 1), abs(s(1, 0)), abs(s(2, 0)),
                              abs(taylor_derivative(0, 0)), abs(taylor_derivative(1, 0) - 1),
                              abs(taylor_derivative(2, 0)))
    out["main"] = abs(s0 ** 3 + s1 ** 3 + s2 ** 3 - 3 * s0 * s1 * s2 - 1)

    t0, t1, t2 = eval_all(w)
    add = [s(0, z + w) - (s0 * t0 + s1 * t2 + s2 * t1),
           s(1, z + w) - (s0 * t1 + s1 * t0 + s2 * t2),
           s(2, z + w) - (s0 * t2 + s1 * t1 + s2 * t0)]
    out["addition"] = max(abs(r) for r in add)
    out["product"] = max(_product_forms(s, z, w, printed))

    dup = [3 * s0 ** 2 - (s(0, 2 * z) + 2 * s(0, -z)),
           3 * s1 ** 2 - (s(2, 2 * z) + 2 * s(2, -z)),
           3 * s2 ** 2 - (s(1, 2 * z) + 2 * s(1, -z))]
    out["duplication"] = max(abs(r) for r in dup)

    if printed:
        middle = s1 - s2 * s0
    else:
        middle = s1 ** 2 - s2 * s0
    quad = [s0 ** 2 - s1 * s2 - s(0, -z),
            middle - s(2, -z),
            s2 ** 2 - s0 * s1 - s(1, -z)]
    out["reduced_quadratic"] = max(abs(r) for r in quad)

    # the series branch against the exponential sum at the same point
    zz = np.array([z])
    out["taylor"] = max(abs(_taylor(p, zz, 40)[0] - _expsum(p, zz)[0]) for p in range(3))
    return out


# ---------------------------------------------------------------------------
# zeros

_SIGN = {0: -1.0, 1: 1.0, 2: 1.0}
_PI_EXT = np.longdouble("3.14159265358979323846264338327950288")


def zero_equation(p: int, x):
    """cos(sqrt(3) x / 2 + phase_p) - sign_p * exp(-3x/2) / 2; roots are x_p(k)."""
    x = np.asarray(x)
    real = np.longdouble if x.dtype == np.longdouble else np.float64
    pi = _PI_EXT if real is np.longdouble else np.pi
    h = np.sqrt(real(3)) / 2
    phase = (0 * pi, -pi / 3, pi / 3)[p]
    return np.cos(h * x + phase) - real(_SIGN[p]) * np.exp(-real(1.5) * x) / 2


@dataclass(frozen=True)
class TrigZero:
    p: int
    k: int
    x: float
    x_ext: np.longdouble

    @property
    def ray_images(self):
        """The three zeros -zeta_2**l * x, l = -1, 0, 1."""
        return tuple(-(Z2 ** l) * self.x for l in (-1, 0, 1))

    def ray_images_ext(self):
        _, z2, z3 = _roots(np.clongdouble)
        x = self.x_ext
        return (-z3 * x, -np.clongdouble(1) * x, -z2 * x)


def _polish_ext(p: int, lo: float, hi: float, x0: float) -> np.longdouble:
    """Refine a double root to extended precision by bisection then secant."""
    a, b = np.longdouble(lo), np.longdouble(hi)
    fa = zero_equation(p, a)
    # a few bisections to make the bracket tight around x0
    for _ in range(200):
        m = (a + b) / 2
        fm = zero_equation(p, m)
        if fm == 0 or (b - a) <= 4 * np.finfo(np.longdouble).eps * max(abs(m), 1):
            break
        if np.sign(fm) == np.sign(fa):
            a, fa = m, fm
        else:
            b = m
    x = (a + b) / 2
    # secant steps
    x1 = x + np.finfo(np.longdouble).eps * 64 * max(abs(x), 1)
    f0, f1 = zero_equation(p, x), zero_equation(p, x1)
    for _ in range(8):
        if f1 == f0:
            break
        x2 = x1 - f1 * (x1 - x) / (f1 - f0)
        x, f0 = x1, f1
        x1, f1 = x2, zero_equation(p, x2)
    return x1 if abs(f1) <= abs(f0) else x


def find_zeros(p: int, count: int) -> list:
    """First ``count`` non-negative roots x_p(k) in ascending order."""
    if p not in (0, 1, 2):
        raise ValueError("family index must be 0, 1 or 2")
    if count < 1:
        raise ValueError("count must be at least 1")
    roots = []
    if p in (1, 2):
        roots.append((0.0, np.longdouble(0)))
    f = lambda x: float(zero_equation(p, x))
    step = np.pi / (2 * np.sqrt(3.0) / 2) / 4
    lo = 1e-3
    while len(roots) < count:
        hi = lo + step
        flo, fhi = f(lo), f(hi)
        if flo == 0.0:
            roots.append((lo, np.longdouble(lo)))
        elif flo * fhi < 0:
            x = brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
            roots.append((x, _polish_ext(p, lo, hi, x)))
        lo = hi
    out = []
    for k, (x, xe) in enumerate(roots[:count], start=1):
        out.append(TrigZero(p, k, float(xe), xe))
    return out


def interlaces(outer, inner) -> bool:
    """True when each open gap between consecutive ``outer`` values holds one ``inner`` value.

    Values shared by both sequences (the common zero at the origin) are dropped
    before comparing.
    """
    outer = sorted(set(outer) - set(inner))
    inner = sorted(set(inner) - set(outer))
    for a, b in zip(outer[:-1], outer[1:]):
        if sum(1 for v in inner if a < v < b) != 1:
            return False
    return True
