"""Jost and Cauchy solutions of i u''' + q u = lam**3 u on the half-line.

The Jost solutions are computed from the Volterra equation

    e_p(x) = exp(i lam zeta_p x) - i * int_x^X K1(lam, x, t) q(t) e_p(t) dt,
    K1(lam, x, t) = s_2(i lam (x - t)) / (i lam)**2,

by Neumann iteration.  Because s_2 is a sum of three exponentials, the
integral splits into three one-sided exponential convolutions which are
accumulated in a single backward sweep (O(N) per iteration).  Each panel is
integrated exactly against its exponential factor after cubic interpolation
of q*psi, so large |lam| does not degrade the quadrature.  Near lam = 0 the
three exponentials cancel catastrophically, and the solver switches to a dense
product rule with the kernel taken from its Taylor series.
"""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .raygeom import ZETA, zeta
from .trig3 import eval_s

logger = logging.getLogger(__name__)

# below this value of |lam| * X the exponential split loses too many digits
DENSE_SWITCH = 0.05
TAYLOR_SWITCH = 1e-2


class DomainViolation(ValueError):
    """lam outside the disc |lam| < a/3 for a potential that is not compactly supported."""


class NonConvergence(RuntimeError):
    """Neumann iteration did not reach the requested tolerance."""


class RegionViolation(ValueError):
    """Fourier transform requested outside its half-plane of convergence."""


class PotentialFormatError(ValueError):
    pass


# ---------------------------------------------------------------------------
# potentials

@dataclass(frozen=True)
class SampledPotential:
    """Real potential sampled on [0, X]; piecewise linear in between, zero beyond X.

    ``a`` is the exponential decay rate assumed for the tail beyond the grid.
    ``compact`` declares that q vanishes past the last node, in which case
    Jost solutions exist for every lam and the solver accepts any lam.
    """

    grid: np.ndarray
    values: np.ndarray
    a: float = 1.0
    compact: bool = False

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values)
        if g.ndim != 1 or g.shape != v.shape:
            raise ValueError("grid and values must be 1-D arrays of equal length")
        if len(g) < 5:
            raise ValueError("need at least 5 samples")
        if np.iscomplexobj(v):
            if np.max(np.abs(v.imag)) > 0:
                raise ValueError("potential must be real")
            v = v.real
        v = v.astype(float)
        if not (np.all(np.isfinite(g)) and np.all(np.isfinite(v))):
            raise ValueError("non-finite samples")
        if g[0] != 0.0:
            raise ValueError("grid must start at x = 0")
        if np.any(np.diff(g) <= 0):
            raise ValueError("grid must be strictly increasing")
        if self.a <= 0:
            raise ValueError("decay parameter a must be positive")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, f, xmax: float, n: int, a: float = 1.0, compact: bool = False):
        x = np.linspace(0.0, xmax, n + 1)
        return cls(x, np.asarray(f(x), dtype=float) * np.ones_like(x), a, compact)

    @classmethod
    def zero(cls, xmax: float = 4.0, n: int = 400, a: float = 12.0):
        return cls.from_function(lambda x: 0 * x, xmax, n, a, True)

    @property
    def xmax(self) -> float:
        return float(self.grid[-1])

    @property
    def n(self) -> int:
        return len(self.grid) - 1

    def is_uniform(self) -> bool:
        h = np.diff(self.grid)
        return bool(np.allclose(h, h[0], rtol=1e-9, atol=0))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.interp(x, self.grid, self.values, left=0.0, right=0.0) * (x <= self.xmax)

    def uniform(self, n: int | None = None) -> "SampledPotential":
        if n is None and self.is_uniform():
            return self
        n = self.n if n is None else n
        x = np.linspace(0.0, self.xmax, n + 1)
        return SampledPotential(x, self(x), self.a, self.compact)

    def tail_l1(self) -> float:
        """Estimate of int_X^inf |q| assuming decay like exp(-a x) past the grid."""
        if self.compact:
            return 0.0
        return abs(self.values[-1]) / self.a

    def weighted_l2(self) -> float:
        """int |q|^2 exp(2 a x) dx by the trapezoid rule plus a tail estimate."""
        w = self.values ** 2 * np.exp(2 * self.a * self.grid)
        body = float(np.trapezoid(w, self.grid))
        return body if self.compact else body + float(w[-1]) / (2 * self.a)

    def integral_from(self) -> np.ndarray:
        """P(x) = int_x^inf q(t) dt at every node (trapezoid, plus tail)."""
        seg = 0.5 * (self.values[1:] + self.values[:-1]) * np.diff(self.grid)
        out = np.zeros_like(self.grid)
        out[:-1] = np.cumsum(seg[::-1])[::-1]
        if not self.compact:
            out += self.values[-1] / self.a
        return out

    def sigma(self) -> "SigmaAccumulator":
        seg = 0.5 * (np.abs(self.values[1:]) + np.abs(self.values[:-1])) * np.diff(self.grid)
        s = np.concatenate([[0.0], np.cumsum(seg)])
        return SigmaAccumulator(self.grid, s, float(s[-1] + self.tail_l1()))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "q"])
            for x, v in zip(self.grid, self.values):
                w.writerow([repr(float(x)), repr(float(v))])


def read_potential_csv(path, a: float = 1.0, compact: bool = True) -> SampledPotential:
    """Read ``x,q`` rows (header optional).  Errors name the offending line."""
    xs, qs = [], []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row) or row[0].lstrip().startswith("#"):
                continue
            if len(row) < 2:
                raise PotentialFormatError(f"{path}:{lineno}: expected two columns x,q")
            try:
                x, q = float(row[0]), float(row[1])
            except ValueError:
                if lineno == 1 or not xs:
                    continue  # header
                raise PotentialFormatError(f"{path}:{lineno}: cannot parse {row!r}") from None
            if xs and x <= xs[-1]:
                raise PotentialFormatError(f"{path}:{lineno}: x values must be ascending")
            xs.append(x)
            qs.append(q)
    if len(xs) < 5:
        raise PotentialFormatError(f"{path}: need at least 5 data rows, found {len(xs)}")
    try:
        return SampledPotential(np.array(xs), np.array(qs), a, compact)
    except ValueError as exc:
        raise PotentialFormatError(f"{path}: {exc}") from None


@dataclass(frozen=True)
class SigmaAccumulator:
    grid: np.ndarray
    sigma: np.ndarray
    sigma_inf: float

    def __call__(self, t):
        return np.interp(t, self.grid, self.sigma, right=self.sigma[-1])


# ---------------------------------------------------------------------------
# kernels

def sdiv(p: int, lam: complex, y):
    """s_p(i lam y) / (i lam)**p, finite at lam = 0 (then y**p / p!)."""
    y = np.asarray(y, dtype=float)
    lam = complex(lam)
    u = 1j * lam * y
    out = np.empty(y.shape, dtype=complex)
    small = np.abs(u) < TAYLOR_SWITCH
    if small.any():
        us = u[small] ** 3
        acc = np.zeros_like(us)
        for n in range(5, -1, -1):
            acc = acc * us + 1.0 / math.factorial(3 * n + p)
        out[small] = acc * y[small] ** p
    if (~small).any():
        out[~small] = eval_s(p, u[~small]) / (1j * lam) ** p
    return out[()] if out.ndim == 0 else out


def kernel_K1(lam: complex, x, t):
    """K1(lam, x, t) = s_2(i lam (x - t)) / (i lam)**2 for t >= x."""
    return sdiv(2, lam, np.asarray(x, dtype=float) - np.asarray(t, dtype=float))


def iterated_kernels(q: SampledPotential, lam: complex, x: float, t: float,
                     nmax: int = 4, m: int = 200):
    """K_1..K_nmax at (x, t) by direct quadrature of the kernel recursion.

    K_{n+1}(x, t) = int_x^t K_n(x, s) q(s) K_1(s, t) ds.  The whole profile
    s -> K_n(x, s) on [x, t] is carried along, so the cost is O(m**2) per order.
    Returns (values, profiles) where profiles[n-1] is K_n(x, s) on s.
    """
    s = np.linspace(x, t, m + 1)
    qs = q(s)
    k1 = kernel_K1(lam, s[:, None], s[None, :])  # k1[i, j] = K1(s_i, s_j)
    prof = [kernel_K1(lam, x, s)]
    for _ in range(nmax - 1):
        g = prof[-1] * qs
        nxt = np.zeros(m + 1, dtype=complex)
        for j in range(1, m + 1):
            nxt[j] = np.trapezoid(g[: j + 1] * k1[: j + 1, j], s[: j + 1])
        prof.append(nxt)
    return np.array([p[-1] for p in prof]), (s, prof)


def kernel_bound(lam: complex, x: float, t: float, n: int, sigma_t: float) -> float:
    """Right-hand side of the iterated-kernel estimate for order n."""
    lam = complex(lam)
    if lam == 0:
        return ((t - x) ** 2 / 2) ** n * sigma_t ** (n - 1) / (n ** (2 * n) * math.factorial(n - 1))
    from .trig3 import growth_bound
    return growth_bound(lam * (t - x)) / abs(lam) ** (2 * n) * sigma_t ** (n - 1) / math.factorial(n - 1)


def resolvent_bound(lam: complex, x: float, t: float, sigma_t: float) -> float:
    from .trig3 import growth_bound
    lam = complex(lam)
    if lam == 0:
        u = (t - x) ** 2 * sigma_t / 2
        return (t - x) ** 2 / 2 * sum(u ** n / ((n + 1) ** (2 * (n + 1)) * math.factorial(n))
                                      for n in range(40))
    return growth_bound(lam * (t - x)) / abs(lam) ** 2 * math.exp(sigma_t / abs(lam) ** 2)


# ---------------------------------------------------------------------------
# exact exponential product-integration weights

def _exp_moments(z: complex, mmax: int = 3) -> np.ndarray:
    """g_m(z) = int_0^1 exp(z u) u**m du for m = 0..mmax."""
    z = complex(z)
    if abs(z) < 1.0:
        terms = np.arange(40)
        pw = np.cumprod(np.concatenate([[1.0 + 0j], np.full(39, z)])) / np.array(
            [math.factorial(int(k)) for k in terms], dtype=float)
        return np.array([np.sum(pw / (terms + m + 1)) for m in range(mmax + 1)])
    ez = np.exp(z)
    g = [(ez - 1) / z]
    for m in range(1, mmax + 1):
        g.append((ez - m * g[-1]) / z)
    return np.array(g)


_STENCILS = {
    "first": (0, 1, 2, 3),
    "inner": (-1, 0, 1, 2),
    "last": (-2, -1, 0, 1),
}


def _lagrange_coeffs(offsets) -> np.ndarray:
    """Rows: monomial coefficients (ascending powers of u) of each Lagrange basis."""
    out = []
    for j, oj in enumerate(offsets):
        poly = np.poly1d([1.0])
        for l, ol in enumerate(offsets):
            if l != j:
                poly = poly * np.poly1d([1.0, -ol]) / (oj - ol)
        out.append(poly.coeffs[::-1])
    return np.array(out)


_LAGRANGE = {k: _lagrange_coeffs(v) for k, v in _STENCILS.items()}


def panel_weights(c: complex, h: float) -> dict:
    """Weights w with int_0^h exp(c s) f(s) ds ~= h * sum_j w_j f(o_j h) for each stencil."""
    g = _exp_moments(c * h)
    return {k: h * (L @ g) for k, L in _LAGRANGE.items()}


def _panel_sums(f: np.ndarray, w: dict) -> np.ndarray:
    """Per-panel integrals sum_j w_j f[i + o_j] for panels i = 0..N-1 (N + 1 nodes)."""
    n = len(f) - 1
    out = np.empty(n, dtype=complex)
    wi = w["inner"]
    if n >= 3:
        out[1:n - 1] = wi[0] * f[0:n - 2] + wi[1] * f[1:n - 1] + wi[2] * f[2:n] + wi[3] * f[3:n + 1]
    wf = w["first"]
    out[0] = wf @ f[0:4]
    wl = w["last"]
    out[n - 1] = wl @ f[n - 3:n + 1]
    return out


def backward_exp_integral(f: np.ndarray, c: complex, h: float) -> np.ndarray:
    """I(x_i) = int_{x_i}^{x_N} exp(c (t - x_i)) f(t) dt at every node."""
    P = _panel_sums(f, panel_weights(c, h))
    a = np.exp(c * h)
    rev = lfilter([1.0], [1.0, -a], P[::-1].astype(complex))
    out = np.zeros(len(f), dtype=complex)
    out[:-1] = rev[::-1]
    return out


def forward_exp_integral(f: np.ndarray, c: complex, h: float) -> np.ndarray:
    """J(x_i) = int_0^{x_i} exp(c (x_i - t)) f(t) dt at every node."""
    # mirror the grid so that the forward sweep becomes a backward one
    return backward_exp_integral(f[::-1], c, h)[::-1]


def tail_weights(h: float, n_nodes: int) -> np.ndarray:
    """W[i, j]: plain cubic product-rule weights for int_{x_i}^{x_N} g(t) dt."""
    w = panel_weights(0.0, h)
    n = n_nodes - 1
    panel = np.zeros((n, n + 1))
    for i in range(n):
        if i == 0:
            st, ww = _STENCILS["first"], w["first"]
        elif i == n - 1:
            st, ww = _STENCILS["last"], w["last"]
        else:
            st, ww = _STENCILS["inner"], w["inner"]
        for o, wv in zip(st, ww):
            panel[i, i + o] += wv.real
    W = np.zeros((n + 1, n + 1))
    W[:-1] = np.cumsum(panel[::-1], axis=0)[::-1]
    return W


# ---------------------------------------------------------------------------
# Jost solutions

@dataclass
class JostSolution:
    lam: complex
    p: int
    x: np.ndarray
    psi: np.ndarray          # e_p * exp(-i lam zeta_p x)
    dpsi: np.ndarray         # e_p' * exp(-i lam zeta_p x)
    d2psi: np.ndarray        # e_p'' * exp(-i lam zeta_p x)
    iterations: int
    residual: float
    extended: bool = False
    tail: float = 0.0

    @property
    def phase(self) -> np.ndarray:
        return np.exp(1j * self.lam * zeta(self.p) * self.x)

    @property
    def e(self) -> np.ndarray:
        return self.psi * self.phase

    @property
    def de(self) -> np.ndarray:
        return self.dpsi * self.phase

    @property
    def d2e(self) -> np.ndarray:
        return self.d2psi * self.phase

    def at0(self) -> tuple:
        """(e_p, e_p', e_p'') at x = 0."""
        return complex(self.psi[0]), complex(self.dpsi[0]), complex(self.d2psi[0])


def _check_domain(q: SampledPotential, lam: complex) -> bool:
    outside = abs(lam) >= q.a / 3
    if outside and not q.compact:
        raise DomainViolation(
            f"|lam| = {abs(lam):.4g} is not below a/3 = {q.a / 3:.4g} and the potential is not compact")
    return outside


def _neumann(apply, free, tol, max_iter, scale=1.0):
    """Iterate u <- free + apply(u) until the sup-norm change drops below tol.

    The change is measured relative to max(scale, sup |u|), so that solutions
    that grow far beyond 1 stop at the rounding floor instead of stalling.
    """
    u = free.copy()
    change = np.inf
    for it in range(1, max_iter + 1):
        nxt = free + apply(u)
        change = float(np.max(np.abs(nxt - u))) / max(scale, float(np.max(np.abs(nxt))))
        u = nxt
        if change <= tol:
            return u, it, change
    raise NonConvergence(f"Neumann iteration stalled at change {change:.3e} after {max_iter} steps")


def jost_solve(q: SampledPotential, lam: complex, p: int, tol: float = 1e-10,
               max_iter: int = 200) -> JostSolution:
    """Jost solution e_p(lam, x) with first and second derivatives on q's grid."""
    if p not in (1, 2, 3):
        raise ValueError("Jost index must be 1, 2 or 3")
    lam = complex(lam)
    extended = _check_domain(q, lam)
    qu = q.uniform()
    x = qu.grid
    h = x[1] - x[0]
    qv = qu.values
    zp = zeta(p)

    if not np.any(qv):
        one = np.ones_like(x, dtype=complex)
        return JostSolution(lam, p, x, one, one * 1j * lam * zp, one * (1j * lam * zp) ** 2,
                            1, 0.0, extended, 0.0)

    if abs(lam) * qu.xmax < DENSE_SWITCH:
        psi, dpsi, d2psi, it, res = _jost_dense(qu, lam, p, tol, max_iter)
    else:
        cs = [1j * lam * (zp - zk) for zk in ZETA]

        def integrals(psi):
            f = qv * psi
            return [backward_exp_integral(f, c, h) for c in cs]

        coef = [zk / (3 * (1j * lam) ** 2) for zk in ZETA]

        def apply(psi):
            return -1j * sum(ck * Ik for ck, Ik in zip(coef, integrals(psi)))

        free = np.ones_like(x, dtype=complex)
        psi, it, res = _neumann(apply, free, tol, max_iter)
        I = integrals(psi)
        dpsi = 1j * lam * zp - 1j * sum(zk ** 2 / (3 * 1j * lam) * Ik for zk, Ik in zip(ZETA, I))
        d2psi = (1j * lam * zp) ** 2 - 1j * sum(Ik / 3 for Ik in I)

    tail = 0.0
    if not q.compact:
        # crude bound on the neglected part of the integral past the grid
        tail = q.tail_l1() * max(1.0, 1.0 / max(abs(lam), 1e-300) ** 2) * np.exp(abs(lam) * q.xmax)
        tail = float(min(tail, np.inf))
    return JostSolution(lam, p, x, psi, dpsi, d2psi, it, res, extended, tail)


def _jost_dense(qu: SampledPotential, lam: complex, p: int, tol: float, max_iter: int):
    x = qu.grid
    h = x[1] - x[0]
    W = tail_weights(h, len(x))
    zp = zeta(p)
    D = x[None, :] - x[:, None]          # t - x
    ph = np.exp(1j * lam * zp * D)
    K = [sdiv(2 - m, lam, -D) * ph for m in range(3)]   # s_{2-m}(i lam (x - t)) / (i lam)**(2-m)
    A = [W * Km * qu.values[None, :] for Km in K]
    free = np.ones_like(x, dtype=complex)
    psi, it, res = _neumann(lambda u: -1j * (A[0] @ u), free, tol, max_iter)
    dpsi = 1j * lam * zp - 1j * (A[1] @ psi)
    d2psi = (1j * lam * zp) ** 2 - 1j * (A[2] @ psi)
    return psi, dpsi, d2psi, it, res


def psi(q: SampledPotential, lam: complex, p: int, **kw) -> np.ndarray:
    """psi_p(lam, x) = e_p(lam, x) exp(-i lam zeta_p x) on q's grid."""
    return jost_solve(q, lam, p, **kw).psi


def jost_ode_oracle(q: SampledPotential, lam: complex, p: int, xs=None, rtol: float = 1e-12,
                    qfun=None):
    """Independent check: integrate u''' = i (q - lam**3) u backwards from X.

    Terminal data are those of exp(i lam zeta_p x).  ``qfun`` may supply the
    exact potential instead of the piecewise-linear interpolant.
    Returns (x, e, e', e'').
    """
    qfun = q if qfun is None else qfun
    from scipy.integrate import solve_ivp

    lam = complex(lam)
    zp = zeta(p)
    X = q.xmax
    k = 1j * lam * zp
    y0 = np.exp(k * X) * np.array([1.0, k, k * k])

    def rhs(t, y):
        return [y[1], y[2], 1j * (qfun(t) - lam ** 3) * y[0]]

    xs = q.grid[::-1] if xs is None else np.sort(np.asarray(xs))[::-1]
    sol = solve_ivp(rhs, (X, float(xs[-1])), y0.astype(complex), t_eval=xs, method="DOP853",
                    rtol=rtol, atol=1e-14, max_step=(X / 400))
    return sol.t[::-1], sol.y[0][::-1], sol.y[1][::-1], sol.y[2][::-1]


# ---------------------------------------------------------------------------
# Cauchy problem

@dataclass
class CauchySolution:
    lam: complex
    alpha: float
    beta: float
    x: np.ndarray
    w: np.ndarray
    dw: np.ndarray
    d2w: np.ndarray
    iterations: int
    residual: float


def cauchy_solve(q: SampledPotential, lam: complex, alpha: float = 1.0, beta: float = 0.0,
                 tol: float = 1e-10, max_iter: int = 400) -> CauchySolution:
    """Solution with w(0) = 0, w'(0) = alpha, w''(0) = beta."""
    lam = complex(lam)
    qu = q.uniform()
    x = qu.grid
    h = x[1] - x[0]
    qv = qu.values
    free = alpha * sdiv(1, lam, x) + beta * sdiv(2, lam, x)
    dfree = alpha * sdiv(0, lam, x) + beta * sdiv(1, lam, x)
    d2free = alpha * (1j * lam) ** 3 * sdiv(2, lam, x) + beta * sdiv(0, lam, x)
    scale = max(1.0, float(np.max(np.abs(free))))

    if abs(lam) * qu.xmax < DENSE_SWITCH:
        W = tail_weights(h, len(x))[::-1, ::-1]   # int_0^{x_i} on the mirrored grid
        D = x[:, None] - x[None, :]
        K = [sdiv(2 - m, lam, D) for m in range(3)]
        A = [W * Km * qv[None, :] for Km in K]
        w, it, res = _neumann(lambda u: 1j * (A[0] @ u), free.astype(complex), tol, max_iter, scale)
        dw = dfree + 1j * (A[1] @ w)
        d2w = d2free + 1j * (A[2] @ w)
    else:
        cs = [1j * lam * zk for zk in ZETA]

        def integrals(u):
            f = qv * u
            return [forward_exp_integral(f, c, h) for c in cs]

        def apply(u):
            return 1j * sum(zk / (3 * (1j * lam) ** 2) * Jk for zk, Jk in zip(ZETA, integrals(u)))

        w, it, res = _neumann(apply, free.astype(complex), tol, max_iter, scale)
        J = integrals(w)
        dw = dfree + 1j * sum(zk ** 2 / (3 * 1j * lam) * Jk for zk, Jk in zip(ZETA, J))
        d2w = d2free + 1j * sum(Jk / 3 for Jk in J)
    return CauchySolution(lam, alpha, beta, x, w, dw, d2w, it, res)


def cauchy_estimate_bound(q: SampledPotential, lam: complex, alpha: float, beta: float) -> np.ndarray:
    """Right-hand side (|alpha| + |beta|/|lam|) p(x) / |lam|**3 of the Cauchy estimate on q's grid."""
    sig = q.uniform().sigma().sigma
    x = q.uniform().grid
    px = sig * (1 + x ** 2 / 2 * sig * np.exp(x ** 2 * sig))
    lam = abs(complex(lam))
    return (abs(alpha) + abs(beta) / lam) * px / lam ** 3


# ---------------------------------------------------------------------------
# Wronskians and the fundamental determinant

def _pair(u):
    if isinstance(u, JostSolution):
        return u.e, u.de
    if isinstance(u, CauchySolution):
        return u.w, u.dw
    f, df = u
    return np.asarray(f), np.asarray(df)


def wronskian(u, v) -> np.ndarray:
    """{u, v} = u v' - u' v pointwise."""
    f, df = _pair(u)
    g, dg = _pair(v)
    if f.shape != g.shape:
        raise ValueError("Wronskian arguments live on different grids")
    return f * dg - df * g


@dataclass
class DeterminantReport:
    lam: complex
    x: np.ndarray
    values: np.ndarray
    expected: complex
    max_deviation: float     # max |values / expected - 1|


def fundamental_determinant(q: SampledPotential, lam: complex, sols=None,
                            **kw) -> DeterminantReport:
    """det of (e_p, e_p', e_p''), p = 1..3, along the grid; should equal -3 sqrt(3) lam**3."""
    lam = complex(lam)
    if sols is None:
        sols = [jost_solve(q, lam, p, **kw) for p in (1, 2, 3)]
    # phases multiply to exp(i lam (z1 + z2 + z3) x) = 1, so use the scaled values
    M = np.stack([np.stack([s.psi, s.dpsi, s.d2psi], axis=-1) for s in sols], axis=-1)
    det = np.linalg.det(M)
    expected = -3 * np.sqrt(3.0) * lam ** 3
    dev = float(np.max(np.abs(det / expected - 1))) if expected != 0 else float(np.max(np.abs(det)))
    return DeterminantReport(lam, sols[0].x, det, expected, dev)


# ---------------------------------------------------------------------------
# Fourier transform on a ray

def fourier_on_ray(f, k: int, lam: complex, x=None, a: float = 0.0) -> complex:
    """int_0^inf exp(-i lam zeta_k x) f(x zeta_k) dx.

    ``f`` is either a callable of x >= 0 (the restriction of f to the ray) or
    an array of samples on the uniform grid ``x``.  Samples are assumed to decay
    like exp(-a x); the transform is defined while Im(lam zeta_k) <= a.
    """
    lam = complex(lam)
    zk = zeta(k)
    growth = (lam * zk).imag
    if growth > a + 1e-12:
        raise RegionViolation(
            f"Im(lam zeta_{k}) = {growth:.4g} exceeds the decay rate {a:.4g}")
    if x is None:
        x = np.linspace(0.0, 60.0 / max(a - growth, 0.25), 6001)
    x = np.asarray(x, dtype=float)
    vals = f(x) if callable(f) else np.asarray(f)
    h = x[1] - x[0]
    c = -1j * lam * zk
    P = _panel_sums(vals.astype(complex), panel_weights(c, h))
    # assemble int_0^X exp(c t) f(t) dt from panel integrals shifted to x_i
    return complex(np.sum(P * np.exp(c * x[:-1])))


def parseval_ratio(f, x) -> float:
    """(1 / 2 pi) ||F f||^2 over the real line divided by ||f||^2 for a ray-1 function.

    The transform is sampled on a symmetric frequency grid wide enough for the
    test functions used here; the ratio is 1 for the normalisation adopted in
    this package (the 2 pi sits on the transform side).
    """
    x = np.asarray(x, dtype=float)
    vals = f(x) if callable(f) else np.asarray(f)
    norm = float(np.trapezoid(np.abs(vals) ** 2, x))
    eta = np.linspace(-400.0, 400.0, 8001)
    ft = np.array([fourier_on_ray(vals, 1, e, x) for e in eta])
    tnorm = float(np.trapezoid(np.abs(ft) ** 2, eta))
    return tnorm / (2 * np.pi * norm)
