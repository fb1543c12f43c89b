"""Inverse solver: canonical function, singular system on the rays, potential recovery.

The unknowns live on the rays lam = -i zeta_2 t and lam = -i zeta_3 t (t > 0)
and are carried as functions of the real parameter t:

    phi_2(t) = c_3(-i zeta_3 t) psi_2(-i t),   phi_3(t) = c_2(-i zeta_2 t) psi_3(-i t)

Everything reduces to Cauchy transforms on the positive half-axis

    C[f](z) = 1/(2 pi i) int_0^T f(tau) dtau / (tau - z),

which are discretized with Gauss-Legendre panels and exact Legendre-Cauchy
moments for targets near a panel (principal value for targets on the axis).
This keeps the quadrature accurate at the geometric panels near t = 0, where
the jump data change on every scale.
"""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field, replace

import numpy as np
from numpy.polynomial.legendre import leggauss, legvander
from scipy.linalg import lu_factor, lu_solve
from scipy.signal import savgol_filter

from .forward import DIRECTIONS, ScatteringData, expansion_coefficients
from .raygeom import SQRT3, ZETA
from .volterra import SampledPotential, cauchy_solve, jost_solve

logger = logging.getLogger(__name__)

Z1, Z2, Z3 = ZETA
TWO_PI_I = 2j * np.pi


class BranchJump(ArithmeticError):
    """Adjacent samples of ln d differ by about 2 pi; the t-grid is too coarse."""


class ZeroOnContour(ArithmeticError):
    """d vanishes on the contour, so the canonical function does not exist."""


class SingularMatrix(np.linalg.LinAlgError):
    pass


class ResidualTooLarge(ArithmeticError):
    pass


class ExtrapolationUnstable(ArithmeticError):
    pass


class OnContour(ValueError):
    pass


# ---------------------------------------------------------------------------
# quadrature on (0, T]

def default_edges(n_tau: int = 400, order: int = 16, T: float = 1000.0) -> np.ndarray:
    """Panel edges for about ``n_tau`` nodes: geometric near 0, unit width, geometric tail."""
    npan = max(6, n_tau // order)
    n_small = max(2, round(npan * 0.28))
    n_tail = max(2, round(npan * 0.28))
    n_mid = max(2, npan - n_small - n_tail)
    mid_end = 1.0 + n_mid
    small = np.geomspace(10.0 ** (-n_small + 1), 1.0, n_small)
    mid = np.linspace(1.0, mid_end, n_mid + 1)[1:]
    tail = np.geomspace(mid_end, max(T, 2 * mid_end), n_tail + 1)[1:]
    return np.concatenate([[0.0], small, mid, tail])


def _legendre_cauchy_moments(zp, p: int, pv):
    """int_{-1}^1 P_k(s) ds / (s - z) for k < p; real-log principal value where ``pv``."""
    zp = np.asarray(zp, dtype=complex)
    out = np.empty(zp.shape + (p,), dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        q0 = np.log((1 - zp) / (-1 - zp))
        q0 = np.where(pv, np.log(np.abs((1 - zp) / (1 + zp))), q0)
    out[..., 0] = q0
    if p > 1:
        out[..., 1] = 2 + zp * q0
    for k in range(1, p - 1):
        out[..., k + 1] = ((2 * k + 1) * zp * out[..., k] - k * out[..., k - 1]) / (k + 1)
    return out


class RayQuadrature:
    """Composite Gauss-Legendre rule on (0, T] with Cauchy-transform matrices."""

    def __init__(self, edges, order: int = 16):
        self.edges = np.asarray(edges, dtype=float)
        if np.any(np.diff(self.edges) <= 0) or self.edges[0] < 0:
            raise ValueError("panel edges must be increasing and non-negative")
        self.order = order
        s, w = leggauss(order)
        self._s, self._w = s, w
        a, b = self.edges[:-1], self.edges[1:]
        self.centers = (a + b) / 2
        self.halves = (b - a) / 2
        self.t = (self.centers[:, None] + self.halves[:, None] * s[None, :]).ravel()
        self.w = (self.halves[:, None] * w[None, :]).ravel()
        # node values -> Legendre coefficients on one panel
        V = legvander(s, order - 1)
        self._to_coef = ((2 * np.arange(order) + 1) / 2)[:, None] * (V.T * w[None, :])

    @classmethod
    def default(cls, n_tau: int = 400, order: int = 16, T: float = 1000.0) -> "RayQuadrature":
        return cls(default_edges(n_tau, order, T), order)

    @classmethod
    def from_nodes(cls, t, order: int = 16, rtol: float = 1e-9) -> "RayQuadrature":
        """Recover the panel layout from its nodes; ValueError if t is not such a grid."""
        t = np.sort(np.asarray(t, dtype=float))
        if len(t) == 0 or len(t) % order:
            raise ValueError("node count is not a multiple of the panel order")
        s, _ = leggauss(order)
        g = t.reshape(-1, order)
        c = (g[:, 0] + g[:, -1]) / 2
        h = (g[:, -1] - c) / s[-1]
        if not np.allclose(c[:, None] + h[:, None] * s[None, :], g, rtol=rtol, atol=0):
            raise ValueError("nodes are not Gauss-Legendre panels")
        left, right = c - h, c + h
        if not np.allclose(left[1:], right[:-1], rtol=1e-7, atol=1e-14):
            raise ValueError("panels are not contiguous")
        edges = np.concatenate([[max(0.0, left[0])], right])
        if abs(left[0]) > 1e-12 * max(1.0, right[0]):
            raise ValueError("first panel must start at 0")
        return cls(edges, order)

    @property
    def n(self) -> int:
        return len(self.t)

    @property
    def T(self) -> float:
        return float(self.edges[-1])

    def cauchy(self, z, pv: bool = False, near: float = 1.2) -> np.ndarray:
        """Matrix W with W @ f = 1/(2 pi i) int_0^T f(tau) dtau / (tau - z) at each z.

        With ``pv`` set, targets lying on the axis inside a panel get the
        principal value.
        """
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        p = self.order
        zp = (z[:, None] - self.centers[None, :]) / self.halves[None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            W = self._w[None, None, :] / (self._s[None, None, :] - zp[:, :, None])
        dist = np.where(np.abs(zp.real) <= 1, np.abs(zp.imag), np.abs(zp - np.sign(zp.real)))
        iz, ip = np.nonzero(dist < near)
        if len(iz):
            zz = zp[iz, ip]
            on_axis = (np.abs(zz.imag) < 1e-12) & (np.abs(zz.real) < 1)
            if pv:
                zz = np.where(on_axis, zz.real + 0j, zz)
                mask = on_axis
            else:
                if np.any(on_axis):
                    raise OnContour("target lies on the integration axis")
                mask = np.zeros(len(zz), bool)
            W[iz, ip, :] = _legendre_cauchy_moments(zz, p, mask) @ self._to_coef
        return W.reshape(len(z), -1) / TWO_PI_I

    def integrate(self, f) -> complex:
        return complex(np.sum(self.w * f))


# ---------------------------------------------------------------------------
# data on the contour

def _free_d(t, x):
    """d(-i t, x) for the zero potential."""
    return -Z3 * np.exp(-1j * SQRT3 * t * x)


def sigma_from_data(data: ScatteringData, quad: RayQuadrature) -> np.ndarray:
    """conj(s_2(i zeta_2 t)) at the quadrature nodes.

    i zeta_2 t lies on the sampled line through -i zeta_2 at parameter -t.  When
    the data grid is not the quadrature grid the samples are interpolated in
    log t (real and imaginary parts separately).
    """
    neg = data.t < 0
    tt = -data.t[neg][::-1]
    vals = data.s2[1][neg][::-1]
    if len(tt) == quad.n and np.allclose(tt, quad.t, rtol=1e-10, atol=0):
        s = vals
    else:
        lt = np.log(tt)
        lq = np.log(np.clip(quad.t, tt[0], tt[-1]))
        s = np.interp(lq, lt, vals.real) + 1j * np.interp(lq, lt, vals.imag)
    return np.conj(s)


def quadrature_for(data: ScatteringData, order: int = 16) -> RayQuadrature:
    tpos = data.t[data.t > 0]
    try:
        return RayQuadrature.from_nodes(tpos, order)
    except ValueError:
        logger.info("data grid is not a panel grid; interpolating onto the default quadrature")
        return RayQuadrature.default(len(tpos), order, float(np.max(np.abs(data.t))))


def d_on_contour(sigma, t, x):
    """d(-i t, x) = -zeta_2 e^{-i sqrt3 t x} s_2*(-i zeta_3 t)."""
    return -Z2 * np.exp(-1j * SQRT3 * t * x) * sigma


# ---------------------------------------------------------------------------
# canonical function

@dataclass
class CanonicalSolution:
    """chi(lam) = exp(C[ln dhat](i lam)) with dhat = d / d_free.

    ln d itself does not decay (d tends to the free value, which has modulus 1
    and a phase linear in t), so the free factor is divided out before taking
    the logarithm.  The tail beyond T is modelled as ln dhat ~ A / t^2.
    """

    x: float
    quad: RayQuadrature
    log_d: np.ndarray
    tail_coef: complex
    winding: float

    def _tail(self, z):
        # int_T^inf A/tau^2 / (tau - z) dtau with tau = T/s
        s, w = leggauss(24)
        s = (s + 1) / 2
        w = w / 2
        T = self.quad.T
        z = np.atleast_1d(z)[:, None]
        vals = (self.tail_coef / T) * np.sum(w * s / (T - z * s), axis=1)
        return vals / TWO_PI_I

    def log_chi(self, lam) -> np.ndarray:
        lam = np.atleast_1d(np.asarray(lam, dtype=complex))
        z = 1j * lam
        return self.quad.cauchy(z) @ self.log_d + self._tail(z)

    def __call__(self, lam):
        out = np.exp(self.log_chi(lam))
        return out if np.ndim(lam) else complex(out[0])


def canonical_chi(sigma, x: float, quad: RayQuadrature, branch_limit: float = np.pi / 2) -> CanonicalSolution:
    """Build the canonical function from sigma = conj(s_2(i zeta_2 t)) on the nodes."""
    t = quad.t
    d = d_on_contour(np.asarray(sigma), t, x)
    if np.any(np.abs(d) < 1e-300) or not np.all(np.isfinite(d)):
        raise ZeroOnContour("d vanishes or is not finite on the contour")
    ratio = d / _free_d(t, x)
    # continue the branch from the far end, where ratio -> 1
    un = np.unwrap(np.angle(ratio)[::-1])[::-1]
    if abs(un[-1]) > 1.0:
        raise BranchJump("d does not approach its free value at the end of the contour")
    if np.max(np.abs(np.diff(un))) > branch_limit:
        raise BranchJump("ln d changes by more than the branch limit between adjacent nodes")
    winding = float(np.round((un[0] - np.angle(ratio[0])) / (2 * np.pi)))
    if winding != 0:
        raise BranchJump(f"d winds {winding:+.0f} times along the contour")
    log_d = np.log(np.abs(ratio)) + 1j * un
    A = log_d[-1] * t[-1] ** 2
    return CanonicalSolution(float(x), quad, log_d, complex(A), winding)


def chi_jump_residual(chi: CanonicalSolution, sigma, t, eps: float = 1e-8) -> float:
    """max |chi(-i t + eps t) / chi(-i t - eps t) - dhat(t)| at the given t.

    The boundary values are taken just off the ray -i t (the offset scales
    with t); dhat = d / d_free is interpolated from the nodes in log t.
    """
    t = np.asarray(t, dtype=float)
    lam = -1j * t
    ratio = np.exp(chi.log_chi(lam + eps * t) - chi.log_chi(lam - eps * t))
    qt = chi.quad.t
    dhat = d_on_contour(np.asarray(sigma), qt, chi.x) / _free_d(qt, chi.x)
    lt = np.log(t)
    want = np.interp(lt, np.log(qt), dhat.real) + 1j * np.interp(lt, np.log(qt), dhat.imag)
    return float(np.max(np.abs(ratio - want)))


# ---------------------------------------------------------------------------
# jump data

@dataclass
class JumpData:
    x: float
    t: np.ndarray
    c2: np.ndarray          # c_2(-i zeta_2 t, x)
    c3: np.ndarray          # c_3(-i zeta_3 t, x)
    Q2: np.ndarray
    Q3: np.ndarray
    chi_z2: np.ndarray      # chi(-i zeta_2 t, x)
    chi_z3: np.ndarray      # chi(-i zeta_3 t, x)

    @property
    def product_residual(self) -> float:
        return float(np.max(np.abs(self.Q2 * self.Q3 - 1)))


def jump_data(sigma, x: float, quad: RayQuadrature, chi: CanonicalSolution | None = None) -> JumpData:
    """c_2, c_3 on their rays and the coefficients Q_2, Q_3 of the singular system.

    s_2*(-i zeta_3 t) = sigma(t); s_3*(-i zeta_2 t) = 1/sigma(t) by s_2(lam zeta_3) s_3(lam) = 1.
    """
    chi = chi or canonical_chi(sigma, x, quad)
    t = quad.t
    sigma = np.asarray(sigma)
    chi2 = chi(-1j * Z2 * t)
    chi3 = chi(-1j * Z3 * t)
    c2 = sigma / chi2 * np.exp(-1j * SQRT3 * t * x)
    c3 = (1 / sigma) / chi3 * np.exp(1j * SQRT3 * t * x)
    Q2 = 1 / (c2 * chi3)
    Q3 = 1 / (c3 * chi2)
    return JumpData(float(x), t, c2, c3, Q2, Q3, chi2, chi3)


def coupling_matrices(Q2, Q3) -> dict:
    """P, B = (P+I)^{-1}(P-I), the closed form quoted with prefactor 1/13, and det(P +- I)."""
    P = np.array([[0.5, Z2 * Q2], [-Z3 * Q3, 0.5]], dtype=complex)
    I = np.eye(2)
    B = np.linalg.solve(P + I, P - I)
    quoted = np.array([[1, 8 * Z2 * Q2], [-8 * Z3 * Q3, 1]]) / 13
    return {"P": P, "B": B, "B_quoted": quoted,
            "det_plus": complex(np.linalg.det(P + I)), "det_minus": complex(np.linalg.det(P - I))}


# ---------------------------------------------------------------------------
# the singular system

@dataclass
class CauchyBlocks:
    """x-independent Cauchy matrices of the system."""

    pv: np.ndarray      # C[f](t), principal value
    z3: np.ndarray      # C[f](zeta_3 t)
    z2: np.ndarray      # C[f](zeta_2 t)

    @classmethod
    def build(cls, quad: RayQuadrature) -> "CauchyBlocks":
        t = quad.t
        return cls(quad.cauchy(t, pv=True), quad.cauchy(Z3 * t), quad.cauchy(Z2 * t))


@dataclass
class SingularSystem:
    x: float
    quad: RayQuadrature
    jumps: JumpData
    chi: CanonicalSolution
    kappas: np.ndarray
    theta: np.ndarray          # theta_m
    theta_t: np.ndarray        # theta~_m
    A: np.ndarray              # z_k, z~_k at the bound-state rows
    phi_rows: np.ndarray       # rows of vec(phi_2) - vec(phi_3) acting on [phi_2, phi_3]
    zrows: np.ndarray          # b(lam) at the contour rows as a linear map of R
    matrix: np.ndarray
    rhs: np.ndarray
    blocks: CauchyBlocks

    @property
    def M(self) -> int:
        return self.quad.n

    @property
    def N(self) -> int:
        return len(self.kappas)

    def condition(self) -> float:
        return float(np.linalg.cond(self.matrix))


def _z_vector(lam, kappas, chi: CanonicalSolution) -> np.ndarray:
    """[z_1..z_N, z~_1..z~_N] at each lam (rows)."""
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    N = len(kappas)
    out = np.zeros((len(lam), 2 * N), dtype=complex)
    for n, k in enumerate(kappas):
        a1, a2 = chi(k), chi(Z3 * k)
        b1, b2 = chi(-k), chi(-Z2 * k)
        out[:, n] = 1 / (a1 * (lam - k)) + 1 / (a2 * (lam - Z3 * k))
        out[:, N + n] = 1 / (b1 * (lam + k)) + 1 / (b2 * (lam + Z2 * k))
    return out


def assemble_system(data: ScatteringData, x: float, quad: RayQuadrature | None = None,
                    blocks: CauchyBlocks | None = None, sigma=None) -> SingularSystem:
    """Dense system for [phi_2, phi_3, R, R~] of size 2M + 2N."""
    quad = quad or quadrature_for(data)
    blocks = blocks or CauchyBlocks.build(quad)
    sigma = sigma_from_data(data, quad) if sigma is None else np.asarray(sigma)
    chi = canonical_chi(sigma, x, quad)
    jd = jump_data(sigma, x, quad, chi)
    t = quad.t
    M = quad.n
    kap = np.asarray(data.kappas, dtype=float)
    N = len(kap)

    # rows at -i zeta_2 t and -i zeta_3 t
    top = np.hstack([np.diag(jd.Q3) + Z3 * blocks.z3, -Z2 / 2 * np.eye(M) - Z2 * blocks.pv])
    bot = np.hstack([Z3 / 2 * np.eye(M) + Z3 * blocks.pv, np.diag(jd.Q2) - Z2 * blocks.z2])
    zrows = np.vstack([_z_vector(-1j * Z2 * t, kap, chi), _z_vector(-1j * Z3 * t, kap, chi)])

    theta = np.array([Z3 * np.exp(-SQRT3 * Z3 * k * x) * b * chi(k) / chi(Z2 * k)
                      for k, b in zip(kap, data.b)], dtype=complex)
    theta_t = np.array([Z2 * np.exp(-SQRT3 * Z2 * k * x) * bt * chi(-k) / chi(-Z3 * k)
                        for k, bt in zip(kap, data.b_tilde)], dtype=complex)
    if N:
        A = np.vstack([_z_vector(Z2 * kap, kap, chi), _z_vector(-Z3 * kap, kap, chi)])
        r2 = np.vstack([Z3 * quad.cauchy(1j * Z3 * kap), Z3 * quad.cauchy(-1j * kap)])
        r3 = np.vstack([Z2 * quad.cauchy(1j * kap), Z2 * quad.cauchy(-1j * Z2 * kap)])
        phi_rows = np.hstack([r2, -r3])
    else:
        A = np.zeros((0, 0), dtype=complex)
        phi_rows = np.zeros((0, 2 * M), dtype=complex)
    D = np.diag(np.concatenate([theta, theta_t]))

    matrix = np.zeros((2 * M + 2 * N, 2 * M + 2 * N), dtype=complex)
    matrix[:2 * M, :2 * M] = np.vstack([top, bot])
    matrix[:2 * M, 2 * M:] = -zrows
    matrix[2 * M:, :2 * M] = phi_rows
    matrix[2 * M:, 2 * M:] = -(A + D)
    rhs = np.ones(2 * M + 2 * N, dtype=complex)
    if not np.all(np.isfinite(matrix)):
        raise SingularMatrix("system matrix has non-finite entries")
    return SingularSystem(float(x), quad, jd, chi, kap, theta, theta_t, A, phi_rows, zrows,
                          matrix, rhs, blocks)


@dataclass
class SystemSolution:
    phi2: np.ndarray
    phi3: np.ndarray
    R: np.ndarray
    R_tilde: np.ndarray
    residual: float
    method: str
    system: SingularSystem = field(repr=False)

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.phi2, self.phi3, self.R, self.R_tilde])


def _check_residual(sys: SingularSystem, v, tol):
    res = float(np.max(np.abs(sys.matrix @ v - sys.rhs)))
    if res > tol:
        raise ResidualTooLarge(f"linear residual {res:.3e} exceeds {tol:.1e}")
    return res


def solve_system(sys: SingularSystem, method: str = "monolithic", tol: float = 1e-6,
                 cond_limit: float = 1e13) -> SystemSolution:
    """Solve by LU on the whole system or by eliminating the bound-state unknowns first.

    The elimination route solves (A + D) R = Phi_2 phi_2 - Phi_3 phi_3 - e for R,
    substitutes b = <R, z> into the contour rows and keeps b_0 = -<(A+D)^{-1} e, z>
    exactly.
    """
    M, N = sys.M, sys.N
    if method == "monolithic":
        try:
            lu = lu_factor(sys.matrix, check_finite=True)
        except ValueError as exc:
            raise SingularMatrix(str(exc)) from exc
        if np.min(np.abs(np.diag(lu[0]))) == 0:
            raise SingularMatrix("exactly singular system matrix")
        v = lu_solve(lu, sys.rhs)
    elif method == "elimination":
        if N == 0:
            return replace(solve_system(sys, "monolithic", tol, cond_limit), method="elimination")
        AD = sys.A + np.diag(np.concatenate([sys.theta, sys.theta_t]))
        c = np.linalg.cond(AD)
        if not np.isfinite(c) or c > cond_limit:
            raise SingularMatrix(f"A + D is ill-conditioned (cond {c:.2e})")
        G = np.linalg.solve(AD, sys.phi_rows)          # R = G phi - h
        h = np.linalg.solve(AD, np.ones(2 * N))
        reduced = sys.matrix[:2 * M, :2 * M] - sys.zrows @ G
        rhs = np.ones(2 * M) - sys.zrows @ h           # b_0 moved to the right
        phi = np.linalg.solve(reduced, rhs)
        R = G @ phi - h
        v = np.concatenate([phi, R])
    else:
        raise ValueError(f"unknown method {method!r}")
    if not np.all(np.isfinite(v)):
        raise SingularMatrix("solution is not finite")
    res = _check_residual(sys, v, tol)
    return SystemSolution(v[:M], v[M:2 * M], v[2 * M:2 * M + N], v[2 * M + N:], res, method, sys)


def b_rational(sol: SystemSolution, lam) -> np.ndarray:
    """b(lam, x) = sum R_n z_n + sum R~_n z~_n."""
    sys = sol.system
    if sys.N == 0:
        return np.zeros(np.shape(np.atleast_1d(lam)), dtype=complex)
    return _z_vector(lam, sys.kappas, sys.chi) @ np.concatenate([sol.R, sol.R_tilde])


def reconstruct_psi1(sol: SystemSolution, lam) -> np.ndarray:
    """psi_1(lam) = chi(lam) [1 + b + zeta_2 C[phi_3](i zeta_3 lam) - zeta_3 C[phi_2](i zeta_2 lam)]."""
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    quad = sol.system.quad
    ang = np.angle(lam)
    if np.any(np.abs(lam) == 0) or np.any((ang <= np.pi / 6 + 1e-12) | (ang >= 5 * np.pi / 6 - 1e-12)):
        raise OnContour("psi_1 is reconstructed strictly inside the upper sector only")
    inner = (1 + b_rational(sol, lam)
             + Z2 * (quad.cauchy(1j * Z3 * lam) @ sol.phi3)
             - Z3 * (quad.cauchy(1j * Z2 * lam) @ sol.phi2))
    return sol.system.chi(lam) * inner


def probe_values(sol: SystemSolution, moduli) -> np.ndarray:
    """P estimates 3 lam^2 (psi_1 - 1)/i at lam = i R."""
    lam = 1j * np.asarray(moduli, dtype=float)
    return 3 * lam ** 2 * (reconstruct_psi1(sol, lam) - 1) / 1j


def richardson(moduli, values, tol: float = 0.05, scale: float = 1e-3) -> tuple:
    """Extrapolate P(R) = P + c_1/R^2 + c_2/R^4 + ... to R = infinity.

    Uses every available order (at most len-1 correction terms) and compares
    with the estimate one order lower; their difference is the reported
    uncertainty.  Raises ExtrapolationUnstable when it exceeds
    tol * max(|P|, scale).
    """
    R = np.asarray(moduli, dtype=float)
    v = np.asarray(values, dtype=complex)
    if len(R) < 2:
        return complex(v[0]), float("inf")
    u = 1 / R ** 2

    def fit(k):
        V = np.vander(u, k + 1, increasing=True)
        return np.linalg.lstsq(V, v, rcond=None)[0][0]

    k = min(len(R) - 1, 3)
    hi, lo = fit(k), fit(k - 1)
    err = abs(hi - lo)
    if err > tol * max(abs(hi), scale):
        raise ExtrapolationUnstable(f"probe estimates disagree by {err:.3e}")
    return complex(hi), float(err)


@dataclass
class RecoveredPotential:
    x: np.ndarray
    q: np.ndarray
    P: np.ndarray
    residual: np.ndarray
    diagnostics: list

    def imag_ratio(self) -> float:
        return float(np.max(np.abs(self.q.imag)) / max(np.max(np.abs(self.q.real)), 1e-300))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "q", "P", "residual"])
            for row in zip(self.x, self.q.real, self.P.real, self.residual):
                w.writerow([f"{v:.12g}" for v in row])


DEFAULT_PROBES = (6.0, 9.0, 13.0, 20.0)


def smoothed_derivative(y, x) -> np.ndarray:
    """5-point least-squares (quadratic) derivative on a uniform grid."""
    h = float(x[1] - x[0])
    if len(y) < 5:
        return np.gradient(y, h)
    y = np.asarray(y)
    if np.iscomplexobj(y):
        return smoothed_derivative(y.real, x) + 1j * smoothed_derivative(y.imag, x)
    return savgol_filter(y, 5, 2, deriv=1, delta=h, mode="interp")


def recover_potential(data: ScatteringData, x, probes=DEFAULT_PROBES, method: str = "monolithic",
                      tol: float = 1e-6, extrapolation_tol: float = 0.05,
                      strict: bool = False) -> RecoveredPotential:
    """Solve the system at each x and read P(x) off the probe values of psi_1.

    q = -dP/dx by a smoothed 5-point derivative.  With ``strict`` unstable
    extrapolation raises; otherwise it is recorded in the diagnostics.
    """
    x = np.asarray(x, dtype=float)
    quad = quadrature_for(data)
    blocks = CauchyBlocks.build(quad)
    sigma = sigma_from_data(data, quad)
    P = np.empty(len(x), dtype=complex)
    res = np.empty(len(x))
    diags = []
    for i, xi in enumerate(x):
        sys = assemble_system(data, xi, quad, blocks, sigma)
        sol = solve_system(sys, method, tol)
        vals = probe_values(sol, probes)
        try:
            P[i], err = richardson(probes, vals, extrapolation_tol)
            stable = True
        except ExtrapolationUnstable:
            if strict:
                raise
            P[i], err = richardson(probes, vals, np.inf)
            stable = False
        res[i] = sol.residual
        diags.append({"x": float(xi), "residual": sol.residual, "extrapolation_error": err,
                      "stable": stable, "chi_winding": sys.chi.winding,
                      "Q_product": sys.jumps.product_residual})
    q = -smoothed_derivative(P, x)
    return RecoveredPotential(x, q, P, res, diags)


# ---------------------------------------------------------------------------
# direct-problem diagnostics: jump identities from forward solutions

class JumpFunctions:
    """f_{p,s}, g_{p,s}, psi_p and the scattering coefficients of a known potential."""

    def __init__(self, q: SampledPotential, alpha: float = 1.0, beta: float = 0.0):
        self.q = q
        self.alpha, self.beta = alpha, beta
        self.x = q.uniform().grid
        self._cache = {}

    def _omega(self, lam, p, s):
        key = ("om", complex(lam), p, s)
        if key not in self._cache:
            B = expansion_coefficients(self.q, lam)
            w = cauchy_solve(self.q, lam, self.alpha, self.beta)
            e = jost_solve(self.q, lam, s)
            self._cache[key] = (w.w * e.de - w.dw * e.e) / B[p - 1]
        return self._cache[key]

    def omega_star(self, lam, p, s):
        return np.conj(self._omega(np.conj(complex(lam)), p, s))

    def s_star(self, lam):
        """(s_2*(lam), s_3*(lam))."""
        B = expansion_coefficients(self.q, np.conj(complex(lam)))
        return np.conj(B[1] / B[0]), np.conj(B[2] / B[0])

    def psi(self, lam, p):
        return jost_solve(self.q, complex(lam), p).psi

    def piece(self, name, lam):
        lam = complex(lam)
        x = self.x
        r = SQRT3 * lam
        table = {
            "f12": (Z3 / r, Z2, (1, 2)), "f23": (Z1 / r, Z1, (2, 3)), "f31": (Z2 / r, Z3, (3, 1)),
            "g13": (-Z2 / r, Z3, (1, 3)), "g21": (-Z3 / r, Z2, (2, 1)), "g32": (-Z1 / r, Z1, (3, 2)),
        }
        c, zz, (p, s) = table[name]
        return c * np.exp(-1j * lam * zz * x) * self.omega_star(lam, p, s)

    def jump_pairs(self, lam):
        """(lhs, rhs) of the six jump identities at lam."""
        lam = complex(lam)
        x = self.x
        ps = {p: self.psi(lam, p) for p in (1, 2, 3)}
        s_l, s_l3, s_l2 = self.s_star(lam), self.s_star(lam * Z3), self.s_star(lam * Z2)
        return {
            "f12": (Z3 * s_l[1] * np.exp(1j * lam * (Z1 - Z2) * x) * ps[1], ps[2] - self.piece("f12", lam)),
            "f23": (Z3 * s_l3[1] * np.exp(1j * lam * (Z3 - Z1) * x) * ps[3], ps[1] - self.piece("f23", lam)),
            "f31": (Z3 * s_l2[1] * np.exp(1j * lam * (Z2 - Z3) * x) * ps[2], ps[3] - self.piece("f31", lam)),
            "g13": (Z2 * s_l[0] * np.exp(1j * lam * (Z1 - Z3) * x) * ps[1], ps[3] - self.piece("g13", lam)),
            "g21": (Z2 * s_l3[0] * np.exp(1j * lam * (Z3 - Z2) * x) * ps[3], ps[2] - self.piece("g21", lam)),
            "g32": (Z2 * s_l2[0] * np.exp(1j * lam * (Z2 - Z1) * x) * ps[2], ps[1] - self.piece("g32", lam)),
        }


def _rel(a, b):
    return float(np.max(np.abs(a - b)) / max(1.0, float(np.max(np.abs(b)))))


def jump_residuals(q: SampledPotential, t=None, alpha: float = 1.0, beta: float = 0.0) -> dict:
    """Largest residuals of the jump identities on the contour rays.

    Keys: the six jumps (each checked on all three rays -i zeta_k t), the
    gluing of boundary values on the rays i zeta_3 t / i zeta_2 t, and the
    relation G_2 = d F_3 on the ray -i t.  Residuals are relative to
    max(1, |rhs|) over the x grid.
    """
    jf = JumpFunctions(q, alpha, beta)
    t = np.asarray([0.3, 0.8, 1.7, 3.0] if t is None else t, dtype=float)
    out = {}
    for tt in t:
        for d in DIRECTIONS:
            for k, (lhs, rhs) in jf.jump_pairs(tt * d).items():
                out[k] = max(out.get(k, 0.0), _rel(lhs, rhs))
        g = jf.piece("g32", 1j * Z3 * tt), jf.piece("g21", 1j * Z2 * tt)
        f = jf.piece("f23", 1j * Z2 * tt), jf.piece("f31", 1j * Z3 * tt)
        out["glue_g"] = max(out.get("glue_g", 0.0), _rel(*g))
        out["glue_f"] = max(out.get("glue_f", 0.0), _rel(*f))
        lam = -1j * tt
        dval = -Z2 * np.exp(lam * SQRT3 * jf.x) * jf.s_star(lam * Z3)[0]
        G2 = jf.piece("g21", lam)
        F3 = jf.piece("f31", lam)
        out["ray_relation"] = max(out.get("ray_relation", 0.0), _rel(G2, dval * F3))
    return out


def holomorphy_defect(q: SampledPotential, lam: complex, h: float = 1e-4, reflected: bool = True,
                      ix: int | None = None) -> float:
    """Cauchy-Riemann defect |dF/dlam_bar| / |dF/dlam| of a lower piece at lam.

    ``reflected=True`` uses g_21(-conj lam) as in the piecewise definition of G_2;
    ``False`` uses g_21(lam) itself, which is holomorphic.
    """
    jf = JumpFunctions(q)
    ix = len(jf.x) // 8 if ix is None else ix

    def F(z):
        if reflected:
            return jf.piece("g21", -np.conj(z))[ix]
        return jf.piece("g21", z)[ix]

    dx = (F(lam + h) - F(lam - h)) / (2 * h)
    dy = (F(lam + 1j * h) - F(lam - 1j * h)) / (2 * h)
    d_lam = (dx - 1j * dy) / 2
    d_bar = (dx + 1j * dy) / 2
    return float(abs(d_bar) / max(abs(d_lam), 1e-300))


def rotation_residuals(q: SampledPotential, lams) -> dict:
    """g_21(lam zeta_3) - g_32(lam) and f_31(lam) - f_23(lam zeta_3) at each lam."""
    jf = JumpFunctions(q)
    g = max(_rel(jf.piece("g21", l * Z3), jf.piece("g32", l)) for l in lams)
    f = max(_rel(jf.piece("f31", l), jf.piece("f23", l * Z3)) for l in lams)
    return {"g": g, "f": f}
