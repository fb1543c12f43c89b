"""Forward scattering map: expansion, scattering and matching coefficients.

The solution w of the Cauchy problem w(0)=0, w'(0)=alpha, w''(0)=beta is
expanded in the Jost basis, w = B_1 e_1 + B_2 e_2 + B_3 e_3.  The
coefficients only need the Jost data at x = 0 evaluated at conj(lam):

    B_1 = zeta_1/(3 lam^2) (alpha e_1*'(lam,0) - beta e_1*(lam,0))
    B_2 = zeta_2/(3 lam^2) (alpha e_3*'(lam,0) - beta e_3*(lam,0))
    B_3 = zeta_3/(3 lam^2) (alpha e_2*'(lam,0) - beta e_2*(lam,0))

with f*(lam) = conj(f(conj(lam))).  Then s_2 = B_2/B_1, s_3 = B_3/B_1 and
c_1 = C/B_1.
"""
from __future__ import annotations

import cmath
import json
import logging
from dataclasses import dataclass, field

import numpy as np

from .raygeom import SQRT3, ZETA
from .volterra import SampledPotential, cauchy_solve, jost_solve

logger = logging.getLogger(__name__)

Z1, Z2, Z3 = ZETA


class ZeroDenominator(ArithmeticError):
    """B_1(lam) vanishes, so the scattering coefficients are undefined at lam."""


class InvalidScatteringData(ValueError):
    """Scattering data violating one of the admissibility conditions.

    ``condition`` is the roman numeral of the violated condition.
    """

    def __init__(self, condition: str, message: str):
        super().__init__(f"condition ({condition}) violated: {message}")
        self.condition = condition


@dataclass(frozen=True)
class BoundaryData:
    """Cauchy data (alpha, beta) of w and the boundary parameter theta.

    C defaults to conj(theta) * alpha, which is the only value for which the
    two representations of s_2 agree.
    """

    alpha: float = 1.0
    beta: float = 0.0
    theta: complex = 1.0
    C: complex | None = None

    def __post_init__(self):
        if abs(abs(complex(self.theta)) - 1) > 1e-12:
            raise ValueError("theta must be unimodular")
        if not (np.isreal(self.alpha) and np.isreal(self.beta)):
            raise ValueError("alpha and beta must be real")
        if self.C is None:
            object.__setattr__(self, "C", complex(np.conj(self.theta) * self.alpha))

    @property
    def consistent(self) -> bool:
        return abs(complex(self.theta) * complex(self.C) - self.alpha) <= 1e-12 * max(1, abs(self.alpha))

    @classmethod
    def from_theta_arg(cls, alpha=1.0, beta=0.0, theta_arg=0.0):
        return cls(alpha, beta, cmath.exp(1j * theta_arg))


DEFAULT_BD = BoundaryData()


# ---------------------------------------------------------------------------
# Jost data at the origin

@dataclass(frozen=True)
class JostTriple:
    """e_p(lam, 0) and e_p'(lam, 0) for p = 1, 2, 3 (index 0 holds p = 1)."""

    lam: complex
    e: tuple
    de: tuple

    def star(self) -> "JostTriple":
        """Conjugated values; the triple at conj(lam) gives e_p*(lam, 0)."""
        return JostTriple(complex(np.conj(self.lam)),
                          tuple(complex(np.conj(v)) for v in self.e),
                          tuple(complex(np.conj(v)) for v in self.de))


def jost_at_origin(q: SampledPotential, lam: complex, which=(1, 2, 3), **kw) -> JostTriple:
    """Jost data at x = 0; indices not in ``which`` are left as nan."""
    e, de = [complex("nan")] * 3, [complex("nan")] * 3
    for p in which:
        v = jost_solve(q, lam, p, **kw).at0()
        e[p - 1], de[p - 1] = v[0], v[1]
    return JostTriple(complex(lam), tuple(e), tuple(de))


def star_at_origin(q: SampledPotential, lam: complex, which=(1, 2, 3), **kw) -> JostTriple:
    """e_p*(lam, 0), e_p*'(lam, 0): Jost data at conj(lam), conjugated."""
    return jost_at_origin(q, np.conj(complex(lam)), which, **kw).star()


def _combos(st: JostTriple, bd: BoundaryData):
    return [bd.alpha * st.de[i] - bd.beta * st.e[i] for i in range(3)]


def coefficients_from_star(st: JostTriple, lam: complex, bd: BoundaryData = DEFAULT_BD):
    lam = complex(lam)
    if lam == 0:
        raise ZeroDivisionError("expansion coefficients are undefined at lam = 0")
    m = _combos(st, bd)
    f = 1 / (3 * lam ** 2)
    return Z1 * f * m[0], Z2 * f * m[2], Z3 * f * m[1]


def expansion_coefficients(q: SampledPotential, lam: complex, bd: BoundaryData = DEFAULT_BD, **kw):
    """(B_1, B_2, B_3) at lam."""
    lam = complex(lam)
    if lam == 0:
        raise ZeroDivisionError("expansion coefficients are undefined at lam = 0")
    return coefficients_from_star(star_at_origin(q, lam, **kw), lam, bd)


def expansion_residual(q: SampledPotential, lam: complex, bd: BoundaryData = DEFAULT_BD) -> float:
    """max_x |w - sum B_p e_p| / max_x |w| on q's grid."""
    lam = complex(lam)
    B = expansion_coefficients(q, lam, bd)
    sols = [jost_solve(q, lam, p) for p in (1, 2, 3)]
    w = cauchy_solve(q, lam, bd.alpha, bd.beta)
    rec = sum(b * s.e for b, s in zip(B, sols))
    return float(np.max(np.abs(rec - w.w)) / max(np.max(np.abs(w.w)), 1e-300))


# ---------------------------------------------------------------------------
# scattering coefficients

@dataclass(frozen=True)
class PointCoefficients:
    lam: complex
    B: tuple
    s2: complex
    s3: complex
    c1: complex
    s2_alt: complex       # s_2 from the Wronskian representation
    s3_alt: complex

    @property
    def representation_gap(self) -> float:
        return max(abs(self.s2 - self.s2_alt), abs(self.s3 - self.s3_alt))


def _point(lam, here: JostTriple, st: JostTriple, bd: BoundaryData) -> PointCoefficients:
    B1, B2, B3 = coefficients_from_star(st, lam, bd)
    # compare with the free value |B_1| = |alpha|/(3|lam|)
    scale = (abs(bd.alpha) + abs(bd.beta) / abs(lam)) / (3 * abs(lam))
    if abs(B1) <= 1e-14 * scale:
        raise ZeroDenominator(f"B_1 vanishes at lam = {lam}")
    s2, s3, c1 = B2 / B1, B3 / B1, bd.C / B1
    # representation through the Wronskian system at x = 0
    r = SQRT3 * lam
    den = r * Z1 * st.e[0]
    if den == 0:
        s2a = s3a = complex("nan")
    else:
        s2a = (r * Z2 * st.e[2] - bd.theta * c1 * here.e[2]) / den
        s3a = (r * Z3 * st.e[1] + bd.theta * c1 * here.e[1]) / den
    return PointCoefficients(lam, (B1, B2, B3), s2, s3, c1, s2a, s3a)


def scattering_coefficients(q: SampledPotential, lam: complex, bd: BoundaryData = DEFAULT_BD,
                            full: bool = False, **kw):
    """(s_2, s_3, c_1) at lam; ``full=True`` returns the PointCoefficients record."""
    lam = complex(lam)
    if lam == 0:
        raise ZeroDivisionError("scattering coefficients are undefined at lam = 0")
    here = jost_at_origin(q, lam, **kw)
    st = star_at_origin(q, lam, **kw)
    pc = _point(lam, here, st, bd)
    return pc if full else (pc.s2, pc.s3, pc.c1)


def wronskian_system_residuals(q: SampledPotential, lam: complex, bd: BoundaryData = DEFAULT_BD) -> float:
    """Largest residual of the three Wronskian equations at x = 0, relative to sqrt(3)|lam|."""
    lam = complex(lam)
    here = jost_at_origin(q, lam)
    st = star_at_origin(q, lam)
    pc = _point(lam, here, st, bd)
    r = SQRT3 * lam
    e, es = here.e, st.e
    tc = bd.theta * pc.c1
    res = [-r * Z3 * es[1] * pc.s2 + r * Z2 * es[2] * pc.s3 + tc * e[0],
           -r * Z1 * es[0] * pc.s3 + r * Z3 * es[1] + tc * e[1],
           r * Z1 * es[0] * pc.s2 - r * Z2 * es[2] + tc * e[2]]
    return max(abs(v) for v in res) / abs(r)


def unitarity_residual(s2, s3, c1, lam, s2_star, s3_star, c1_star) -> float:
    """|zeta_3 s2 s3* + zeta_2 s3 s2* + 1 - c1 c1*/(3 lam^2)|.

    The starred arguments are the coefficients at conj(lam), conjugated.
    """
    lam = complex(lam)
    if lam == 0:
        raise ZeroDivisionError("unitarity identity is undefined at lam = 0")
    lhs = Z3 * s2 * s3_star + Z2 * s3 * s2_star + 1
    return abs(lhs - c1 * c1_star / (3 * lam ** 2))


def unitarity_at(q: SampledPotential, lam: complex, bd: BoundaryData = DEFAULT_BD) -> float:
    lam = complex(lam)
    a = scattering_coefficients(q, lam, bd)
    b = scattering_coefficients(q, np.conj(lam), bd)
    return unitarity_residual(*a, lam, *(complex(np.conj(v)) for v in b))


def product_identity_residuals(q: SampledPotential, lam: complex, bd: BoundaryData = DEFAULT_BD):
    """Residuals of s2(l)s2(l z2)s2(l z3) = 1 and s2(l z3) s3(l) = 1."""
    lam = complex(lam)
    s = [scattering_coefficients(q, lam * z, bd) for z in ZETA]
    triple = s[0][0] * s[1][0] * s[2][0]
    return abs(triple - 1), abs(s[2][0] * s[0][1] - 1)


def wronskian_identity_residuals(q: SampledPotential, lam: complex) -> dict:
    """max_x |W_{p,s} - sqrt(3) lam zeta_r e_r*| for the three cyclic pairs.

    W_{1,2} pairs with zeta_3 e_2*, W_{2,3} with zeta_1 e_1* and W_{3,1} with
    zeta_2 e_3*.  Residuals are relative to sqrt(3)|lam| max|e_r*|.
    """
    from .volterra import wronskian

    lam = complex(lam)
    sols = [jost_solve(q, lam, p) for p in (1, 2, 3)]
    star = [np.conj(jost_solve(q, np.conj(lam), p).e) for p in (1, 2, 3)]
    out = {}
    for (p, s), (zr, r) in zip(((1, 2), (2, 3), (3, 1)), ((Z3, 2), (Z1, 1), (Z2, 3))):
        W = wronskian(sols[p - 1], sols[s - 1])
        rhs = SQRT3 * lam * zr * star[r - 1]
        scale = SQRT3 * abs(lam) * float(np.max(np.abs(star[r - 1])))
        out[f"W{p}{s}"] = float(np.max(np.abs(W - rhs)) / scale)
    return out


# ---------------------------------------------------------------------------
# bound states

@dataclass
class BoundStateSet:
    kappas: list = field(default_factory=list)
    b: list = field(default_factory=list)
    b_tilde: list = field(default_factory=list)
    anomalies: list = field(default_factory=list)

    @property
    def lambda_points(self) -> list:
        """lambda_n = -kappa zeta_3 and mu_n = kappa zeta_2 with their rotations."""
        pts = []
        for k in self.kappas:
            for base in (-k * Z3, k * Z2):
                pts.extend(base * z for z in ZETA)
        return pts

    @property
    def N(self) -> int:
        return len(self.kappas)


def _joint_measure(q, lam):
    s = jost_solve(q, lam, 1)
    e0, de0, _ = s.at0()
    return abs(e0), abs(de0) / max(abs(lam), 1e-300), e0, de0


def _richardson_derivative(f, z0: complex, direction: complex, h: float) -> complex:
    """d f/d lam at z0 from central differences along ``direction`` (|direction| = 1)."""
    def cd(step):
        return (f(z0 + step * direction) - f(z0 - step * direction)) / (2 * step * direction)
    d1, d2 = cd(h), cd(h / 2)
    return (4 * d2 - d1) / 3


def find_bound_states(q: SampledPotential, bd: BoundaryData = DEFAULT_BD, search_radius: float | None = None,
                      n_scan: int = 400, tol: float = 1e-8) -> BoundStateSet:
    """Joint zeros of e_1(lam, 0), e_1'(lam, 0) on the two rays of Omega_2.

    The rays lam = -kappa zeta_3 and lam = kappa zeta_2 are scanned for local
    minima of |e_1(lam, 0)|; each candidate is polished with a secant iteration
    restricted to the ray and kept only when e_1' vanishes as well.
    """
    from scipy.optimize import minimize_scalar

    if search_radius is None:
        search_radius = q.a / 3 if not q.compact else 10.0
    if not q.compact and search_radius > q.a / 3:
        raise ValueError("search radius exceeds a/3 for a non-compact potential")
    out = BoundStateSet()
    if not np.any(q.values):
        return out
    kap = np.linspace(search_radius / n_scan, search_radius, n_scan)
    found = []
    for direction in (-Z3, Z2):
        vals = np.array([_joint_measure(q, k * direction)[0] for k in kap])
        for i in range(1, n_scan - 1):
            if vals[i] <= vals[i - 1] and vals[i] <= vals[i + 1]:
                res = minimize_scalar(lambda k: _joint_measure(q, k * direction)[0],
                                      bracket=(kap[i - 1], kap[i], kap[i + 1]),
                                      options={"xtol": 1e-12})
                k = float(res.x)
                m0, m1, _, _ = _joint_measure(q, k * direction)
                if m0 <= tol and m1 <= tol:
                    found.append((k, direction))
                elif m0 <= tol:
                    out.anomalies.append(("non-joint zero", k * direction))
    ks = sorted({round(k, 8) for k, _ in found})
    for k in ks:
        on_both = [d for kk, d in found if abs(kk - k) < 1e-6]
        if len(on_both) < 2:
            out.anomalies.append(("zero on one ray only", k))
    for k in ks:
        def B(lam):
            return expansion_coefficients(q, lam, bd)
        h = 1e-4 * k
        dB3 = _richardson_derivative(lambda l: B(l)[2], k, 1.0, h)
        dB2 = _richardson_derivative(lambda l: B(l)[1], -k, 1.0, h)
        out.kappas.append(k)
        out.b.append(dB3 / B(k)[0])
        out.b_tilde.append(dB2 / B(-k)[0])
    if len(ks) > 1 and np.min(np.diff(ks)) <= kap[1] - kap[0]:
        out.anomalies.append(("zeros closer than the scan step", ks))
    return out


# ---------------------------------------------------------------------------
# sampled scattering data

# The contour on which the inverse problem lives is the union of the three
# lines t * (-i zeta_k); the data are sampled there.
DIRECTIONS = tuple(-1j * z for z in ZETA)


@dataclass
class ScatteringData:
    """s_2 and c_1 sampled at lam = t * DIRECTIONS[k] for real t."""

    t: np.ndarray
    s2: np.ndarray          # shape (3, len(t))
    c1: np.ndarray
    kappas: list = field(default_factory=list)
    b: list = field(default_factory=list)
    b_tilde: list = field(default_factory=list)
    alpha: float = 1.0
    beta: float = 0.0
    theta: complex = 1.0
    a: float = 1.0
    radius: float = np.inf

    def to_json(self) -> dict:
        rays = []
        for k in range(3):
            rays.append([{"t": float(t), "s2_re": float(s.real), "s2_im": float(s.imag),
                          "c1_re": float(c.real), "c1_im": float(c.imag)}
                         for t, s, c in zip(self.t, self.s2[k], self.c1[k])])
        th = complex(self.theta)
        return {"rays": rays, "kappas": [float(k) for k in self.kappas],
                "b": [[float(v.real), float(v.imag)] for v in map(complex, self.b)],
                "b_tilde": [[float(v.real), float(v.imag)] for v in map(complex, self.b_tilde)],
                "alpha": float(self.alpha), "beta": float(self.beta),
                "theta": [th.real, th.imag], "a": float(self.a),
                "radius": None if not np.isfinite(self.radius) else float(self.radius)}

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, doc: dict) -> "ScatteringData":
        try:
            rays = doc["rays"]
            if len(rays) != 3:
                raise ValueError("expected three rays")
            t = np.array([r["t"] for r in rays[0]], dtype=float)
            s2 = np.array([[complex(r["s2_re"], r["s2_im"]) for r in ray] for ray in rays])
            c1 = np.array([[complex(r["c1_re"], r["c1_im"]) for r in ray] for ray in rays])
            for ray in rays[1:]:
                if not np.array_equal(np.array([r["t"] for r in ray], dtype=float), t):
                    raise ValueError("rays must share one t-grid")
            th = doc.get("theta", 1.0)
            th = complex(*th) if isinstance(th, (list, tuple)) else complex(th)
            radius = doc.get("radius")
            return cls(t, s2, c1, list(doc.get("kappas", [])),
                       [complex(*v) for v in doc.get("b", [])],
                       [complex(*v) for v in doc.get("b_tilde", [])],
                       float(doc.get("alpha", 1.0)), float(doc.get("beta", 0.0)), th,
                       float(doc.get("a", 1.0)), np.inf if radius is None else float(radius))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed scattering data: {exc}") from exc

    @classmethod
    def load(cls, path) -> "ScatteringData":
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    @property
    def bd(self) -> BoundaryData:
        return BoundaryData(self.alpha, self.beta, self.theta)

    def lam(self, k: int) -> np.ndarray:
        return self.t * DIRECTIONS[k]

    def s2_at(self, lam: complex) -> complex:
        """s_2 at a sampled point; lam must lie on the sampled lines."""
        return self._lookup(self.s2, lam)

    def c1_at(self, lam: complex) -> complex:
        return self._lookup(self.c1, lam)

    def _lookup(self, arr, lam):
        lam = complex(lam)
        for k, d in enumerate(DIRECTIONS):
            t = (lam / d)
            if abs(t.imag) <= 1e-9 * max(1, abs(t)):
                j = np.searchsorted(self.t, t.real)
                for jj in (j - 1, j, j + 1):
                    if 0 <= jj < len(self.t) and abs(self.t[jj] - t.real) <= 1e-9 * max(1, abs(t)):
                        return complex(arr[k, jj])
                # linear interpolation between samples
                return complex(np.interp(t.real, self.t, arr[k].real) + 1j * np.interp(t.real, self.t, arr[k].imag))
        raise KeyError(f"lam = {lam} is not on the sampled lines")


def sample_scattering_data(q: SampledPotential, t: np.ndarray, bd: BoundaryData = DEFAULT_BD,
                           bound_states: BoundStateSet | None = None) -> ScatteringData:
    """Evaluate s_2 and c_1 on the three lines t * (-i zeta_k).

    The grid t must be symmetric (t and -t both present) so that the conjugate
    of every sample is itself a sample: the line through -i zeta_2 is the
    conjugate of the line through -i zeta_3 and the imaginary axis is mapped to
    itself.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t == 0):
        raise ValueError("the t-grid must avoid 0")
    s2 = np.empty((3, len(t)), dtype=complex)
    c1 = np.empty((3, len(t)), dtype=complex)
    for k, d in enumerate(DIRECTIONS):
        for j, tj in enumerate(t):
            lam = complex(tj * d)
            # only e_1* and e_3* enter B_1 and B_2
            st = star_at_origin(q, lam, which=(1, 3))
            B1, B2, _ = coefficients_from_star(st, lam, bd)
            if not (np.isfinite(B1) and np.isfinite(B2)) or B1 == 0:
                raise ZeroDenominator(f"scattering coefficients are not finite at lam = {lam}")
            s2[k, j] = B2 / B1
            c1[k, j] = bd.C / B1
    bs = bound_states or BoundStateSet()
    radius = np.inf if q.compact else q.a / 3
    return ScatteringData(t, s2, c1, list(bs.kappas), list(bs.b), list(bs.b_tilde),
                          bd.alpha, bd.beta, bd.theta, q.a, radius)


def validate_scattering_data(data: ScatteringData, tol: float = 1e-6, smooth_tol: float = 0.05) -> dict:
    """Check the admissibility conditions; raise InvalidScatteringData on the first failure.

    (i) kappas positive and strictly increasing; (ii) every norming constant
    non-zero; (iii) s_2 varies smoothly on the half-line used by the inverse
    solver and is finite everywhere (a proxy for holomorphy);
    (v) the unitarity identity holds at every sample whose conjugate is also
    sampled.  Returns the measured quantities.
    """
    k = np.asarray(data.kappas, dtype=float)
    if len(k) and (np.any(k <= 0) or np.any(np.diff(k) <= 0)):
        raise InvalidScatteringData("i", "bound-state parameters must be positive and ascending")
    if len(data.b) != len(k) or len(data.b_tilde) != len(k):
        raise InvalidScatteringData("ii", "one pair of norming constants is needed per bound state")
    for n, (b, bt) in enumerate(zip(data.b, data.b_tilde), start=1):
        if b == 0 or bt == 0:
            raise InvalidScatteringData("ii", f"norming constant {n} is zero")
    # smoothness: each sample on the inverse-problem half-line (line 1, t < 0)
    # against the cubic through its four neighbours.  On the other half-lines
    # a compact potential makes s_2 grow like exp(sqrt(3) t X) while oscillating
    # on a scale the default grid does not resolve, so they are only required
    # to be finite.
    jumps = 0.0
    if not np.all(np.isfinite(data.s2)) or not np.all(np.isfinite(data.c1)):
        raise InvalidScatteringData("iii", "scattering samples contain non-finite values")
    half = data.t < 0
    t = data.t[half]
    row = data.s2[1, half]
    for j in range(2, len(t) - 2):
        nb = [j - 2, j - 1, j + 1, j + 2]
        pred = 0j
        for i in nb:
            w = np.prod([(t[j] - t[m]) / (t[i] - t[m]) for m in nb if m != i])
            pred += w * row[i]
        jumps = max(jumps, abs(pred - row[j]) / max(float(np.max(np.abs(row[nb + [j]]))), 1e-300))
    if jumps > smooth_tol:
        raise InvalidScatteringData("iii", f"scattering samples are not smooth (defect {jumps:.2e})")
    # conj(t * d_k) = -t * d_kc with kc swapping the second and third lines
    worst = 0.0
    tl = list(np.round(data.t, 12))
    for k in range(3):
        kc = {0: 0, 1: 2, 2: 1}[k]
        for j, tj in enumerate(data.t):
            tc = -tj
            try:
                jc = tl.index(round(tc, 12))
            except ValueError:
                continue
            lam = tj * DIRECTIONS[k]
            s2, c1 = data.s2[k, j], data.c1[k, j]
            s2c, c1c = np.conj(data.s2[kc, jc]), np.conj(data.c1[kc, jc])
            # s3(lam) = 1/s2(lam zeta_3); lam zeta_3 lies on line (k+2)%3 at the same t
            s3 = 1 / data.s2[(k + 2) % 3, j]
            s3c = np.conj(1 / data.s2[(kc + 2) % 3, jc])
            r = unitarity_residual(s2, s3, c1, lam, s2c, s3c, c1c)
            # relative to the size of the terms that cancel
            scale = 1 + abs(c1 * c1c / (3 * lam ** 2)) + abs(s2 * s3c) + abs(s3 * s2c)
            worst = max(worst, r / scale)
    if worst > tol:
        raise InvalidScatteringData("v", f"unitarity residual {worst:.3e} exceeds {tol:.1e}")
    return {"unitarity": worst, "smoothness": jumps, "N": len(data.kappas)}
