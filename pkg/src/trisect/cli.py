"""Command-line entry point: verification suites, forward and inverse runs, round trips.

Usage:
    trisect verify --suite identities [--potential q.csv] [--seed 7]
    trisect forward --potential q.csv --out data.json
    trisect inverse --data data.json --out q_rec.csv
    trisect roundtrip --potential q.csv --report report.json
    trisect zeros --family 1 --count 10

Every command accepts ``--config FILE`` with flat ``key = value`` lines; flags
given on the command line win over the file.  Reports are JSON with sorted keys
and no timing, so identical inputs give byte-identical output.  Timings go to
stderr.

Exit codes: 0 success, 2 validation failure, 3 solver failure, 4 I/O error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import dataclass, field, fields

import numpy as np

from . import forward, raygeom, riemann, trig3, volterra
from .forward import (BoundaryData, InvalidScatteringData, ScatteringData, ZeroDenominator,
                      find_bound_states, sample_scattering_data, validate_scattering_data)
from .riemann import RayQuadrature
from .volterra import SampledPotential, read_potential_csv

logger = logging.getLogger("trisect")

EXIT_OK, EXIT_VALIDATION, EXIT_SOLVER, EXIT_IO = 0, 2, 3, 4

SOLVER_ERRORS = (volterra.NonConvergence, ZeroDenominator, riemann.BranchJump, riemann.ZeroOnContour,
                 riemann.ResidualTooLarge, riemann.ExtrapolationUnstable, np.linalg.LinAlgError)


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# configuration

@dataclass
class RunConfig:
    command: str = "verify"
    potential: str | None = None
    data: str | None = None
    out: str | None = None
    report: str | None = None
    xmax: float = 4.0
    nx: int = 400
    ntau: int = 400
    T: float = 1000.0
    decay: float = 4.0          # decay rate a of the potential
    tol: float = 1e-6
    alpha: float = 1.0
    beta: float = 0.0
    theta_arg: float = 0.0
    probes: tuple = riemann.DEFAULT_PROBES
    suite: str = "all"
    seed: int = 20240611
    family: int = 0
    count: int = 10
    refine: bool = False
    bound_states: bool = True

    def check(self):
        if self.xmax <= 0 or self.T <= 0:
            raise ConfigError("xmax and T must be positive")
        if self.nx < 4 or self.ntau < 16:
            raise ConfigError("nx must be at least 4 and ntau at least 16")
        if not 0 < self.tol < 1:
            raise ConfigError("tol must lie in (0, 1)")
        if self.decay <= 0:
            raise ConfigError("decay must be positive")
        if len(self.probes) < 2 or min(self.probes) <= 0:
            raise ConfigError("probes needs at least two positive moduli")
        return self

    @property
    def bd(self) -> BoundaryData:
        return BoundaryData.from_theta_arg(self.alpha, self.beta, self.theta_arg)


def _coerce(name: str, raw: str):
    kinds = {f.name: f.type for f in fields(RunConfig)}
    if name not in kinds:
        raise ConfigError(f"unknown config key {name!r}")
    kind = kinds[name]
    try:
        if kind == "float":
            return float(raw)
        if kind == "int":
            return int(raw)
        if kind == "bool":
            if raw.lower() not in ("1", "0", "true", "false", "yes", "no"):
                raise ValueError(raw)
            return raw.lower() in ("1", "true", "yes")
        if kind == "tuple":
            return tuple(float(v) for v in raw.replace(",", " ").split())
    except ValueError:
        raise ConfigError(f"bad value for {name}: {raw!r}") from None
    return raw


def read_config(path) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment.  Errors name the line."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, val = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            try:
                out[key] = _coerce(key, val)
            except ConfigError as exc:
                raise ConfigError(f"{path}:{lineno}: {exc}") from None
    return out


def build_config(args: argparse.Namespace) -> RunConfig:
    values = {}
    if getattr(args, "config", None):
        values.update(read_config(args.config))
    for f in fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            values[f.name] = tuple(v) if f.name == "probes" else v
    values["command"] = args.command
    return RunConfig(**values).check()


# ---------------------------------------------------------------------------
# helpers

def small_potential(xmax: float = 4.0, n: int = 400) -> SampledPotential:
    """q = 0.1 exp(-4x) cut off at xmax."""
    return SampledPotential.from_function(lambda x: 0.1 * np.exp(-4 * x), xmax, n, a=4.0, compact=True)


def load_potential(cfg: RunConfig) -> SampledPotential:
    q = read_potential_csv(cfg.potential, a=cfg.decay, compact=True)
    if q.xmax > cfg.xmax * (1 + 1e-12):
        logger.info("potential extends past xmax; truncating at %g", cfg.xmax)
    x = np.linspace(0.0, min(cfg.xmax, q.xmax), cfg.nx + 1)
    return SampledPotential(x, q(x), q.a, True)


def _disk(rng, n: int, radius: float) -> np.ndarray:
    r = radius * np.sqrt(rng.uniform(0, 1, n))
    return r * np.exp(2j * np.pi * rng.uniform(0, 1, n))


def _num(v):
    if isinstance(v, (complex, np.complexfloating)):
        return [float(v.real), float(v.imag)]
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


def dumps(obj) -> str:
    def clean(o):
        if isinstance(o, dict):
            return {str(k): clean(v) for k, v in o.items()}
        if isinstance(o, (list, tuple, np.ndarray)):
            return [clean(v) for v in o]
        return _num(o)
    return json.dumps(clean(obj), indent=1, sort_keys=True)


@dataclass
class SuiteResult:
    name: str
    tolerance: float
    residuals: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    def check(self, key: str, value: float, tol: float | None = None):
        tol = self.tolerance if tol is None else tol
        value = float(value)
        self.residuals[key] = value
        ok = value <= tol
        if not ok or not np.isfinite(value):
            self.failures.append(f"{key} = {value:.3e} (limit {tol:.1e})")

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {"passed": self.passed, "tolerance": self.tolerance,
                "max_residual": max(self.residuals.values(), default=0.0),
                "residuals": self.residuals, "failures": self.failures, **self.extra}


# ---------------------------------------------------------------------------
# verification suites

def suite_identities(rng, q) -> SuiteResult:
    res = SuiteResult("identities", 1e-10)
    zs, ws = _disk(rng, 100, 3.0), _disk(rng, 100, 3.0)
    worst = {}
    for z, w in zip(zs, ws):
        for k, v in trig3.identity_residuals(z, w).items():
            worst[k] = max(worst.get(k, 0.0), v)
    for k, v in sorted(worst.items()):
        res.check(k, v)
    return res


def suite_zeros(rng, q, count: int = 10) -> SuiteResult:
    res = SuiteResult("zeros", 1e-12)
    table = {}
    for p in (0, 1, 2):
        zs = trig3.find_zeros(p, count)
        table[p] = zs
        res.check(f"equation_{p}", max(float(abs(trig3.zero_equation(p, z.x_ext))) for z in zs))
        img = max(abs(complex(trig3.eval_s(p, v))) for z in zs for v in z.ray_images_ext())
        res.check(f"ray_images_{p}", img, 1e-9)
    xs = {p: [z.x for z in table[p]] for p in table}
    # merged order runs x_0 < x_1 < x_2 < x_0 < ... once the shared zero at 0 is dropped
    merged = sorted((x, p) for p in xs for x in xs[p] if x > 0)
    cyclic = all(merged[i][1] == i % 3 for i in range(len(merged)))
    inter = trig3.interlaces(xs[0], xs[1]) and trig3.interlaces(xs[1], xs[2]) and cyclic
    res.check("interlacing_violations", 0.0 if inter else 1.0, 0.0)
    res.extra["table"] = {str(p): [z.x for z in table[p]] for p in table}
    return res


def suite_kernels(rng, q, samples: int = 200) -> SuiteResult:
    res = SuiteResult("kernels", 0.0)
    sig = q.sigma()
    worst_nz = worst_zero = worst_N = -np.inf
    for _ in range(samples):
        x, t = np.sort(rng.uniform(0, q.xmax, 2))
        lam = _disk(rng, 1, 3.0)[0]
        st = float(sig(t))
        for branch in (lam, 0.0):
            vals, _ = volterra.iterated_kernels(q, branch, x, t, nmax=4, m=120)
            for n, v in enumerate(vals, start=1):
                bound = volterra.kernel_bound(branch, x, t, n, st)
                ratio = abs(v) / bound if bound > 0 else (0.0 if v == 0 else np.inf)
                if branch == 0.0:
                    worst_zero = max(worst_zero, ratio)
                else:
                    worst_nz = max(worst_nz, ratio)
        vals, _ = volterra.iterated_kernels(q, lam, x, t, nmax=10, m=120)
        N = sum((-1j) ** (n - 1) * v for n, v in enumerate(vals, start=1))
        worst_N = max(worst_N, abs(N) / volterra.resolvent_bound(lam, x, t, st))
    # ratios |K_n| / bound must not exceed 1; at n = 1 and lam = 0 the bound is attained
    limit = 1 + 1e-12
    res.check("K_n_over_bound_lambda_nonzero", worst_nz, limit)
    res.check("K_n_over_bound_lambda_zero", worst_zero, limit)
    res.check("N_over_bound", worst_N, limit)
    return res


def suite_jost(rng, q) -> SuiteResult:
    res = SuiteResult("jost", 1e-12)
    zero = SampledPotential.zero(q.xmax, q.n)
    worst = 0.0
    for lam in _disk(rng, 10, 4.0):
        for p in (1, 2, 3):
            s = volterra.jost_solve(zero, lam, p)
            exact = np.exp(1j * lam * raygeom.zeta(p) * s.x)
            worst = max(worst, float(np.max(np.abs(s.e - exact))))
    res.check("zero_potential", worst)
    rot = 0.0
    for lam in _disk(rng, 10, 3.0):
        for p in (1, 2, 3):
            a = volterra.jost_solve(q, lam * raygeom.zeta(2), p).e
            b = volterra.jost_solve(q, lam, p % 3 + 1).e
            rot = max(rot, float(np.max(np.abs(a - b)) / max(1.0, np.max(np.abs(b)))))
    res.check("rotation_covariance", rot, 1e-8)
    # the Neumann scheme against a direct ODE integration of the same potential
    ode = 0.0
    for lam in _disk(rng, 3, 3.0):
        for p in (1, 2, 3):
            e = volterra.jost_solve(q, lam, p).e
            _, ref, _, _ = volterra.jost_ode_oracle(q, lam, p)
            ode = max(ode, float(np.max(np.abs(e - ref)) / np.max(np.abs(ref))))
    res.check("ode_oracle", ode, 1e-5)
    return res


def suite_determinant(rng, q) -> SuiteResult:
    res = SuiteResult("determinant", 1e-6)
    lams = _disk(rng, 20, 3.0)
    lams = np.where(np.abs(lams) < 0.2, 0.2 * np.exp(1j * np.angle(lams)), lams)
    res.check("relative_deviation", max(volterra.fundamental_determinant(q, l).max_deviation for l in lams))
    return res


def suite_wronskian(rng, q) -> SuiteResult:
    res = SuiteResult("wronskian", 1e-6)
    worst = {}
    for lam in _disk(rng, 8, 3.0):
        for k, v in forward.wronskian_identity_residuals(q, lam).items():
            worst[k] = max(worst.get(k, 0.0), v)
    for k, v in sorted(worst.items()):
        res.check(k, v)
    return res


def scattering_lambda_grid(rng, n: int = 50) -> np.ndarray:
    """n points: half on the data lines, half random in the annulus 0.3 < |lam| < 3."""
    m = n // 2
    t = rng.uniform(0.3, 3.0, m) * rng.choice([-1.0, 1.0], m)
    on_lines = t * np.array(forward.DIRECTIONS)[rng.integers(0, 3, m)]
    r = rng.uniform(0.3, 3.0, n - m)
    off = r * np.exp(2j * np.pi * rng.uniform(0, 1, n - m))
    return np.concatenate([on_lines, off])


def suite_scattering(rng, q, bd: BoundaryData = forward.DEFAULT_BD) -> SuiteResult:
    res = SuiteResult("scattering", 1e-6)
    lams = scattering_lambda_grid(rng)
    prod_i = prod_ii = uni = gap = wsys = 0.0
    for lam in lams:
        a, b = forward.product_identity_residuals(q, lam, bd)
        prod_i, prod_ii = max(prod_i, a), max(prod_ii, b)
        pa = forward.scattering_coefficients(q, lam, bd, full=True)
        pb = forward.scattering_coefficients(q, np.conj(lam), bd, full=True)
        r = forward.unitarity_residual(pa.s2, pa.s3, pa.c1, lam,
                                       np.conj(pb.s2), np.conj(pb.s3), np.conj(pb.c1))
        uni = max(uni, r)
        if bd.consistent:
            gap = max(gap, pa.representation_gap)
        wsys = max(wsys, forward.wronskian_system_residuals(q, lam, bd))
    res.check("product_triple", prod_i, 1e-8)
    res.check("product_rotation", prod_ii, 1e-8)
    res.check("unitarity", uni)
    res.check("representation_gap", gap)
    res.check("wronskian_system", wsys)
    return res


def asymptotic_deviation(q, moduli, angle: float = np.pi / 2, subtract_first_order: bool = False):
    """max_x |3 lam^2 (psi_1 - 1)/i - P(x)| at lam = R e^{i angle}.

    With ``subtract_first_order`` the term q(x)/(i lam) is removed first.
    """
    P = q.uniform().integral_from()
    qv = q.uniform().values
    out = []
    for R in moduli:
        lam = R * np.exp(1j * angle)
        ps = volterra.jost_solve(q, lam, 1).psi
        dev = 3 * lam ** 2 * (ps - 1) / 1j - P
        if subtract_first_order:
            dev = dev - qv / (1j * lam)
        out.append(float(np.max(np.abs(dev))))
    return np.array(out)


def suite_asymptotics(rng, q) -> SuiteResult:
    res = SuiteResult("asymptotics", -1.8)
    R = np.geomspace(5, 50, 10)
    dev = asymptotic_deviation(q, R)
    slope = float(np.polyfit(np.log(R), np.log(dev), 1)[0])
    res.check("loglog_slope", slope, -1.8)
    res.extra["deviation"] = dev.tolist()
    res.extra["moduli"] = R.tolist()
    dev1 = asymptotic_deviation(q, R, subtract_first_order=True)
    res.extra["slope_after_first_order_term"] = float(np.polyfit(np.log(R), np.log(dev1), 1)[0])
    return res


def contour_sigma(q, quad: RayQuadrature, bd: BoundaryData = forward.DEFAULT_BD) -> np.ndarray:
    """conj(s_2(i zeta_2 t)) at the quadrature nodes, straight from the potential."""
    out = np.empty(quad.n, dtype=complex)
    for j, t in enumerate(quad.t):
        lam = 1j * raygeom.zeta(2) * t
        st = forward.star_at_origin(q, lam, which=(1, 3))
        B1, B2, _ = forward.coefficients_from_star(st, lam, bd)
        out[j] = np.conj(B2 / B1)
    return out


def suite_jumps(rng, q) -> SuiteResult:
    res = SuiteResult("jumps", 1e-5)
    for k, v in sorted(riemann.jump_residuals(q).items()):
        res.check(k, v)
    lams = [0.6 + 0.4j, 1.3 - 0.7j, -0.8 + 1.1j]
    for k, v in riemann.rotation_residuals(q, lams).items():
        res.check(f"rotation_{k}", v)
    quad = RayQuadrature.default(160)
    sigma = contour_sigma(q, quad)
    worst = 0.0
    for x in (0.0, 0.5, 1.5):
        chi = riemann.canonical_chi(sigma, x, quad)
        worst = max(worst, riemann.chi_jump_residual(chi, sigma, quad.t[::7]))
    res.check("chi_jump", worst)
    return res


SUITES = {
    "identities": suite_identities,
    "zeros": suite_zeros,
    "kernels": suite_kernels,
    "jost": suite_jost,
    "determinant": suite_determinant,
    "wronskian": suite_wronskian,
    "scattering": suite_scattering,
    "unitarity": suite_scattering,
    "asymptotics": suite_asymptotics,
    "jumps": suite_jumps,
}
ALL_SUITES = ("identities", "zeros", "kernels", "jost", "determinant", "wronskian",
              "scattering", "asymptotics", "jumps")


def run_suite(name: str, seed: int, q: SampledPotential) -> SuiteResult:
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    res = SUITES[name](rng, q)
    print(f"[{name}] {time.perf_counter() - t0:.2f} s", file=sys.stderr)
    return res


# ---------------------------------------------------------------------------
# commands

def cmd_verify(cfg: RunConfig) -> tuple[int, dict]:
    if cfg.suite != "all" and cfg.suite not in SUITES:
        raise ConfigError(f"unknown suite {cfg.suite!r}; choose from {', '.join(sorted(SUITES))} or all")
    q = load_potential(cfg) if cfg.potential else small_potential(cfg.xmax, cfg.nx)
    names = ALL_SUITES if cfg.suite == "all" else (cfg.suite,)
    suites = {n: run_suite(n, cfg.seed, q).to_json() for n in names}
    passed = all(s["passed"] for s in suites.values())
    report = {"command": "verify", "seed": cfg.seed, "suites": suites, "passed": passed}
    return (EXIT_OK if passed else EXIT_VALIDATION), report


def contour_length(q: SampledPotential, T: float) -> float:
    """T capped so that every sample stays inside double range.

    For a potential supported on [0, X], s_2 on the lines through -i and
    -i zeta_3 grows or decays like exp(sqrt(3) t X).
    """
    return min(T, 650.0 / (raygeom.SQRT3 * q.xmax))


def forward_data(q: SampledPotential, cfg: RunConfig) -> tuple[ScatteringData, forward.BoundStateSet]:
    T = contour_length(q, cfg.T)
    if T < cfg.T:
        logger.info("contour length capped at %.4g", T)
    quad = RayQuadrature.default(cfg.ntau, T=T)
    t = np.concatenate([-quad.t[::-1], quad.t])
    bs = find_bound_states(q, cfg.bd) if cfg.bound_states else forward.BoundStateSet()
    return sample_scattering_data(q, t, cfg.bd, bs), bs


def cmd_forward(cfg: RunConfig) -> tuple[int, dict]:
    if not cfg.potential or not cfg.out:
        raise ConfigError("forward needs --potential and --out")
    q = load_potential(cfg)
    data, bs = forward_data(q, cfg)
    data.dump(cfg.out)
    report = {"command": "forward", "bound_states": bs.N, "kappas": list(bs.kappas),
              "anomalies": [str(a) for a in bs.anomalies], "samples": int(data.s2.size)}
    print(f"bound states: {bs.N}", file=sys.stderr)
    return EXIT_OK, report


def inverse_from_data(data: ScatteringData, cfg: RunConfig, x=None) -> tuple[riemann.RecoveredPotential, dict]:
    checks = validate_scattering_data(data, tol=cfg.tol)
    if x is None:
        x = np.linspace(0.0, cfg.xmax, cfg.nx + 1)
    rec = riemann.recover_potential(data, x, cfg.probes, tol=cfg.tol)
    return rec, checks


def cmd_inverse(cfg: RunConfig) -> tuple[int, dict]:
    if not cfg.data or not cfg.out:
        raise ConfigError("inverse needs --data and --out")
    try:
        data = ScatteringData.load(cfg.data)
    except (ValueError, json.JSONDecodeError) as exc:
        raise OSError(f"{cfg.data}: {exc}") from None
    rec, checks = inverse_from_data(data, cfg)
    rec.to_csv(cfg.out)
    report = {"command": "inverse", "validator": checks,
              "max_residual": float(np.max(rec.residual)),
              "unstable_extrapolations": sum(1 for d in rec.diagnostics if not d["stable"]),
              "imag_ratio": rec.imag_ratio()}
    return EXIT_OK, report


def relative_errors(got, want, x) -> dict:
    got, want = np.real(got), np.real(want)
    l2 = float(np.sqrt(np.trapezoid((got - want) ** 2, x) / max(np.trapezoid(want ** 2, x), 1e-300)))
    sup = float(np.max(np.abs(got - want)) / max(np.max(np.abs(want)), 1e-300))
    return {"l2": l2, "sup": sup}


def roundtrip(q: SampledPotential, cfg: RunConfig, x=None) -> dict:
    """Forward map, inverse map and the errors of P and q on the x grid."""
    data, bs = forward_data(q, cfg)
    rec, checks = inverse_from_data(data, cfg, x)
    P_true = q.integral_from()
    P_true = np.interp(rec.x, q.grid, P_true)
    q_true = q(rec.x)
    scale = max(float(np.max(np.abs(P_true))), 1e-300)
    zero_q = not np.any(q.values)
    P_err = relative_errors(rec.P, P_true, rec.x) if not zero_q else \
        {"l2": float(np.max(np.abs(rec.P))), "sup": float(np.max(np.abs(rec.P)))}
    q_err = relative_errors(rec.q, q_true, rec.x) if not zero_q else \
        {"l2": float(np.max(np.abs(rec.q))), "sup": float(np.max(np.abs(rec.q)))}
    return {"ntau": cfg.ntau, "nx": len(rec.x) - 1, "bound_states": bs.N, "validator": checks,
            "P_error": P_err, "q_error": q_err, "P_scale": scale,
            "system_residual": float(np.max(rec.residual)),
            "unstable_extrapolations": sum(1 for d in rec.diagnostics if not d["stable"]),
            "Q_product": max(d["Q_product"] for d in rec.diagnostics)}


def cmd_roundtrip(cfg: RunConfig) -> tuple[int, dict]:
    if not cfg.potential:
        raise ConfigError("roundtrip needs --potential")
    q = load_potential(cfg)
    base = roundtrip(q, cfg)
    report = {"command": "roundtrip", "base": base}
    ok = base["P_error"]["l2"] <= 0.01 and base["q_error"]["l2"] <= 0.05
    if cfg.refine:
        xs = np.linspace(0.0, cfg.xmax, 21)
        coarse = roundtrip(q, cfg, xs)
        fine_cfg = RunConfig(**{**cfg.__dict__, "ntau": 2 * cfg.ntau})
        fine = roundtrip(q, fine_cfg, xs)
        mono = fine["P_error"]["l2"] < coarse["P_error"]["l2"]
        report["refinement"] = {"coarse": coarse, "fine": fine, "monotone": mono}
        ok = ok and mono
    report["passed"] = ok
    if cfg.report:
        with open(cfg.report, "w") as fh:
            fh.write(dumps(report) + "\n")
    return (EXIT_OK if ok else EXIT_VALIDATION), report


def cmd_zeros(cfg: RunConfig) -> tuple[int, dict]:
    if cfg.family not in (0, 1, 2):
        raise ConfigError("family must be 0, 1 or 2")
    zs = trig3.find_zeros(cfg.family, cfg.count)
    rows = [{"k": z.k, "x": z.x, "residual": float(abs(trig3.zero_equation(cfg.family, z.x_ext)))}
            for z in zs]
    return EXIT_OK, {"command": "zeros", "family": cfg.family, "zeros": rows}


COMMANDS = {"verify": cmd_verify, "forward": cmd_forward, "inverse": cmd_inverse,
            "roundtrip": cmd_roundtrip, "zeros": cmd_zeros}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trisect", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="flat key = value file; flags override it")
        p.add_argument("--tol", type=float)
        p.add_argument("--seed", type=int)
        return p

    def grids(p):
        p.add_argument("--xmax", type=float)
        p.add_argument("--nx", type=int)
        return p

    p = grids(common(sub.add_parser("verify", help="run verification suites")))
    p.add_argument("--suite", help="suite name or 'all'")
    p.add_argument("--potential")

    p = grids(common(sub.add_parser("forward", help="potential -> scattering data JSON")))
    p.add_argument("--potential")
    p.add_argument("--out")
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--theta-arg", dest="theta_arg", type=float)
    p.add_argument("--ntau", type=int)
    p.add_argument("--T", type=float)
    p.add_argument("--no-bound-states", dest="bound_states", action="store_const", const=False)

    p = grids(common(sub.add_parser("inverse", help="scattering data JSON -> potential CSV")))
    p.add_argument("--data")
    p.add_argument("--out")
    p.add_argument("--probes", type=float, nargs="+")

    p = grids(common(sub.add_parser("roundtrip", help="forward then inverse, with error report")))
    p.add_argument("--potential")
    p.add_argument("--report")
    p.add_argument("--ntau", type=int)
    p.add_argument("--refine", action="store_const", const=True)

    p = common(sub.add_parser("zeros", help="zeros of the generalized trigonometric functions"))
    p.add_argument("--family", type=int)
    p.add_argument("--count", type=int)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    t0 = time.perf_counter()
    try:
        cfg = build_config(args)
        code, report = COMMANDS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except InvalidScatteringData as exc:
        print(f"error: scattering data rejected, {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except volterra.PotentialFormatError as exc:
        print(f"error: parse: {exc}", file=sys.stderr)
        return EXIT_IO
    except (volterra.DomainViolation, volterra.RegionViolation) as exc:
        print(f"error: inadmissible input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SOLVER_ERRORS as exc:
        print(f"error: solver ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"error: io: {exc}", file=sys.stderr)
        return EXIT_IO
    print(dumps(report))
    print(f"elapsed {time.perf_counter() - t0:.2f} s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
