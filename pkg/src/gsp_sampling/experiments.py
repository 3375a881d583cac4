"""Experiment configs, signal generation, sweeps and the theorem-check batch."""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    NoiseModel,
    expected_mse,
    mse_change_on_removal,
    monte_carlo_mse,
    removal_effect,
    removal_improves,
    tau_along_ordering,
    verify_noiseless_optimal_prefix,
    xi1,
    xi2,
)
from .errors import ConfigError, GspError
from .graph import ShiftKind, generate_ba, generate_er, generate_sbm, shift_operator
from .plotting import line_plot_svg
from .reconstruction import DEFAULT_GLR_MU, ls_operator
from .sampling import (
    Criterion,
    SampleSet,
    WeightedRandom,
    gram,
    greedy_select,
    parse_scheme,
    restrict_rows,
    scheme_name,
    select,
)
from .spectral import band, eigendecompose

CSV_HEADER = ["scheme", "sample_size", "snr", "metric", "value", "ci_low", "ci_high", "instance"]
INTERVAL_METHOD = "5th/95th empirical quantiles (pooled per-signal values, or across instances)"
EMPIRICAL_SCALE = "k * per-signal MSE of unit-norm signals (matches the analytic model scale)"
WR_CONVENTION = "without replacement"

GRAPH_MODEL_KEYS = {"ER": {"p"}, "BA": {"m"}, "SBM": {"blocks", "p_in", "p_out"}}
GRAPH_MODEL_DEFAULTS = {
    "ER": {"p": 0.8},
    "BA": {"m": 3},
    "SBM": {"blocks": 10, "p_in": 0.7, "p_out": 0.1},
}

CONFIG_FIELD_DOCS = {
    "graph_model": 'random graph model: {"kind": "ER", "p"} | {"kind": "BA", "m"} | '
    '{"kind": "SBM", "blocks", "p_in", "p_out"}',
    "n_vertices": "number of vertices N",
    "n_graph_instances": "independent graph draws per experiment",
    "bandwidth": "bandwidth k; null means floor(N / 10)",
    "shift_kind": '"combinatorial" (D - W) or "normalized" (I - D^-1/2 W D^-1/2)',
    "schemes": '"A", "D", "E" (greedy) and "WR" / "WR:<seed>" (weighted random)',
    "snr_list": "ratio-form SNR values, all > 0",
    "n_signals": "signals per (instance, SNR) for empirical MSE",
    "sample_size_range": "[lo, hi] inclusive range of sample sizes",
    "seed": "master seed; every random stream is derived from it",
    "output_dir": "directory for CSV / SVG / JSON outputs",
    "plot": "write SVG plots next to the CSV files",
    "verify_pairs": "verify: random (S, v) pairs per graph",
    "verify_orderings": "verify: random vertex orderings per graph",
    "verify_mc_cells": "verify: random (scheme, m, SNR) Monte Carlo cells",
    "verify_mc_signals": "verify: signals per Monte Carlo cell",
}


def derive_seed(*keys):
    """Deterministic 63-bit seed from a tuple of non-negative integers."""
    state = np.random.SeedSequence([int(k) for k in keys]).generate_state(2, np.uint32)
    return int((int(state[0]) << 31) ^ int(state[1]))


@dataclass
class ExperimentConfig:
    graph_model: dict = field(default_factory=lambda: {"kind": "ER", "p": 0.8})
    n_vertices: int = 100
    n_graph_instances: int = 10
    bandwidth: int = None
    shift_kind: str = "combinatorial"
    schemes: list = field(default_factory=lambda: ["A", "D", "E", "WR"])
    snr_list: list = field(default_factory=lambda: [0.1, 100.0, 1e10])
    n_signals: int = 200
    sample_size_range: list = field(default_factory=lambda: [0, 30])
    seed: int = 0
    output_dir: str = "out"
    plot: bool = True
    verify_pairs: int = 100
    verify_orderings: int = 20
    verify_mc_cells: int = 30
    verify_mc_signals: int = 10000

    def __post_init__(self):
        self.validate()

    @property
    def k(self):
        return self.bandwidth if self.bandwidth is not None else max(1, self.n_vertices // 10)

    @property
    def scheme_objects(self):
        return [parse_scheme(s) for s in self.schemes]

    def validate(self):
        gm = self.graph_model
        if not isinstance(gm, dict) or gm.get("kind") not in GRAPH_MODEL_KEYS:
            raise ConfigError(f"graph_model.kind must be one of {sorted(GRAPH_MODEL_KEYS)}")
        extra = set(gm) - GRAPH_MODEL_KEYS[gm["kind"]] - {"kind"}
        if extra:
            raise ConfigError(f"unknown graph_model keys for {gm['kind']}: {sorted(extra)}")
        self.graph_model = {**GRAPH_MODEL_DEFAULTS[gm["kind"]], **gm}
        if self.n_vertices < 2:
            raise ConfigError("n_vertices must be at least 2")
        if self.n_graph_instances < 1:
            raise ConfigError("n_graph_instances must be positive")
        if not 1 <= self.k <= self.n_vertices:
            raise ConfigError(f"bandwidth must be in [1, n_vertices], got {self.k}")
        try:
            ShiftKind(self.shift_kind)
        except ValueError:
            raise ConfigError(f"unknown shift_kind {self.shift_kind!r}") from None
        if not self.schemes:
            raise ConfigError("at least one scheme is required")
        try:
            self.scheme_objects
        except GspError as exc:
            raise ConfigError(str(exc)) from None
        if not self.snr_list or any(not float(s) > 0 for s in self.snr_list):
            raise ConfigError("snr_list must be non-empty and all SNRs > 0")
        self.snr_list = [float(s) for s in self.snr_list]
        if self.n_signals < 2:
            raise ConfigError("n_signals must be at least 2")
        lo, hi = self.sample_size_range
        if not 0 <= lo <= hi <= self.n_vertices:
            raise ConfigError(f"sample_size_range must satisfy 0 <= lo <= hi <= N, got {[lo, hi]}")
        self.sample_size_range = [int(lo), int(hi)]

    @classmethod
    def from_dict(cls, doc, **overrides):
        known = {f.name for f in dataclasses.fields(cls)}
        merged = {**doc, **{k: v for k, v in overrides.items() if v is not None}}
        unknown = set(merged) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**merged)

    @classmethod
    def from_file(cls, path, **overrides):
        try:
            doc = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from None
        return cls.from_dict(doc, **overrides)

    def to_dict(self):
        return dataclasses.asdict(self)

    def digest(self):
        """Short hash of every result-affecting field (``output_dir`` excluded)."""
        doc = {k: v for k, v in self.to_dict().items() if k != "output_dir"}
        payload = json.dumps(doc, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    def metadata(self):
        return {
            "library": "gsp_sampling",
            "version": __version__,
            "config_hash": self.digest(),
            "seed": self.seed,
            "shift_kind": ShiftKind(self.shift_kind).value,
            "bandwidth": self.k,
            "interval_method": INTERVAL_METHOD,
            "empirical_scale": EMPIRICAL_SCALE,
            "weighted_random": WR_CONVENTION,
            "glr_mu_default": DEFAULT_GLR_MU,
        }


def bundled_config(name):
    """Load one of the JSON configs shipped in ``gsp_sampling/configs``."""
    text = resources.files("gsp_sampling").joinpath("configs").joinpath(f"{name}.json").read_text()
    return json.loads(text)


def bundled_config_names():
    folder = resources.files("gsp_sampling").joinpath("configs")
    return sorted(p.name[:-5] for p in folder.iterdir() if p.name.endswith(".json"))


def make_graph(cfg, instance):
    gm = cfg.graph_model
    seed = derive_seed(cfg.seed, 1, instance)
    if gm["kind"] == "ER":
        return generate_er(cfg.n_vertices, gm["p"], seed)
    if gm["kind"] == "BA":
        return generate_ba(cfg.n_vertices, gm["m"], seed)
    return generate_sbm(cfg.n_vertices, gm["blocks"], gm["p_in"], gm["p_out"], seed)


def make_band(cfg, instance):
    g = make_graph(cfg, instance)
    kind = ShiftKind(cfg.shift_kind)
    return band(eigendecompose(shift_operator(g, kind), kind), cfg.k)


def instance_scheme(scheme, cfg, instance):
    """Weighted random schemes get a per-instance seed derived from their own."""
    if isinstance(scheme, WeightedRandom):
        return WeightedRandom(derive_seed(cfg.seed, 2, instance, scheme.seed))
    return scheme


def generate_experiment_signals(b, snr, n_signals, seed):
    """Batch of unit-norm bandlimited signals and their noisy versions.

    Returns ``(x, y)`` of shape ``(N, n_signals)``: ``x = U_k g / ||U_k g||``,
    ``eps`` a unit-norm Gaussian direction, ``y = x + eps / sqrt(snr)``.
    """
    if not snr > 0:
        raise ConfigError(f"SNR must be positive, got {snr}")
    rng = np.random.default_rng(seed)
    x = b.u_k @ rng.standard_normal((b.k, n_signals))
    eps = rng.standard_normal((b.n, n_signals))
    x /= np.linalg.norm(x, axis=0)
    eps /= np.linalg.norm(eps, axis=0)
    return x, x + eps / np.sqrt(snr)


def generate_experiment_signal(b, snr, seed):
    x, y = generate_experiment_signals(b, snr, 1, seed)
    return x[:, 0], y[:, 0]


@dataclass(frozen=True)
class SweepRow:
    scheme: str
    sample_size: int
    snr: float
    instance: object
    metric: str
    value: float
    ci_low: float
    ci_high: float

    def sort_key(self):
        inst = (1, 0) if self.instance == "all" else (0, int(self.instance))
        return (self.scheme, self.snr, self.sample_size, self.metric, inst)


def _band_row(scheme, m, snr, metric, samples, value=None):
    samples = np.asarray(samples, dtype=float)
    val = float(samples.mean()) if value is None else float(value)
    lo, hi = np.quantile(samples, [0.05, 0.95])
    # Clamp: a mean of identical values may differ from them in the last bit.
    return SweepRow(scheme, m, snr, "all", metric, val, min(float(lo), val), max(float(hi), val))


def _pool_size():
    env = os.environ.get("GSL_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _map_instances(fn, cfg):
    workers = min(_pool_size(), cfg.n_graph_instances)
    if workers <= 1:
        return [fn(i) for i in range(cfg.n_graph_instances)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(cfg.n_graph_instances)))


def _mse_instance(cfg, instance):
    b = make_band(cfg, instance)
    lo, hi = cfg.sample_size_range
    rows, pooled = [], {}
    signals = {}
    for si, snr in enumerate(cfg.snr_list):
        signals[snr] = generate_experiment_signals(
            b, snr, cfg.n_signals, derive_seed(cfg.seed, 3, instance, si)
        )
    for scheme in cfg.scheme_objects:
        name = scheme_name(scheme)
        order = select(b, instance_scheme(scheme, cfg, instance), hi)
        for m in range(lo, hi + 1):
            r = ls_operator(b, order[:m])
            idx = np.asarray(r.sample_set, dtype=np.intp)
            for snr in cfg.snr_list:
                analytic = expected_mse(b, r, NoiseModel(snr, b.k, b.n)).expected_mse
                x, y = signals[snr]
                err = b.k * np.sum((x - r.matrix @ y[idx]) ** 2, axis=0)
                lo_q, hi_q = np.quantile(err, [0.05, 0.95])
                mean = float(err.mean())
                rows.append(SweepRow(name, m, snr, instance, "AnalyticEMSE", analytic, analytic, analytic))
                rows.append(
                    SweepRow(name, m, snr, instance, "EmpiricalMSE", mean,
                             min(float(lo_q), mean), max(float(hi_q), mean))
                )
                pooled[(name, m, snr)] = (analytic, err)
    return rows, pooled


def run_mse_sweep(cfg):
    """Analytic and empirical LS error against sample size, per scheme and SNR.

    Per-instance rows are followed by aggregated rows (``instance == "all"``)
    whose interval is the 5th/95th quantile of pooled per-signal errors
    (empirical) or of per-instance values (analytic).
    """
    results = _map_instances(lambda i: _mse_instance(cfg, i), cfg)
    rows = [r for inst_rows, _ in results for r in inst_rows]
    for key in results[0][1]:
        name, m, snr = key
        analytic = [res[1][key][0] for res in results]
        errs = np.concatenate([res[1][key][1] for res in results])
        rows.append(_band_row(name, m, snr, "AnalyticEMSE", analytic))
        rows.append(_band_row(name, m, snr, "EmpiricalMSE", errs))
    return sorted(rows, key=SweepRow.sort_key)


def _tau_instance(cfg, instance):
    b = make_band(cfg, instance)
    lo, hi = cfg.sample_size_range
    lo = max(lo, 1)
    out = {}
    for scheme in cfg.scheme_objects:
        order = select(b, instance_scheme(scheme, cfg, instance), hi)
        taus = tau_along_ordering(b, order)
        out[scheme_name(scheme)] = {i: float(taus[i - 1]) for i in range(lo, hi + 1)}
    return out


def run_tau_sweep(cfg):
    """``tau(S_i, v_i)`` along each scheme's selection order, per instance and aggregated."""
    results = _map_instances(lambda i: _tau_instance(cfg, i), cfg)
    rows = []
    snr = float("nan")
    for instance, res in enumerate(results):
        for name, taus in res.items():
            for i, t in taus.items():
                rows.append(SweepRow(name, i, snr, instance, "Tau", t, t, t))
    for name in results[0]:
        for i in results[0][name]:
            rows.append(_band_row(name, i, snr, "Tau", [res[name][i] for res in results]))
    return sorted(rows, key=lambda r: (r.scheme, r.sample_size, r.metric, r.sort_key()[-1]))


def _fmt_float(v):
    return repr(float(v))


def rows_to_csv(rows, metadata):
    buf = io.StringIO()
    for key in sorted(metadata):
        buf.write(f"# {key}: {metadata[key]}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow([
            r.scheme, r.sample_size, _fmt_float(r.snr), r.metric, _fmt_float(r.value),
            _fmt_float(r.ci_low), _fmt_float(r.ci_high), r.instance,
        ])
    return buf.getvalue()


def read_sweep_csv(path):
    """Parse a sweep CSV (skipping ``#`` metadata lines) into a list of dicts."""
    lines = [ln for ln in Path(path).read_text().splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def _aggregated(rows, metric):
    return [r for r in rows if r.instance == "all" and r.metric == metric]


def write_mse_outputs(cfg, rows, out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = [out / "mse_sweep.csv"]
    paths[0].write_text(rows_to_csv(rows, cfg.metadata()))
    if cfg.plot:
        agg = _aggregated(rows, "AnalyticEMSE")
        for snr in cfg.snr_list:
            series = {}
            for name in dict.fromkeys(r.scheme for r in agg):
                sel = sorted((r for r in agg if r.scheme == name and r.snr == snr), key=lambda r: r.sample_size)
                series[name] = (
                    [r.sample_size for r in sel], [r.value for r in sel],
                    [r.ci_low for r in sel], [r.ci_high for r in sel],
                )
            path = out / f"mse_sweep_snr_{snr:g}.svg"
            path.write_text(line_plot_svg(series, f"Expected LS MSE, SNR = {snr:g}",
                                          "sample size", "E[MSE]", logy=True))
            paths.append(path)
    return paths


def write_tau_outputs(cfg, rows, out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = [out / "tau_sweep.csv"]
    paths[0].write_text(rows_to_csv(rows, cfg.metadata()))
    if cfg.plot:
        agg = _aggregated(rows, "Tau")
        series = {}
        for name in dict.fromkeys(r.scheme for r in agg):
            sel = sorted((r for r in agg if r.scheme == name), key=lambda r: r.sample_size)
            series[name] = (
                [r.sample_size for r in sel], [r.value for r in sel],
                [r.ci_low for r in sel], [r.ci_high for r in sel],
            )
        path = out / "tau_sweep.svg"
        path.write_text(line_plot_svg(series, "SNR threshold tau along selection order",
                                      "sample index i", "tau(S_i, v_i)"))
        paths.append(path)
    return paths


class _Check:
    def __init__(self):
        self.count = 0
        self.failures = 0
        self.worst = 0.0

    def add(self, ok, residual=0.0):
        self.count += 1
        self.failures += 0 if ok else 1
        if np.isfinite(residual):
            self.worst = max(self.worst, float(residual))
        else:
            self.worst = float("inf")

    def result(self, passed=None):
        passed = self.failures == 0 if passed is None else passed
        return {"passed": bool(passed), "count": self.count, "failures": self.failures,
                "worst_residual": self.worst}


def random_pairs(b, n_pairs, rng):
    """Random ``(S, v)`` pairs; sizes uniform on ``1..N``, ``v`` uniform in ``S``."""
    pairs = []
    for _ in range(n_pairs):
        size = int(rng.integers(1, b.n + 1))
        s = SampleSet(rng.permutation(b.n)[:size])
        pairs.append((s, int(s[rng.integers(size)])))
    return pairs


def _lemma_and_theorem1(b, pairs, checks, improves):
    for s, v in pairs:
        reduced = s.without(v)
        r_full, r_red = ls_operator(b, s), ls_operator(b, reduced)
        raw_full, raw_red = xi1(b, r_full, snap=False), xi1(b, r_red, snap=False)
        raw_d1 = raw_full - raw_red
        checks["lemma_delta1_discrete"].add(
            min(abs(raw_d1), abs(raw_d1 + 1)) <= 1e-6, min(abs(raw_d1), abs(raw_d1 + 1))
        )
        for r, raw in ((r_full, raw_full), (r_red, raw_red)):
            rows = restrict_rows(b.u_k, r.sample_set)
            # NumPy's default rank cutoff, independent of the library's own rule.
            rank = int(np.linalg.matrix_rank(rows)) if rows.size else 0
            checks["lemma_xi1_rank"].add(abs(raw - (b.k - rank)) <= 1e-6, abs(raw - (b.k - rank)))
            if rank:
                eig = np.sort(np.linalg.eigvalsh(gram(b, r.sample_set)))[::-1][:rank]
                ref = float(np.sum(1.0 / eig))
            else:
                ref = 0.0
            rel = abs(xi2(r) - ref) / max(abs(ref), 1e-300) if ref else abs(xi2(r))
            checks["lemma_xi2_eigen"].add(rel <= 1e-6, rel)
        eff = removal_effect(b, s, v)
        checks["lemma_sign_equivalence"].add((eff.delta1 < -0.5) == (eff.delta2 > 0))
        t1 = checks["theorem1"]
        if eff.tau > 0:
            lo_snr, hi_snr = eff.tau / 2, 2 * eff.tau
            d_lo = mse_change_on_removal(b, s, v, lo_snr)
            d_hi = mse_change_on_removal(b, s, v, hi_snr)
            t1.add(improves(eff, lo_snr) and d_lo > 0)
            t1.add(not improves(eff, hi_snr) and d_hi < 0)
            checks["theorem1_boundary"].add(not improves(eff, eff.tau))
        else:
            for snr in (0.01, 1.0, 100.0):
                t1.add(not improves(eff, snr) and mse_change_on_removal(b, s, v, snr) <= 0)


def verify_theorems(cfg, improves=removal_improves):
    """Run every identity and theorem check on the config's graphs.

    Returns ``{"metadata": ..., "checks": {name: {passed, count, failures,
    worst_residual}}, "passed": bool}``. ``improves`` is the removal
    predicate under test; it exists so the checks can be mutation-tested.
    """
    names = ["lemma_delta1_discrete", "lemma_sign_equivalence", "lemma_xi1_rank",
             "lemma_xi2_eigen", "theorem1", "theorem1_boundary", "theorem2", "theorem3"]
    checks = {n: _Check() for n in names}
    mc = _Check()
    rng = np.random.default_rng(derive_seed(cfg.seed, 4))
    bands = [make_band(cfg, i) for i in range(cfg.n_graph_instances)]
    greedy = [c for c in cfg.scheme_objects if not isinstance(c, WeightedRandom)] or list(Criterion)
    for b in bands:
        _lemma_and_theorem1(b, random_pairs(b, cfg.verify_pairs, rng), checks, improves)
        for _ in range(cfg.verify_orderings):
            count = int(np.count_nonzero(tau_along_ordering(b, rng.permutation(b.n)) > 0))
            checks["theorem2"].add(count == b.k, abs(count - b.k))
        m_max = min(b.n, max(cfg.sample_size_range[1], b.k))
        for c in greedy:
            order = greedy_select(b, c, m_max)
            checks["theorem3"].add(verify_noiseless_optimal_prefix(b, order))
            for m in range(1, m_max + 1):
                prefix = order[:m]
                later = prefix if m <= b.k else prefix[b.k:]
                for v in later:
                    tau = removal_effect(b, prefix, v).tau
                    checks["theorem3"].add(tau > 0 if m <= b.k else tau <= 0)
    for cell in range(cfg.verify_mc_cells):
        b = bands[cell % len(bands)]
        scheme = cfg.scheme_objects[int(rng.integers(len(cfg.scheme_objects)))]
        m = int(rng.integers(0, min(b.n, 3 * b.k) + 1))
        snr = float(cfg.snr_list[int(rng.integers(len(cfg.snr_list)))])
        r = ls_operator(b, select(b, instance_scheme(scheme, cfg, cell), m))
        nm = NoiseModel(snr, b.k, b.n)
        analytic = expected_mse(b, r, nm).expected_mse
        mean, se = monte_carlo_mse(b, r, nm, cfg.verify_mc_signals, derive_seed(cfg.seed, 5, cell))
        z = abs(mean - analytic) / se if se > 0 else (0.0 if abs(mean - analytic) <= 1e-10 else np.inf)
        mc.add(z <= 3.0, z)
    report = {name: chk.result() for name, chk in checks.items()}
    # Statistical check: allow the 2-in-30 miss rate of a 3-sigma band.
    report["monte_carlo"] = mc.result(passed=mc.failures <= (2 * mc.count) // 30)
    return {
        "metadata": cfg.metadata(),
        "checks": report,
        "passed": all(r["passed"] for r in report.values()),
    }
