"""
Replication engine for VAR(1) experiments.

Every replication r owns ``RngStream(seed, r)``; a trajectory of length
max(sample_sizes) is simulated once and each requested n uses its first n
rows. Replications may run in a thread pool, but results are gathered in
replication order, so outputs do not depend on the worker count.
"""

import csv
import hashlib
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .autocov import autocov_range
from .chain_io import summarize
from .errors import ConfigError, MsveError, NotPositiveDefiniteError
from .inference import ellipsoid, ellipsoid_volume_pth_root, univariate_boxes
from .msve import msve_from_autocov
from .numerics import RngStream
from .var1 import spec_from_dict, truth, simulate
from .windows import TruncationRule, parse_window

__all__ = [
    "ExperimentConfig",
    "SweepReport",
    "CoverageReport",
    "run_sweep",
    "run_eigdist",
    "run_coverage",
    "provenance",
    "write_csv",
    "write_json",
]

DEFAULT_WINDOWS = ("bartlett", "tukey-hanning", "scaled-bartlett,eta=2")


@dataclass
class ExperimentConfig:
    """Settings for a sweep, eigenvalue-distribution or coverage run.

    ``spec`` is either ``{"setting": k}`` or a VAR(1) description accepted by
    :func:`msvekit.var1.spec_from_dict`.
    """

    spec: dict = field(default_factory=lambda: {"setting": 1})
    windows: list = field(default_factory=lambda: list(DEFAULT_WINDOWS))
    nu: float = 1.0 / 3.0
    sample_sizes: list = field(default_factory=lambda: [1000, 5000, 10000, 50000, 100000])
    replications: int = 100
    seed: int = 0
    level: float = 0.9
    outputs: str = "."
    independent_samples: bool = False
    threads: int = 1

    def __post_init__(self):
        if isinstance(self.spec, int):
            self.spec = {"setting": self.spec}
        self.windows = list(self.windows)
        self.sample_sizes = sorted(int(n) for n in self.sample_sizes)
        self.validate()

    def validate(self):
        if int(self.replications) < 1:
            raise ConfigError(f"replications must be >= 1, got {self.replications}")
        if not self.sample_sizes:
            raise ConfigError("sample_sizes is empty")
        if not self.windows:
            raise ConfigError("windows is empty")
        if not 0.0 < self.level < 1.0:
            raise ConfigError(f"level must lie in (0, 1), got {self.level}")
        if int(self.threads) < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads}")
        try:
            rule = self.rule()
            for w in self.windows:
                parse_window(w)
        except MsveError as err:
            raise ConfigError(str(err)) from err
        for n in self.sample_sizes:
            b = rule(n)
            if not n > 2 * b:
                raise ConfigError(f"sample size {n} violates n > 2*b_n (b_n={b})")

    def rule(self):
        return TruncationRule(self.nu)

    def window_objects(self):
        return [parse_window(w) for w in self.windows]

    def var1_spec(self):
        try:
            return spec_from_dict(self.spec)
        except MsveError as err:
            raise ConfigError(str(err)) from err

    @classmethod
    def from_dict(cls, d):
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known - {"setting"}
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        d = dict(d)
        if "setting" in d:
            d["spec"] = {"setting": d.pop("setting")}
        return cls(**d)

    @classmethod
    def from_json(cls, path):
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def canonical(self):
        """Config fields that determine results (threads and output dir excluded)."""
        d = asdict(self)
        d.pop("threads")
        d.pop("outputs")
        return d


def provenance(config=None, command=None):
    block = {"toolkit": "msvekit", "version": __version__}
    if command is not None:
        block["command"] = command
    if config is not None:
        canon = config.canonical() if isinstance(config, ExperimentConfig) else config
        text = json.dumps(canon, sort_keys=True, separators=(",", ":"))
        block["config_hash"] = hashlib.sha256(text.encode()).hexdigest()
        block["seed"] = canon.get("seed")
        block["config"] = canon
    return block


def _stream_id(rep, j, independent):
    # distinct per (rep, sample size) only when samples are independent
    return ((j + 1) << 32) | rep if independent else rep


def _map_reps(fn, config):
    reps = range(int(config.replications))
    if config.threads == 1:
        return [fn(r) for r in reps]
    with ThreadPoolExecutor(max_workers=int(config.threads)) as pool:
        return list(pool.map(fn, reps))


def _chains_for_rep(spec, config, rep):
    """Yield (n, chain) pairs for one replication."""
    ns = config.sample_sizes
    if config.independent_samples:
        for j, n in enumerate(ns):
            yield n, simulate(spec, n, RngStream(config.seed, _stream_id(rep, j, True)))
    else:
        full = simulate(spec, ns[-1], RngStream(config.seed, _stream_id(rep, 0, False)))
        for n in ns:
            yield n, full.head(n)


@dataclass
class SweepReport:
    """Per-replication estimation errors plus their per-(window, n) summaries."""

    rows: list
    summary: list
    true_lambda1: float
    provenance: dict

    def summary_for(self, window, n):
        for row in self.summary:
            if row["window"] == window and row["n"] == n:
                return row
        raise KeyError((window, n))


def _mean_se(values):
    v = np.asarray(values, dtype=float)
    mean = float(v.mean())
    se = float(v.std(ddof=1) / math.sqrt(v.size)) if v.size > 1 else None
    return mean, se


def run_sweep(config, command="sweep"):
    """Relative Frobenius and max-eigenvalue errors of the MSVE over replications."""
    spec = config.var1_spec()
    tr = truth(spec)
    sigma = tr.Sigma
    sigma_norm = float(np.linalg.norm(sigma))
    lam1 = float(tr.sigma_eigenvalues[0])
    windows = config.window_objects()
    rule = config.rule()

    def one(rep):
        out = []
        for n, chain in _chains_for_rep(spec, config, rep):
            b = rule(n)
            seq = autocov_range(chain, b)
            for w in windows:
                est = msve_from_autocov(seq, w)
                l1 = float(est.eigenvalues[0])
                out.append({
                    "window": w.label,
                    "n": n,
                    "replication": rep,
                    "b_n": b,
                    "frobenius_rel_error": float(np.linalg.norm(est.matrix - sigma)) / sigma_norm,
                    "lambda1": l1,
                    "lambda1_rel_error": abs(l1 - lam1) / lam1,
                    "positive_definite": est.is_positive_definite,
                })
        return out

    rows = [row for chunk in _map_reps(one, config) for row in chunk]
    order = {w.label: i for i, w in enumerate(windows)}
    rows.sort(key=lambda r: (order[r["window"]], r["n"], r["replication"]))

    summary = []
    for w in windows:
        for n in config.sample_sizes:
            sel = [r for r in rows if r["window"] == w.label and r["n"] == n]
            fm, fse = _mean_se([r["frobenius_rel_error"] for r in sel])
            em, ese = _mean_se([r["lambda1_rel_error"] for r in sel])
            l1 = np.array([r["lambda1"] for r in sel])
            summary.append({
                "window": w.label,
                "n": n,
                "b_n": sel[0]["b_n"],
                "replications": len(sel),
                "frobenius_rel_error_mean": fm,
                "frobenius_rel_error_se": fse,
                "lambda1_rel_error_mean": em,
                "lambda1_rel_error_se": ese,
                "lambda1_mean": float(l1.mean()),
                "lambda1_sd": float(l1.std(ddof=1)) if l1.size > 1 else None,
            })
    prov = provenance(config, command)
    prov["true_lambda1"] = lam1
    return SweepReport(rows=rows, summary=summary, true_lambda1=lam1, provenance=prov)


def run_eigdist(config):
    """Per-replication largest eigenvalue of each estimate (for density plots)."""
    return run_sweep(config, command="eigdist")


@dataclass
class CoverageReport:
    rows: list
    provenance: dict

    def row(self, method, n):
        for r in self.rows:
            if r["method"] == method and r["n"] == n:
                return r
        raise KeyError((method, n))


COVERAGE_METHODS = ("ellipsoid", "bonferroni-box", "uncorrected-box")


def run_coverage(config):
    """Coverage of the true mean (zero) by the ellipsoid and both boxes.

    Uses the first window in the config. Replications whose estimate is not
    positive definite count as non-covering for the ellipsoid and are
    tallied in ``non_pd``.
    """
    spec = config.var1_spec()
    theta = np.zeros(spec.p)
    w = config.window_objects()[0]
    rule = config.rule()
    level = config.level

    def one(rep):
        out = {}
        for n, chain in _chains_for_rep(spec, config, rep):
            b = rule(n)
            est = msve_from_autocov(autocov_range(chain, b), w)
            summ = summarize(chain)
            res = {}
            try:
                ell = ellipsoid(est, summ, n, level)
                res["ellipsoid"] = (ell.contains(theta), ellipsoid_volume_pth_root(est, n, level))
            except NotPositiveDefiniteError:
                res["ellipsoid"] = (False, float("nan"))
            for method, corrected in (("bonferroni-box", True), ("uncorrected-box", False)):
                box = univariate_boxes(est, summ, n, level, corrected=corrected)
                res[method] = (box.contains(theta), box.volume_pth_root())
            out[n] = (res, est.is_positive_definite)
        return out

    per_rep = _map_reps(one, config)
    rows = []
    for n in config.sample_sizes:
        for method in COVERAGE_METHODS:
            hits = np.array([r[n][0][method][0] for r in per_rep], dtype=float)
            vols = np.array([r[n][0][method][1] for r in per_rep], dtype=float)
            vols = vols[np.isfinite(vols)]
            cov = float(hits.mean())
            rows.append({
                "method": method,
                "n": n,
                "replications": int(hits.size),
                "coverage": cov,
                "coverage_se": math.sqrt(cov * (1.0 - cov) / hits.size),
                "volume_pth_root_mean": float(vols.mean()) if vols.size else None,
                "volume_pth_root_se": float(vols.std(ddof=1) / math.sqrt(vols.size)) if vols.size > 1 else None,
                "non_pd": int(sum(not r[n][1] for r in per_rep)),
            })
    return CoverageReport(rows=rows, provenance=provenance(config, "coverage"))


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(path, rows, columns=None):
    """Write dict rows with exact (repr) float formatting and LF line endings."""
    if columns is None:
        columns = list(rows[0]) if rows else []
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(c)) for c in columns])
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _clean(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def dumps(obj):
    obj = json.loads(json.dumps(obj, default=_json_default))
    return json.dumps(_clean(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_json(path, obj):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(dumps(obj))


def ensure_dir(path):
    os.makedirs(path, exist_ok=True)
    return path
