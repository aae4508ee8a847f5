"""Experiment orchestration: trials, CSV records and JSON summaries.

Records CSV header::

    kind,n,trial,seed,algo,size,flag,runtime_ms

Summaries use the population standard deviation (divisor = count).
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import statistics
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

from .graph import sample_pair
from .greedy import greedy_size_threshold, greedy_lcis
from .iso import exact_lcis, iso_prob_bound, iso_prob_exact
from .ogp import OgpParams, build_family, run_family, stopping_time_tau
from .online import greedy_as_online, run_online
from .rng import derive_seed

KINDS = ("greedy-scaling", "exact-vs-greedy", "ogp-family", "iso-prob")
CSV_FIELDS = ("kind", "n", "trial", "seed", "algo", "size", "flag", "runtime_ms")


class ExperimentError(RuntimeError):
    pass


@dataclass
class ExperimentConfig:
    kind: str
    n_values: list[int]
    trials: int = 1
    master_seed: int = 0
    out: Optional[str] = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}; expected one of {KINDS}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        self.n_values = [int(n) for n in self.n_values]
        if any(n < 1 for n in self.n_values):
            raise ValueError("n values must be positive")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        n_values = d.pop("n_values", d.pop("n", []))
        if isinstance(n_values, int):
            n_values = [n_values]
        known = {"kind", "trials", "master_seed", "out", "params"}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown config keys: {sorted(extra)}")
        return cls(n_values=n_values, **d)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass(frozen=True)
class TrialRecord:
    kind: str
    n: int
    trial: int
    seed: int
    algo: str
    size: int
    flag: str = ""
    runtime_ms: float = 0.0

    def to_row(self) -> dict:
        row = asdict(self)
        row["runtime_ms"] = f"{self.runtime_ms:.3f}"
        return row

    @classmethod
    def from_row(cls, row: dict) -> "TrialRecord":
        return cls(
            kind=row["kind"],
            n=int(row["n"]),
            trial=int(row["trial"]),
            seed=int(row["seed"]),
            algo=row["algo"],
            size=int(row["size"]),
            flag=row["flag"],
            runtime_ms=float(row["runtime_ms"]),
        )


def trial_seed(master_seed: int, n: int, trial: int) -> int:
    return derive_seed(master_seed, n, trial)


# per-trial workers ------------------------------------------------------------


def _timed(fn, *args, **kw):
    t0 = time.perf_counter()
    out = fn(*args, **kw)
    return out, (time.perf_counter() - t0) * 1e3


def _run_trial(kind: str, n: int, trial: int, seed: int, params: dict) -> list[TrialRecord]:
    if kind == "iso-prob":
        p, ms = _timed(iso_prob_exact, n)
        return [TrialRecord(kind, n, trial, seed, "iso-exact", n, str(p), ms)]

    y = sample_pair(n, seed)
    if kind == "greedy-scaling":
        (sol, _), ms = _timed(greedy_lcis, y, transcript=False)
        return [TrialRecord(kind, n, trial, seed, "greedy", sol.size, "", ms)]

    if kind == "exact-vs-greedy":
        (sol, _), gms = _timed(greedy_lcis, y, transcript=False)
        res, ems = _timed(exact_lcis, y, params.get("budget"))
        return [
            TrialRecord(kind, n, trial, seed, "greedy", sol.size, "", gms),
            TrialRecord(kind, n, trial, seed, "exact", res.size, res.flag, ems),
        ]

    if kind == "ogp-family":
        ogp = OgpParams.from_eps(float(params.get("eps", 1.0)), n)
        m = int(params.get("m", ogp.m))
        (sol, tr), ms = _timed(run_online, greedy_as_online(), y, seed)
        tau = stopping_time_tau(tr, max(1, ogp.tau_threshold))
        fam = build_family(y, tr, tau, m, derive_seed(seed, 0xFA))
        run, fms = _timed(run_family, greedy_as_online(), fam, ogp.large_size, seed)
        out = []
        for i, size in enumerate(run.sizes, start=1):
            flag = f"tau={tau};{'large' if ogp.is_large(size) else 'small'}"
            out.append(TrialRecord(kind, n, trial, seed, f"greedy/member{i}", size, flag,
                                   ms if i == 1 else fms / max(1, m - 1)))
        return out

    raise ValueError(f"unknown kind {kind!r}")


def _run_trial_packed(args):
    return _run_trial(*args)


# summaries ----------------------------------------------------------------------


def _stats(values: list[float]) -> dict:
    return {
        "count": len(values),
        "mean": statistics.fmean(values),
        "std": statistics.pstdev(values),
        "min": min(values),
        "max": max(values),
    }


def _clean(x):
    # JSON has no NaN/inf
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, list):
        return [_clean(v) for v in x]
    return x


def summarize(records: list[TrialRecord], params: Optional[dict] = None) -> dict:
    """Deterministic, order-independent aggregation of one experiment's records."""
    params = params or {}
    kinds = {r.kind for r in records}
    if len(kinds) > 1:
        raise ValueError(f"records mix experiment kinds: {sorted(kinds)}")
    kind = kinds.pop() if kinds else None
    recs = sorted(records, key=lambda r: (r.n, r.trial, r.algo))
    trials = {(r.n, r.trial) for r in recs}
    summary: dict = {
        "kind": kind,
        "std_convention": "population",
        "trials": len(trials),
        "records": len(recs),
        "per_n": {},
        "criteria": [],
    }
    if not recs:
        summary["note"] = "zero trials"
        summary["pass"] = True
        return summary

    by_n: dict[int, list[TrialRecord]] = {}
    for r in recs:
        by_n.setdefault(r.n, []).append(r)

    for n, rs in by_n.items():
        algos = sorted({r.algo for r in rs})
        entry = {a: _stats([r.size for r in rs if r.algo == a]) for a in algos}
        if kind == "greedy-scaling":
            g = entry["greedy"]
            g["ratio"] = g["mean"] / (2 * math.log2(n)) if n > 1 else float("nan")
            thr_e, thr_2 = greedy_size_threshold(n, "e"), greedy_size_threshold(n, "2")
            g["threshold_ln"] = thr_e
            g["threshold_log2"] = thr_2
            summary["criteria"].append({
                "name": f"min size >= 2log2(n) - 9 ln ln n at n={n}",
                "value": g["min"], "threshold": thr_e, "pass": g["min"] >= thr_e,
            })
        elif kind == "exact-vs-greedy":
            pairs = {}
            for r in rs:
                pairs.setdefault(r.trial, {})[r.algo] = r
            dominated = all(p["exact"].size >= p["greedy"].size for p in pairs.values())
            strict = sum(p["exact"].size > p["greedy"].size for p in pairs.values())
            optimal = sum(p["exact"].flag == "optimal" for p in pairs.values())
            entry["strictly_greater_fraction"] = strict / len(pairs)
            entry["optimal_fraction"] = optimal / len(pairs)
            summary["criteria"].append({
                "name": f"exact >= greedy in every trial at n={n}", "pass": dominated,
            })
        elif kind == "ogp-family":
            ogp = OgpParams.from_eps(float(params.get("eps", 1.0)), n)
            per_trial: dict[int, list[TrialRecord]] = {}
            for r in rs:
                per_trial.setdefault(r.trial, []).append(r)
            e = sum(any(r.algo == "greedy/member1" and ogp.is_large(r.size) for r in t)
                    for t in per_trial.values())
            s = sum(all(ogp.is_large(r.size) for r in t) for t in per_trial.values())
            k = len(per_trial)
            entry["pr_E"] = e / k
            entry["pr_S"] = s / k
            entry["m"] = len(next(iter(per_trial.values())))
            entry["large_size"] = ogp.large_size
        elif kind == "iso-prob":
            from fractions import Fraction
            exact = Fraction(rs[0].flag)
            bound = iso_prob_bound(n, exact=True)
            entry["exact"] = str(exact)
            entry["bound"] = str(bound)
            summary["criteria"].append({
                "name": f"iso_prob_exact({n}) <= k! 2^-C(k,2)",
                "exact": float(exact), "bound": float(bound), "pass": exact <= bound,
            })
        summary["per_n"][str(n)] = entry
    summary["pass"] = all(c["pass"] for c in summary["criteria"])
    return _clean(summary)


# I/O ----------------------------------------------------------------------------


def records_to_csv(records: list[TrialRecord]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in records:
        w.writerow(r.to_row())
    return buf.getvalue()


def records_from_csv(text: str) -> list[TrialRecord]:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_FIELDS:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    return [TrialRecord.from_row(row) for row in reader]


def read_records(path) -> list[TrialRecord]:
    with open(path, newline="") as fh:
        return records_from_csv(fh.read())


def _check_writable(out: Path) -> None:
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = tempfile.NamedTemporaryFile(dir=out, delete=True)
        probe.close()
    except OSError as exc:
        raise ExperimentError(f"output path {out} is not writable: {exc}") from exc


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".part")
    try:
        tmp.write_text(text)
        os.replace(tmp, path)
    except OSError as exc:
        tmp.unlink(missing_ok=True)
        raise ExperimentError(f"failed writing {path}: {exc}") from exc


def run_experiment(config: ExperimentConfig, jobs: int = 1) -> tuple[list[TrialRecord], dict]:
    """Run every (n, trial) of ``config``; write ``records.csv`` and ``summary.json``
    into ``config.out`` when it is set.

    Trial seeds are ``derive_seed(master_seed, n, trial)``, so the records
    (apart from ``runtime_ms``) depend on the config only.
    """
    out = Path(config.out) if config.out else None
    if out is not None:
        _check_writable(out)
    work = [(config.kind, n, i, trial_seed(config.master_seed, n, i), config.params)
            for n in config.n_values for i in range(config.trials)]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_run_trial_packed, work))
    else:
        chunks = [_run_trial_packed(w) for w in work]
    records = [r for chunk in chunks for r in chunk]
    records.sort(key=lambda r: (r.n, r.trial))
    summary = summarize(records, config.params)
    summary["kind"] = config.kind
    summary["config"] = {
        "kind": config.kind, "n_values": config.n_values, "trials": config.trials,
        "master_seed": config.master_seed, "params": config.params,
    }
    if out is not None:
        csv_path, json_path = out / "records.csv", out / "summary.json"
        try:
            _write_atomic(csv_path, records_to_csv(records))
            _write_atomic(json_path, json.dumps(summary, indent=2, sort_keys=True) + "\n")
        except ExperimentError:
            csv_path.unlink(missing_ok=True)
            json_path.unlink(missing_ok=True)
            raise
    return records, summary
