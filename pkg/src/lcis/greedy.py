"""The greedy online algorithm for common induced subgraphs.

Both graphs are processed in natural vertex order.  At step i the candidates
j = 0..i are scanned in order; for each j the pair (u_i, v_j) is tried first
(if v_j is unmatched), then (u_j, v_i) (if u_j is unmatched).  The first pair
whose connections to the matched vertices agree is added.
"""

from __future__ import annotations

import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .graph import GraphPair, sample_pair
from .iso import Solution, adjacency_masks
from .rng import derive_seed
from .transcript import RoundRecord, Transcript


class ContractError(ValueError):
    pass


def identical_connections(u: int, v: int, s1, s2, y: GraphPair) -> bool:
    """Whether u ~ s1[i] in G1 exactly when v ~ s2[i] in G2, for every i."""
    if len(s1) != len(s2):
        raise ContractError("matched lists differ in length")
    if u in s1 or v in s2:
        raise ContractError(f"vertex already matched: u={u} in s1 or v={v} in s2")
    if not s1:
        return True
    r1 = y.g1.row(u)[list(s1)]
    r2 = y.g2.row(v)[list(s2)]
    return bool(np.array_equal(r1, r2))


class _Signatures:
    """Adjacency of every vertex to the matched list, packed into words.

    Bit k of vertex x's signature is its edge status to the k-th matched
    vertex, so IdenticalConnections(u, v) is equality of signatures.
    """

    def __init__(self, n: int):
        self.words = np.zeros((n, 1), dtype=np.uint64)
        self.k = 0
        self.keys: list = [0] * n

    def push(self, column: np.ndarray) -> None:
        w, b = divmod(self.k, 64)
        if w == self.words.shape[1]:
            self.words = np.hstack([self.words, np.zeros((len(self.words), 1), np.uint64)])
        self.words[:, w] |= column.astype(np.uint64) << np.uint64(b)
        self.k += 1
        if self.words.shape[1] == 1:
            self.keys = self.words[:, 0].tolist()
        else:
            self.keys = [row.tobytes() for row in self.words]

    def first_index(self, upto: int, matched: np.ndarray) -> dict:
        # signature -> smallest unmatched index among 0..upto
        idx = np.flatnonzero(~matched[: upto + 1])
        if self.words.shape[1] == 1:
            uniq, first = np.unique(self.words[idx, 0], return_index=True)
            return dict(zip(uniq.tolist(), idx[first].tolist()))
        table: dict = {}
        for j in idx.tolist():
            table.setdefault(self.keys[j], j)
        return table


def greedy_lcis(y: GraphPair, transcript: bool = True) -> tuple[Solution, Optional[Transcript]]:
    """Run the greedy algorithm; returns the solution and (optionally) its transcript.

    Candidates are looked up by signature rather than scanned, which yields
    the same pair as the scan: the smallest passing j, with (u_i, v_j)
    preferred over (u_j, v_i) at equal j.
    """
    n = y.n
    g1, g2 = y
    sig1, sig2 = _Signatures(n), _Signatures(n)
    matched1 = np.zeros(n, dtype=bool)
    matched2 = np.zeros(n, dtype=bool)
    table1: dict = {}
    table2: dict = {}
    s1: list[int] = []
    s2: list[int] = []
    tr = Transcript(n) if transcript else None

    for i in range(n):
        assert not matched1[i] and not matched2[i], "processed vertex already matched"
        k1, k2 = sig1.keys[i], sig2.keys[i]
        table1.setdefault(k1, i)
        table2.setdefault(k2, i)
        j1 = table2.get(k1)  # (u_i, v_j)
        j2 = table1.get(k2)  # (u_j, v_i)
        add = None
        if j1 is not None and (j2 is None or j1 <= j2):
            add = (i, j1)
        elif j2 is not None:
            add = (j2, i)
        if add is not None:
            a, b = add
            s1.append(a)
            s2.append(b)
            matched1[a] = matched2[b] = True
            sig1.push(g1.row(a))
            sig2.push(g2.row(b))
            table1 = sig1.first_index(i, matched1)
            table2 = sig2.first_index(i, matched2)
        if tr is not None:
            tr.rounds.append(RoundRecord(i + 1, (i, i), g1.row(i)[:i], g2.row(i)[:i], add))
    return Solution(s1, s2), tr


def greedy_lcis_literal(y: GraphPair) -> Solution:
    """Line-by-line transcription of the algorithm (O(n^3)); reference for tests."""
    n = y.n
    m1, m2 = adjacency_masks(y.g1), adjacency_masks(y.g2)
    s1: list[int] = []
    s2: list[int] = []

    def identical(u, v):
        return all(((m1[u] >> a) & 1) == ((m2[v] >> b) & 1) for a, b in zip(s1, s2))

    for i in range(n):
        j = 0
        added = False
        while not added and j <= i:
            if j not in s2 and identical(i, j):
                s1.append(i)
                s2.append(j)
                added = True
            elif j not in s1 and identical(j, i):
                s1.append(j)
                s2.append(i)
                added = True
            else:
                j += 1
    return Solution(s1, s2)


def greedy_size_threshold(n: int, log: str = "e") -> float:
    """``2 log2 n - 9 log log n`` with the outer logs natural (``"e"``) or base 2."""
    if n < 2:
        return float("-inf")
    if log == "e":
        return 2 * math.log2(n) - 9 * math.log(math.log(n))
    if log == "2":
        return 2 * math.log2(n) - 9 * math.log2(math.log2(n))
    raise ValueError(f"unknown log base {log!r}")


@dataclass
class GreedyStats:
    n: int
    trials: int
    master_seed: int
    seeds: list[int]
    sizes: list[int]
    runtime_ms: list[float]
    sample_ms: list[float] = field(default_factory=list)

    @property
    def min(self) -> int:
        return min(self.sizes)

    @property
    def max(self) -> int:
        return max(self.sizes)

    @property
    def mean(self) -> float:
        return statistics.fmean(self.sizes)

    @property
    def std(self) -> float:
        return statistics.pstdev(self.sizes)

    @property
    def ratio(self) -> float:
        """mean size / (2 log2 n)"""
        return self.mean / (2 * math.log2(self.n)) if self.n > 1 else float("nan")

    @property
    def median_runtime_ms(self) -> float:
        return statistics.median(self.runtime_ms)

    def summary(self) -> dict:
        return {
            "n": self.n,
            "trials": self.trials,
            "master_seed": self.master_seed,
            "min": self.min,
            "mean": self.mean,
            "max": self.max,
            "std": self.std,
            "ratio": self.ratio,
            "threshold_ln": greedy_size_threshold(self.n, "e"),
            "threshold_log2": greedy_size_threshold(self.n, "2"),
            "median_runtime_ms": self.median_runtime_ms,
            "mean_runtime_ms": statistics.fmean(self.runtime_ms),
        }


def _trial(args):
    n, seed = args
    t0 = time.perf_counter()
    y = sample_pair(n, seed)
    t1 = time.perf_counter()
    sol, _ = greedy_lcis(y, transcript=False)
    t2 = time.perf_counter()
    return sol.size, (t2 - t1) * 1e3, (t1 - t0) * 1e3


def greedy_size_stats(n: int, trials: int, master_seed: int, jobs: int = 1) -> GreedyStats:
    """Greedy on ``trials`` independent pairs; trial i uses derive_seed(master_seed, n, i).

    ``runtime_ms`` times the greedy run alone; sampling time is in ``sample_ms``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    seeds = [derive_seed(master_seed, n, i) for i in range(trials)]
    work = [(n, s) for s in seeds]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_trial, work))
    else:
        results = [_trial(w) for w in work]
    return GreedyStats(
        n=n,
        trials=trials,
        master_seed=master_seed,
        seeds=seeds,
        sizes=[r[0] for r in results],
        runtime_ms=[r[1] for r in results],
        sample_ms=[r[2] for r in results],
    )
