"""Driver for online LCIS algorithms with mechanically enforced rules.

Each round t = 1..n the strategy first selects a fresh vertex pair
(one unprocessed vertex per graph).  The driver then reveals the edge status
between each new vertex and the vertices processed before it, and asks the
strategy for an update: either nothing, or a pair ``(a, b)`` of processed,
unmatched vertices with ``a`` or ``b`` being the vertex selected this round.
The added pair must extend the positional isomorphism between the matched
lists.  Any other move aborts the run with :class:`OnlineViolation`.

Strategies only see a :class:`View`, which answers edge queries for
revealed pairs and refuses everything else.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Protocol

import numpy as np

from .graph import GraphPair
from .iso import Solution
from .transcript import RoundRecord, Transcript

FRESHNESS = "freshness"
REVEAL = "reveal-exactness"
MEMBERSHIP = "membership"
ANCHOR = "anchor-vertex"
ISOMORPHISM = "isomorphism-maintenance"
LENGTH = "round-count"


class OnlineViolation(Exception):
    """A strategy move broke one of the online rules."""

    def __init__(self, t: int, clause: str, detail: str = ""):
        super().__init__(f"round {t}: {clause} violated" + (f" ({detail})" if detail else ""))
        self.t = t
        self.clause = clause
        self.detail = detail


class InformationLeak(LookupError):
    """A strategy asked for an edge that has not been revealed."""


class View:
    """What a strategy may see: processed vertices, revealed edges, solution so far.

    ``t`` is the current round.  During ``select_next`` the reveals are those
    of round ``t - 1``; during ``update`` they are the ones just made.
    ``reveal1[k]`` is the edge between ``P1[-1]`` and ``P1[k]``.
    """

    def __init__(self, n: int, seed: int):
        self.n = n
        self.seed = seed
        self.t = 0
        self.P1: tuple[int, ...] = ()
        self.P2: tuple[int, ...] = ()
        self.S1: tuple[int, ...] = ()
        self.S2: tuple[int, ...] = ()
        self.reveal1 = np.zeros(0, dtype=bool)
        self.reveal2 = np.zeros(0, dtype=bool)
        self._known = (np.zeros((n, n), dtype=bool), np.zeros((n, n), dtype=bool))
        self._seen = (np.zeros(n, dtype=bool), np.zeros(n, dtype=bool))
        self._order = (np.zeros(n, dtype=np.intp), np.zeros(n, dtype=np.intp))

    def order(self, j: int) -> np.ndarray:
        """Processing order of graph ``j`` as a read-only array (same as P1/P2)."""
        out = self._order[j - 1][: len(self.P1)]
        out.flags.writeable = False
        return out

    def adjacent(self, j: int, u: int, v: int) -> bool:
        """Revealed edge status of {u, v} in graph ``j`` (1 or 2)."""
        if j not in (1, 2):
            raise ValueError("graph index must be 1 or 2")
        seen = self._seen[j - 1]
        if u == v or not (0 <= u < self.n and 0 <= v < self.n) or not (seen[u] and seen[v]):
            raise InformationLeak(f"edge {{{u}, {v}}} of G{j} has not been revealed")
        return bool(self._known[j - 1][u, v])

    def _reveal(self, j: int, v: int, bits: np.ndarray) -> None:
        t = len(bits)
        prior = self._order[j - 1][:t]
        known = self._known[j - 1]
        known[v, prior] = bits
        known[prior, v] = bits
        self._seen[j - 1][v] = True
        self._order[j - 1][t] = v


class OnlineStrategy(Protocol):
    def start(self, n: int, seed: int) -> None: ...

    def select_next(self, view: View) -> tuple[int, int]: ...

    def update(self, view: View) -> Optional[tuple[int, int]]: ...


def run_online(strategy: OnlineStrategy, y: GraphPair, seed: int = 0) -> tuple[Solution, Transcript]:
    """Play ``strategy`` on ``y`` for n rounds, enforcing every rule."""
    n = y.n
    g1, g2 = y
    view = View(n, seed)
    P1: list[int] = []
    P2: list[int] = []
    S1: list[int] = []
    S2: list[int] = []
    inP = (np.zeros(n, dtype=bool), np.zeros(n, dtype=bool))
    inS = (np.zeros(n, dtype=bool), np.zeros(n, dtype=bool))
    transcript = Transcript(n)
    strategy.start(n, seed)

    for t in range(1, n + 1):
        view.t = t
        sel = strategy.select_next(view)
        try:
            v1, v2 = (int(x) for x in sel)
        except (TypeError, ValueError):
            raise OnlineViolation(t, FRESHNESS, f"malformed selection {sel!r}") from None
        for j, v in ((0, v1), (1, v2)):
            if not 0 <= v < n or inP[j][v]:
                raise OnlineViolation(t, FRESHNESS, f"G{j + 1} vertex {v} is not fresh")
        r1 = g1.row(v1)[view._order[0][: t - 1]]
        r2 = g2.row(v2)[view._order[1][: t - 1]]
        view._reveal(1, v1, r1)
        view._reveal(2, v2, r2)
        P1.append(v1)
        P2.append(v2)
        inP[0][v1] = inP[1][v2] = True
        view.P1, view.P2 = tuple(P1), tuple(P2)
        view.reveal1, view.reveal2 = r1, r2

        dec = strategy.update(view)
        add = None
        if dec is not None:
            a, b = (int(x) for x in dec)
            _check_addition(t, a, b, v1, v2, inP, inS, n)
            if not np.array_equal(g1.row(a)[S1], g2.row(b)[S2]):
                raise OnlineViolation(t, ISOMORPHISM, f"pair ({a}, {b}) breaks the isomorphism")
            S1.append(a)
            S2.append(b)
            inS[0][a] = inS[1][b] = True
            view.S1, view.S2 = tuple(S1), tuple(S2)
            add = (a, b)
        transcript.rounds.append(RoundRecord(t, (v1, v2), r1, r2, add))
    return Solution(S1, S2), transcript


def _check_addition(t, a, b, v1, v2, inP, inS, n):
    for j, x in ((0, a), (1, b)):
        if not 0 <= x < n or not inP[j][x]:
            raise OnlineViolation(t, MEMBERSHIP, f"G{j + 1} vertex {x} not processed")
        if inS[j][x]:
            raise OnlineViolation(t, MEMBERSHIP, f"G{j + 1} vertex {x} already in solution")
    if a != v1 and b != v2:
        raise OnlineViolation(t, ANCHOR, f"pair ({a}, {b}) avoids current ({v1}, {v2})")


class GreedyOnline:
    """The greedy algorithm written against the online interface.

    Vertices are processed in natural order.  The update replays step t of
    the greedy scan over processing positions 0..t-1 using only revealed
    edges, which the strategy accumulates itself.
    """

    def start(self, n: int, seed: int) -> None:
        self.n = n
        self.know = (np.zeros((n, n), dtype=bool), np.zeros((n, n), dtype=bool))
        self.sig = ([0] * n, [0] * n)
        self.tables: tuple[dict, dict] = ({}, {})
        self.matched = (set(), set())
        self.k = 0

    def select_next(self, view: View) -> tuple[int, int]:
        return view.t - 1, view.t - 1

    def update(self, view: View) -> Optional[tuple[int, int]]:
        P = (view.P1, view.P2)
        S = (view.S1, view.S2)
        reveals = (view.reveal1, view.reveal2)
        new = (P[0][-1], P[1][-1])
        pos = len(P[0]) - 1
        for j in (0, 1):
            x = new[j]
            prior = view.order(j + 1)[:-1]
            know = self.know[j]
            know[x, prior] = reveals[j]
            know[prior, x] = reveals[j]
            s = 0
            if S[j]:
                for k in np.flatnonzero(know[x, list(S[j])]).tolist():
                    s |= 1 << k
            self.sig[j][x] = s
            self.tables[j].setdefault(s, pos)
        p1 = self.tables[1].get(self.sig[0][new[0]])  # (u_t, v_p1)
        p2 = self.tables[0].get(self.sig[1][new[1]])  # (u_p2, v_t)
        if p1 is not None and (p2 is None or p1 <= p2):
            pair = (new[0], P[1][p1])
        elif p2 is not None:
            pair = (P[0][p2], new[1])
        else:
            return None
        self._commit(pair, P)
        return pair

    def _commit(self, pair, P):
        for j in (0, 1):
            x = pair[j]
            self.matched[j].add(x)
            col = self.know[j][:, x]
            bit = 1 << self.k
            table = {}
            for p, w in enumerate(P[j]):
                if col[w]:
                    self.sig[j][w] |= bit
                if w not in self.matched[j]:
                    table.setdefault(self.sig[j][w], p)
            self.tables = (table, self.tables[1]) if j == 0 else (self.tables[0], table)
        self.k += 1


def greedy_as_online() -> GreedyOnline:
    return GreedyOnline()


@dataclass(frozen=True)
class Violation:
    t: int
    clause: str
    detail: str = ""

    def __str__(self):
        return f"round {self.t}: {self.clause}" + (f" ({self.detail})" if self.detail else "")


def validate_transcript(transcript: Transcript, y: GraphPair) -> Optional[Violation]:
    """Re-simulate ``transcript`` against ``y``; first violation found, or None."""
    n = y.n
    g1, g2 = y
    if len(transcript.rounds) != n:
        return Violation(len(transcript.rounds), LENGTH, f"expected {n} rounds")
    P = ([], [])
    S = ([], [])
    inP = (np.zeros(n, dtype=bool), np.zeros(n, dtype=bool))
    inS = (np.zeros(n, dtype=bool), np.zeros(n, dtype=bool))
    for t, rec in enumerate(transcript.rounds, start=1):
        if rec.t != t:
            return Violation(t, LENGTH, f"round numbered {rec.t}")
        v1, v2 = rec.select
        for j, v in ((0, v1), (1, v2)):
            if not 0 <= v < n or inP[j][v]:
                return Violation(t, FRESHNESS, f"G{j + 1} vertex {v} is not fresh")
        for j, (g, v, bits) in enumerate(((g1, v1, rec.reveal1), (g2, v2, rec.reveal2))):
            truth = g.row(v)[P[j]]
            bits = np.asarray(bits, dtype=bool)
            if bits.shape != truth.shape:
                return Violation(t, REVEAL, f"G{j + 1}: {len(bits)} bits revealed, expected {len(truth)}")
            if not np.array_equal(bits, truth):
                k = int(np.flatnonzero(bits != truth)[0])
                return Violation(t, REVEAL, f"G{j + 1}: bit for {{{v}, {P[j][k]}}} wrong")
        P[0].append(v1)
        P[1].append(v2)
        inP[0][v1] = inP[1][v2] = True
        if rec.add is not None:
            a, b = rec.add
            try:
                _check_addition(t, a, b, v1, v2, inP, inS, n)
            except OnlineViolation as exc:
                return Violation(t, exc.clause, exc.detail)
            if not np.array_equal(g1.row(a)[S[0]], g2.row(b)[S[1]]):
                return Violation(t, ISOMORPHISM, f"pair ({a}, {b}) breaks the isomorphism")
            S[0].append(a)
            S[1].append(b)
            inS[0][a] = inS[1][b] = True
    return None
