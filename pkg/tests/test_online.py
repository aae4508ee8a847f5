import copy

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lcis.graph import Graph, GraphPair, sample_er, sample_pair
from lcis.greedy import greedy_lcis
from lcis.iso import verify_solution
from lcis.online import (
    ANCHOR,
    FRESHNESS,
    ISOMORPHISM,
    LENGTH,
    MEMBERSHIP,
    REVEAL,
    InformationLeak,
    OnlineViolation,
    greedy_as_online,
    run_online,
    validate_transcript,
)
from lcis.rng import derive_seed
from lcis.transcript import Transcript


class Natural:
    """Selects (t-1, t-1); subclasses decide updates."""

    def start(self, n, seed):
        pass

    def select_next(self, view):
        return view.t - 1, view.t - 1

    def update(self, view):
        return None


class AddFirstOnly(Natural):
    def update(self, view):
        return (view.P1[-1], view.P2[-1]) if view.t == 1 else None


class AddOldPair(Natural):
    def update(self, view):
        return (0, 1) if view.t == 3 else None


class Reselect(Natural):
    def select_next(self, view):
        return 0, 0


class AddTwice(Natural):
    def update(self, view):
        return (view.P1[0], view.P2[-1]) if view.t <= 2 else None


class AddUnprocessed(Natural):
    def update(self, view):
        return (view.P1[-1], view.t + 2)


class AlwaysAddCurrent(Natural):
    def update(self, view):
        return view.P1[-1], view.P2[-1]


class Peeker(Natural):
    def update(self, view):
        view.adjacent(1, 0, view.n - 1)


class Probe(Natural):
    """Tries every edge query and records which ones are answered."""

    def start(self, n, seed):
        self.log = []

    def _probe(self, view, phase):
        answered = (set(), set())
        for j in (1, 2):
            for u in range(view.n):
                for v in range(u + 1, view.n):
                    try:
                        view.adjacent(j, u, v)
                        answered[j - 1].add((u, v))
                    except InformationLeak:
                        pass
        self.log.append((phase, view.t, tuple(view.P1), tuple(view.P2), answered))

    def select_next(self, view):
        self._probe(view, "select")
        return super().select_next(view)

    def update(self, view):
        self._probe(view, "update")
        return None


def test_never_add():
    y = sample_pair(12, 1)
    sol, tr = run_online(Natural(), y)
    assert sol.size == 0 and len(tr.rounds) == 12
    assert all(r.add is None for r in tr.rounds)


def test_add_first_round_only():
    sol, _ = run_online(AddFirstOnly(), sample_pair(9, 2))
    assert sol.size == 1


@pytest.mark.parametrize("strategy, clause, t", [
    (AddOldPair(), ANCHOR, 3),
    (Reselect(), FRESHNESS, 2),
    (AddTwice(), MEMBERSHIP, 2),
    (AddUnprocessed(), MEMBERSHIP, 1),
])
def test_driver_rejects(strategy, clause, t):
    with pytest.raises(OnlineViolation) as exc:
        run_online(strategy, sample_pair(8, 5))
    assert exc.value.clause == clause and exc.value.t == t


def test_driver_rejects_broken_isomorphism():
    y = GraphPair(Graph.complete(3), Graph.empty(3))
    with pytest.raises(OnlineViolation) as exc:
        run_online(AlwaysAddCurrent(), y)
    assert exc.value.clause == ISOMORPHISM and exc.value.t == 2


def test_unrevealed_edge_query_refused():
    with pytest.raises(InformationLeak):
        run_online(Peeker(), sample_pair(6, 0))


def test_probe_sees_only_processed_pairs():
    y = sample_pair(7, 3)
    probe = Probe()
    run_online(probe, y)
    assert len(probe.log) == 14
    for phase, t, P1, P2, answered in probe.log:
        for j, P in enumerate((P1, P2)):
            allowed = {(min(u, v), max(u, v)) for u in P for v in P if u != v}
            assert answered[j] == allowed, (phase, t)
        assert len(P1) == (t - 1 if phase == "select" else t)


def test_view_exposes_no_graph():
    seen = []

    class Snoop(Natural):
        def update(self, view):
            seen.extend(vars(view).values())

    run_online(Snoop(), sample_pair(5, 0))
    assert not any(isinstance(v, (Graph, GraphPair)) for v in seen)


def test_greedy_online_examples():
    g = sample_er(40, 1)
    sol, _ = run_online(greedy_as_online(), GraphPair(g, g))
    assert sol.s1 == sol.s2 == tuple(range(40))
    sol, _ = run_online(greedy_as_online(), GraphPair(Graph.empty(30), Graph.empty(30)))
    assert sol.size == 30


def test_greedy_online_matches_offline_n64():
    for i in range(100):
        y = sample_pair(64, derive_seed(0x0E, i))
        a, ta = greedy_lcis(y)
        b, tb = run_online(greedy_as_online(), y)
        assert a == b
        assert ta.to_jsonl() == tb.to_jsonl()


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 90), st.integers(0, 2**64 - 1))
def test_online_run_properties(n, seed):
    y = sample_pair(n, seed)
    sol, tr = run_online(greedy_as_online(), y, seed)
    assert verify_solution(y, sol)
    assert validate_transcript(tr, y) is None
    sizes = tr.sizes()
    assert all(b - a in (0, 1) for a, b in zip([0] + sizes, sizes))
    assert Transcript.from_jsonl(tr.to_jsonl(), n).to_jsonl() == tr.to_jsonl()


def test_validate_flipped_bit():
    y = sample_pair(20, 4)
    _, tr = greedy_lcis(y)
    bad = copy.deepcopy(tr)
    bits = bad.rounds[9].reveal1.copy()
    bits[3] = not bits[3]
    bad.rounds[9].reveal1 = bits
    v = validate_transcript(bad, y)
    assert v.clause == REVEAL and v.t == 10


def test_validate_round5_anchor():
    y = sample_pair(10, 6)
    _, tr = run_online(Natural(), y)
    tr.rounds[4].add = (0, 1)
    v = validate_transcript(tr, y)
    assert v.clause == ANCHOR and v.t == 5
    assert "round 5" in str(v)


def test_validate_round_count_and_freshness():
    y = sample_pair(6, 1)
    _, tr = greedy_lcis(y)
    short = Transcript(6, tr.rounds[:5])
    assert validate_transcript(short, y).clause == LENGTH
    dup = copy.deepcopy(tr)
    dup.rounds[2].select = (1, 2)
    assert validate_transcript(dup, y).clause == FRESHNESS


def test_validate_wrong_reveal_length():
    y = sample_pair(6, 1)
    _, tr = greedy_lcis(y)
    tr.rounds[3].reveal2 = np.zeros(2, dtype=bool)
    v = validate_transcript(tr, y)
    assert v.clause == REVEAL and v.t == 4
