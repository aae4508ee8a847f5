"""Induced-subgraph isomorphism checks and exact LCIS solvers."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .graph import Graph, GraphPair


class CapacityError(ValueError):
    """Input exceeds the size an exhaustive routine is allowed to handle."""


class InvalidSolutionError(ValueError):
    """A Solution refers to out-of-range or repeated vertices."""


@dataclass(frozen=True)
class Solution:
    """Paired vertex lists; ``s1[i]`` is mapped to ``s2[i]``."""

    s1: tuple[int, ...] = ()
    s2: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "s1", tuple(int(v) for v in self.s1))
        object.__setattr__(self, "s2", tuple(int(v) for v in self.s2))

    @property
    def size(self) -> int:
        return len(self.s1)

    def __len__(self):
        return len(self.s1)

    @property
    def mapping(self) -> dict[int, int]:
        return dict(zip(self.s1, self.s2))

    def vertex_sets(self) -> tuple[frozenset, frozenset]:
        return frozenset(self.s1), frozenset(self.s2)

    def to_json(self) -> dict:
        return {"size": self.size, "s1": list(self.s1), "s2": list(self.s2)}


def adjacency_masks(g: Graph) -> list[int]:
    """Rows of ``g`` as Python int bitmasks (bit v set iff u~v)."""
    masks = []
    for row in g.adj:
        m = 0
        for k, word in enumerate(row.tolist()):
            m |= word << (64 * k)
        masks.append(m)
    return masks


def _check_structure(y: GraphPair, sol: Solution) -> None:
    if len(sol.s1) != len(sol.s2):
        raise InvalidSolutionError(f"length mismatch: {len(sol.s1)} != {len(sol.s2)}")
    for side, verts in (("s1", sol.s1), ("s2", sol.s2)):
        for v in verts:
            if not 0 <= v < y.n:
                raise InvalidSolutionError(f"{side}: vertex {v} out of range for n={y.n}")
        if len(set(verts)) != len(verts):
            raise InvalidSolutionError(f"{side}: repeated vertex")


def find_violation(y: GraphPair, sol: Solution) -> Optional[tuple[int, int]]:
    """First index pair ``(i, j)``, i < j, whose edge status differs, else None.

    Raises InvalidSolutionError for structurally malformed solutions.
    """
    _check_structure(y, sol)
    g1, g2 = y
    for j in range(1, len(sol.s1)):
        a, b = sol.s1[j], sol.s2[j]
        for i in range(j):
            if g1.has_edge(a, sol.s1[i]) != g2.has_edge(b, sol.s2[i]):
                return (i, j)
    return None


def verify_solution(y: GraphPair, sol: Solution) -> bool:
    """True iff the positional map ``s1[i] -> s2[i]`` is an induced isomorphism."""
    return find_violation(y, sol) is None


# pattern helpers ------------------------------------------------------------


def _pattern(masks: Sequence[int], order: Sequence[int]) -> int:
    # Edge bits of the ordered tuple, pairs (i, j) with i < j in lexicographic order.
    p = 0
    bit = 0
    for i in range(len(order)):
        row = masks[order[i]]
        for j in range(i + 1, len(order)):
            if (row >> order[j]) & 1:
                p |= 1 << bit
            bit += 1
    return p


NAIVE_MAX_N = 7


def naive_lcis(y: GraphPair) -> Solution:
    """Exhaustive LCIS for n <= 7.

    For k = n, n-1, ... every ordered k-tuple of G1 is tabulated by its edge
    pattern; the first sorted k-subset of G2 whose pattern appears wins.
    """
    n = y.n
    if n > NAIVE_MAX_N:
        raise CapacityError(f"naive_lcis supports n <= {NAIVE_MAX_N}, got {n}")
    m1, m2 = adjacency_masks(y.g1), adjacency_masks(y.g2)
    for k in range(n, 0, -1):
        seen: dict[int, tuple[int, ...]] = {}
        for subset in itertools.combinations(range(n), k):
            for order in itertools.permutations(subset):
                seen.setdefault(_pattern(m1, order), order)
        for subset in itertools.combinations(range(n), k):
            hit = seen.get(_pattern(m2, subset))
            if hit is not None:
                return Solution(hit, subset)
    return Solution()


# branch and bound -----------------------------------------------------------


@dataclass(frozen=True)
class ExactResult:
    solution: Solution
    optimal: bool
    nodes: int

    @property
    def size(self) -> int:
        return self.solution.size

    @property
    def flag(self) -> str:
        return "optimal" if self.optimal else "lower-bound"

    def __iter__(self):
        return iter((self.solution, self.optimal))


class _BudgetExhausted(Exception):
    pass


class _McSplit:
    def __init__(self, y: GraphPair, budget: Optional[int]):
        self.m1 = adjacency_masks(y.g1)
        self.m2 = adjacency_masks(y.g2)
        self.budget = budget
        self.nodes = 0
        self.best: list[tuple[int, int]] = [(0, 0)] if y.n else []

    def search(self, classes, matched):
        self.nodes += 1
        if self.budget is not None and self.nodes > self.budget:
            raise _BudgetExhausted
        if len(matched) > len(self.best):
            self.best = list(matched)
        bound = len(matched) + sum(min(len(g), len(h)) for g, h in classes)
        if bound <= len(self.best) or not classes:
            return
        # smallest max(|G part|, |H part|); ties by smallest G vertex
        ci = min(range(len(classes)),
                 key=lambda c: (max(len(classes[c][0]), len(classes[c][1])), classes[c][0][0]))
        gs, hs = classes[ci]
        v = gs[0]
        rest_g = gs[1:]
        nv = self.m1[v]
        for w in hs:
            nw = self.m2[w]
            rest_h = [x for x in hs if x != w]
            refined = []
            for c, (cg, ch) in enumerate(classes):
                if c == ci:
                    cg, ch = rest_g, rest_h
                g_in = [x for x in cg if (nv >> x) & 1]
                h_in = [x for x in ch if (nw >> x) & 1]
                if g_in and h_in:
                    refined.append((g_in, h_in))
                g_out = [x for x in cg if not (nv >> x) & 1]
                h_out = [x for x in ch if not (nw >> x) & 1]
                if g_out and h_out:
                    refined.append((g_out, h_out))
            matched.append((v, w))
            self.search(refined, matched)
            matched.pop()
        # v stays unmatched
        skipped = list(classes)
        if rest_g:
            skipped[ci] = (rest_g, hs)
        else:
            del skipped[ci]
        self.search(skipped, matched)


def exact_lcis(y: GraphPair, node_budget: Optional[int] = None) -> ExactResult:
    """Maximum common induced subgraph by McSplit-style branch and bound.

    Vertices are grouped into label classes by their adjacency pattern to the
    pairs matched so far; the bound is ``|matched| + sum(min(|G part|, |H part|))``.
    With ``node_budget`` set, search stops after that many nodes and the best
    incumbent is returned with ``optimal=False``.
    """
    n = y.n
    solver = _McSplit(y, node_budget)
    optimal = True
    if n:
        try:
            solver.search([(list(range(n)), list(range(n)))], [])
        except _BudgetExhausted:
            optimal = False
    best = sorted(solver.best)
    sol = Solution([a for a, _ in best], [b for _, b in best])
    return ExactResult(sol, optimal, solver.nodes)


# small-graph isomorphism ----------------------------------------------------


def find_isomorphism(masks1: Sequence[int], A: Sequence[int],
                     masks2: Sequence[int], B: Sequence[int]) -> Optional[tuple[int, ...]]:
    """Ordering of ``B`` making ``A[i] -> result[i]`` an isomorphism, or None.

    ``masks1``/``masks2`` are adjacency bitmasks of the host graphs.
    """
    k = len(A)
    if k != len(B):
        return None
    amask = sum(1 << a for a in A)
    bmask = sum(1 << b for b in B)
    deg_a = [(masks1[a] & amask).bit_count() for a in A]
    deg_b = {b: (masks2[b] & bmask).bit_count() for b in B}
    if sorted(deg_a) != sorted(deg_b.values()):
        return None
    # most constrained first
    order = sorted(range(k), key=lambda i: -deg_a[i])
    image = [0] * k
    used = set()

    def extend(pos):
        if pos == k:
            return True
        i = order[pos]
        a = A[i]
        for b in B:
            if b in used or deg_b[b] != deg_a[i]:
                continue
            ok = True
            for q in range(pos):
                ip = order[q]
                if ((masks1[a] >> A[ip]) & 1) != ((masks2[b] >> image[ip]) & 1):
                    ok = False
                    break
            if ok:
                image[i] = b
                used.add(b)
                if extend(pos + 1):
                    return True
                used.discard(b)
        return False

    return tuple(image) if extend(0) else None


def induced_isomorphic(y: GraphPair, A: Sequence[int], B: Sequence[int]) -> bool:
    """Whether ``G1[A]`` and ``G2[B]`` are isomorphic (any bijection)."""
    return find_isomorphism(adjacency_masks(y.g1), A, adjacency_masks(y.g2), B) is not None


# isomorphism probability ----------------------------------------------------

ISO_PROB_MAX_K = 6


def labeled_class_sizes(k: int) -> np.ndarray:
    """Sizes of the isomorphism classes of labelled graphs on k vertices."""
    pairs = list(itertools.combinations(range(k), 2))
    e = len(pairs)
    index = {p: i for i, p in enumerate(pairs)}
    masks = np.arange(1 << e, dtype=np.int64)
    bits = [(masks >> i) & 1 for i in range(e)]
    canon = masks.copy()
    for perm in itertools.permutations(range(k)):
        img = np.zeros_like(masks)
        for i, (a, b) in enumerate(pairs):
            pa, pb = perm[a], perm[b]
            img |= bits[i] << index[(min(pa, pb), max(pa, pb))]
        np.minimum(canon, img, out=canon)
    _, counts = np.unique(canon, return_counts=True)
    return counts


def iso_prob_exact(k: int) -> Fraction:
    """Probability that two independent G(k, 1/2) samples are isomorphic."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if k > ISO_PROB_MAX_K:
        raise CapacityError(f"iso_prob_exact supports k <= {ISO_PROB_MAX_K}, got {k}")
    counts = labeled_class_sizes(k)
    total = 1 << (k * (k - 1) // 2)
    return Fraction(int(np.sum(counts.astype(object) ** 2)), total * total)


def iso_prob_bound(k: int, exact: bool = False):
    """Union bound ``k! * 2**(-C(k,2))`` over bijections, clamped at 1."""
    if k < 1:
        raise ValueError("k must be >= 1")
    b = Fraction(math.factorial(k), 1 << (k * (k - 1) // 2))
    b = min(b, Fraction(1))
    return b if exact else float(b)
