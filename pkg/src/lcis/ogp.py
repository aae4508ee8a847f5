"""Interpolation families, forbidden-structure census and first-moment exponents.

The exponent helpers work in units of ``L = log2 n``: a count bounded by
``n**(L * x)`` is reported as ``x * L`` (the exponent of n).
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .graph import Graph, GraphPair, sample_er
from .iso import CapacityError, adjacency_masks, find_isomorphism
from .online import OnlineStrategy, run_online
from .rng import derive_seed
from .transcript import Transcript

# parameters -------------------------------------------------------------------


def m_of_eps(eps: float) -> int:
    """Number of interpolated inputs, ``ceil(40 / (3 eps^2))``, computed exactly."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    e = Fraction(eps)
    return math.ceil(Fraction(40) / (3 * e * e))


@dataclass(frozen=True)
class OgpParams:
    eps: float
    gamma: float
    L: float
    m: int

    def __post_init__(self):
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        if self.gamma != 2 - self.eps / 2:
            raise ValueError("gamma must equal 2 - eps/2")
        if self.m != m_of_eps(self.eps):
            raise ValueError("m does not match eps")

    @classmethod
    def from_eps(cls, eps: float, n: Optional[int] = None) -> "OgpParams":
        L = math.log2(n) if n else float("nan")
        return cls(eps, 2 - eps / 2, L, m_of_eps(eps))

    @property
    def tau_threshold(self) -> int:
        """Partial-solution size ``ceil(gamma L)`` that defines the stopping time."""
        return math.ceil(self.gamma * self.L)

    @property
    def large_size(self) -> float:
        """Size ``(2 + eps) L`` a solution must reach to count as large."""
        return (2 + self.eps) * self.L

    def is_large(self, size: int) -> bool:
        return size >= self.large_size


def stopping_time_tau(transcript: Transcript, threshold: int) -> int:
    """First round t with |S^(t)| == threshold, or n if never reached."""
    if threshold < 1:
        raise ValueError("threshold must be >= 1")
    for t, size in enumerate(transcript.sizes(), start=1):
        if size == threshold:
            return t
    return transcript.n


# interpolation families ---------------------------------------------------------


@dataclass
class InterpolationFamily:
    """Inputs that agree with ``base`` on every pair inside the first ``t`` processed
    vertices of each graph and are independent elsewhere.  ``members[0]`` is ``base``.
    """

    base: GraphPair
    t: int
    members: list[GraphPair]
    P1: tuple[int, ...]
    P2: tuple[int, ...]
    seed: int = 0

    @property
    def m(self) -> int:
        return len(self.members)

    @property
    def n(self) -> int:
        return self.base.n

    def fixed_mask(self, j: int) -> np.ndarray:
        """Boolean n x n mask of the pairs copied from ``base`` in graph ``j`` (1 or 2)."""
        P = np.asarray(self.P1 if j == 1 else self.P2, dtype=np.intp)
        mask = np.zeros((self.n, self.n), dtype=bool)
        mask[np.ix_(P, P)] = True
        np.fill_diagonal(mask, False)
        return mask


def member_seed(seed: int, i: int, j: int) -> int:
    """Seed of the free bits of member ``i`` (1-based, i >= 2), graph ``j``."""
    return derive_seed(seed, i, j)


def build_family(y: GraphPair, transcript: Transcript, t: int, m: int, seed: int) -> InterpolationFamily:
    """The t-th interpolation path of ``m`` inputs around ``y``.

    ``transcript`` is the run of the algorithm on ``y``; its first ``t``
    selections give the processed sets.  Member i >= 2 (1-based) takes graph j
    from ``sample_er(n, member_seed(seed, i, j))`` and overwrites the pairs
    inside the processed set of graph j with the bits of ``y``.
    """
    n = y.n
    if not 1 <= t <= n:
        raise ValueError(f"t must lie in [1, {n}]")
    if m < 1:
        raise ValueError("m must be >= 1")
    P1, P2 = transcript.processed(t)
    members = [y]
    base_dense = [y.g1.to_dense(), y.g2.to_dense()]
    for i in range(2, m + 1):
        graphs = []
        for j, P in ((1, P1), (2, P2)):
            d = sample_er(n, member_seed(seed, i, j)).to_dense()
            idx = np.asarray(P, dtype=np.intp)
            d[np.ix_(idx, idx)] = base_dense[j - 1][np.ix_(idx, idx)]
            graphs.append(Graph.from_dense(d))
        members.append(GraphPair(*graphs))
    return InterpolationFamily(y, t, members, tuple(P1), tuple(P2), seed)


@dataclass
class FamilyRun:
    sizes: list[int]
    threshold: float
    transcripts: list[Transcript] = field(default_factory=list, repr=False)

    @property
    def success(self) -> bool:
        """Every member reached the threshold."""
        return all(s >= self.threshold for s in self.sizes)


def run_family(strategy: OnlineStrategy, family: InterpolationFamily, threshold: float,
               seed: int = 0) -> FamilyRun:
    """Run ``strategy`` on each member; ``success`` is the all-members-large event."""
    sizes, trs = [], []
    for member in family.members:
        sol, tr = run_online(strategy, member, seed)
        sizes.append(sol.size)
        trs.append(tr)
    return FamilyRun(sizes, threshold, trs)


@dataclass
class EventEstimate:
    """Empirical frequencies of 'Y yields a large solution' and 'all members do'."""

    n: int
    params: OgpParams
    trials: int
    e_count: int
    s_count: int
    taus: list[int]

    @property
    def pr_e(self) -> float:
        return self.e_count / self.trials

    @property
    def pr_s(self) -> float:
        return self.s_count / self.trials

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "eps": self.params.eps,
            "m": self.params.m,
            "trials": self.trials,
            "large_size": self.params.large_size,
            "tau_threshold": self.params.tau_threshold,
            "pr_E": self.pr_e,
            "pr_S": self.pr_s,
            "pr_E^m": self.pr_e ** self.params.m,
        }


def estimate_events(strategy_factory, n: int, eps: float, trials: int, master_seed: int,
                    m: Optional[int] = None, shortcut: bool = False) -> EventEstimate:
    """Monte Carlo estimate of the two events at the stopping time.

    Trial i samples ``Y`` with ``derive_seed(master_seed, n, i)``, cuts the
    family at tau and runs the strategy on every member.  Since the first
    member is ``Y`` itself, ``shortcut=True`` skips the family whenever ``Y``
    already fails.
    """
    from .graph import sample_pair

    params = OgpParams.from_eps(eps, n)
    m = params.m if m is None else m
    e = s = 0
    taus = []
    for i in range(trials):
        seed = derive_seed(master_seed, n, i)
        y = sample_pair(n, seed)
        sol, tr = run_online(strategy_factory(), y, seed)
        tau = stopping_time_tau(tr, max(1, params.tau_threshold))
        taus.append(tau)
        large = params.is_large(sol.size)
        e += large
        if large or not shortcut:
            fam = build_family(y, tr, tau, m, derive_seed(seed, 0xFA))
            s += run_family(strategy_factory(), fam, params.large_size, seed).success
    return EventEstimate(n, params, trials, e, s, taus)


# forbidden structures -----------------------------------------------------------

CENSUS_MAX_N = 10
CENSUS_MAX_M = 2
CENSUS_MAX_K_SOL = 5


@dataclass(frozen=True)
class ForbiddenStructureQuery:
    m: int
    k_sol: int
    k_ov: int
    t: int
    w_threshold: float

    def __post_init__(self):
        if min(self.m, self.k_sol, self.k_ov, self.t) < 1 or self.w_threshold <= 0:
            raise ValueError("query parameters must be positive")
        if self.k_ov > self.k_sol:
            raise ValueError("k_ov must not exceed k_sol")

    @classmethod
    def from_asymptotic(cls, n: int, eps: float, t: int, m: Optional[int] = None) -> "ForbiddenStructureQuery":
        """Thresholds ``ceil((2+eps)L)``, ``ceil((2-eps/2)L)`` and ``6L`` for L = log2 n."""
        L = math.log2(n)
        return cls(
            m=m_of_eps(eps) if m is None else m,
            k_sol=math.ceil((2 + eps) * L),
            k_ov=math.ceil((2 - eps / 2) * L),
            t=t,
            w_threshold=6 * L,
        )


def _subsets(n: int, min_size: int):
    for bits in range(1 << n):
        if bits.bit_count() >= min_size:
            yield tuple(v for v in range(n) if (bits >> v) & 1)


def member_solutions(y: GraphPair, min_size: int) -> list[tuple[frozenset, frozenset]]:
    """All vertex-set pairs (A, B), |A| = |B| >= min_size, with G1[A] isomorphic to G2[B]."""
    n = y.n
    m1, m2 = adjacency_masks(y.g1), adjacency_masks(y.g2)

    def invariant(masks, subset):
        sm = sum(1 << v for v in subset)
        return (len(subset), tuple(sorted((masks[v] & sm).bit_count() for v in subset)))

    groups1 = defaultdict(list)
    for A in _subsets(n, min_size):
        groups1[invariant(m1, A)].append(A)
    groups2 = defaultdict(list)
    for B in _subsets(n, min_size):
        groups2[invariant(m2, B)].append(B)

    out = []
    for key, As in groups1.items():
        Bs = groups2.get(key)
        if not Bs:
            continue
        # split both sides into isomorphism classes against G1 representatives
        reps: list[tuple[tuple[int, ...], list, list]] = []
        for A in As:
            for rep, members_a, _ in reps:
                if find_isomorphism(m1, rep, m1, A) is not None:
                    members_a.append(A)
                    break
            else:
                reps.append((A, [A], []))
        for B in Bs:
            for rep, _, members_b in reps:
                if find_isomorphism(m1, rep, m2, B) is not None:
                    members_b.append(B)
                    break
        for _, members_a, members_b in reps:
            for A in members_a:
                for B in members_b:
                    out.append((frozenset(A), frozenset(B)))
    return out


def _core(sol, P1: frozenset, P2: frozenset):
    A, B = sol
    return (A & P1, B & P2)


def count_forbidden(family: InterpolationFamily, query: ForbiddenStructureQuery) -> tuple[int, int]:
    """Count forbidden m-tuples, split as (z_count, w_count).

    A tuple picks one solution per member (members in order, the first
    ``query.m`` of the family), each of size >= k_sol, all sharing the same
    intersection with the processed sets, of size exactly k_ov in both graphs.
    Tuples are counted as multisets of vertex-set pairs.  ``w_count`` holds the
    tuples whose largest solution exceeds ``w_threshold``.
    """
    n = family.n
    if n > CENSUS_MAX_N or query.m > CENSUS_MAX_M or query.k_sol > CENSUS_MAX_K_SOL:
        raise CapacityError(
            f"census limited to n <= {CENSUS_MAX_N}, m <= {CENSUS_MAX_M}, "
            f"k_sol <= {CENSUS_MAX_K_SOL}")
    if query.t != family.t:
        raise ValueError(f"query t={query.t} does not match family t={family.t}")
    if query.m > family.m:
        raise ValueError("family has fewer members than the query asks for")
    if query.k_sol > n or query.k_ov > query.t or query.k_sol - query.k_ov > n - query.t:
        return (0, 0)

    P1, P2 = frozenset(family.P1), frozenset(family.P2)
    by_core = []
    for member in family.members[: query.m]:
        table = defaultdict(list)
        for sol in member_solutions(member, query.k_sol):
            core = _core(sol, P1, P2)
            if len(core[0]) == query.k_ov and len(core[1]) == query.k_ov:
                table[core].append(sol)
        by_core.append(table)

    def is_w(*sols):
        return max(len(s[0]) for s in sols) > query.w_threshold

    z = w = 0
    if query.m == 1:
        for sols in by_core[0].values():
            for s in sols:
                if is_w(s):
                    w += 1
                else:
                    z += 1
        return (z, w)

    for core, first in by_core[0].items():
        second = by_core[1].get(core)
        if not second:
            continue
        seen = set()
        for a in first:
            for b in second:
                key = frozenset((a, b))
                if key in seen:
                    continue
                seen.add(key)
                if is_w(a, b):
                    w += 1
                else:
                    z += 1
    return (z, w)


# exponent calculus -------------------------------------------------------------


def f_term(alpha: float, gamma: float) -> float:
    return (alpha ** 2 / 2 - 2 * alpha) - (gamma ** 2 / 2 - 2 * gamma)


def psi(alphas: Sequence[float], gamma: float) -> float:
    return -2 * gamma + sum(f_term(a, gamma) for a in alphas)


def phi(alphas: Sequence[float], gamma: float) -> float:
    return sum((a ** 2 - gamma ** 2) / 2 for a in alphas)


def counting_exponent(alphas: Sequence[float], gamma: float, L: float) -> float:
    """Exponent of n in the bound on the number of overlapping m-tuples."""
    return 2 * L * (gamma + sum(a - gamma for a in alphas))


def probability_exponent(alphas: Sequence[float], gamma: float, L: float, C: float = 0.0) -> float:
    """Exponent of n in the bound on the probability that a fixed m-tuple is realised.

    ``C`` is the constant of the ``C m log L`` slack; 0 reports leading order only.
    """
    slack = C * len(alphas) * math.log(L) if C else 0.0
    return -phi(alphas, gamma) * L + slack


@dataclass(frozen=True)
class PsiCheck:
    eps: float
    m: int
    alpha_min: float
    f_min: float
    psi_min: float

    @property
    def passed(self) -> bool:
        return self.psi_min >= 1

    def __iter__(self):
        return iter((self.m, self.psi_min, self.passed))


def minimize_f(eps: float, gamma: float, grid: int = 10_001) -> tuple[float, float]:
    """Minimise ``f(., gamma)`` over [2 + eps, 6] by grid, endpoints and stationary point."""
    lo, hi = 2 + eps, max(6.0, 2 + eps)
    candidates = list(np.linspace(lo, hi, grid)) + [lo, hi]
    if lo <= 2 <= hi:
        candidates.append(2.0)
    best = min(candidates, key=lambda a: (f_term(a, gamma), a))
    return float(best), float(f_term(best, gamma))


def psi_min_check(eps: float) -> PsiCheck:
    """Minimum of Psi over [2 + eps, 6]^m for m = m_of_eps(eps).

    Psi is separable, so each coordinate is minimised independently.
    """
    params = OgpParams.from_eps(eps)
    alpha, fmin = minimize_f(eps, params.gamma)
    value = psi([alpha] * params.m, params.gamma)
    return PsiCheck(eps, params.m, alpha, fmin, value)


def exponent_report(eps: float, n: Optional[int] = None, alphas: Optional[Sequence[float]] = None,
                    C: float = 0.0) -> dict:
    """Exponents over a grid of constant alpha vectors in [2 + eps, 6]."""
    params = OgpParams.from_eps(eps, n)
    check = psi_min_check(eps)
    L = params.L if n else 1.0
    if alphas is None:
        alphas = np.round(np.linspace(2 + eps, max(6.0, 2 + eps), 9), 6).tolist()
    rows = []
    for a in alphas:
        vec = [a] * params.m
        cnt = counting_exponent(vec, params.gamma, L)
        prob = probability_exponent(vec, params.gamma, L, C)
        rows.append({
            "alpha": a,
            "psi": psi(vec, params.gamma),
            "phi": phi(vec, params.gamma),
            "counting_exponent": cnt,
            "probability_exponent": prob,
            "first_moment_exponent": cnt + prob,
        })
    return {
        "eps": eps,
        "m": params.m,
        "gamma": params.gamma,
        "L": L,
        "C": C,
        "alpha_at_min": check.alpha_min,
        "psi_at_min": check.psi_min,
        "pass": check.passed,
        "grid": rows,
    }
