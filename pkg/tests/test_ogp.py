import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lcis.graph import Graph, GraphPair, sample_pair
from lcis.greedy import greedy_lcis
from lcis.iso import CapacityError
from lcis.ogp import (
    ForbiddenStructureQuery,
    InterpolationFamily,
    OgpParams,
    build_family,
    count_forbidden,
    counting_exponent,
    estimate_events,
    exponent_report,
    f_term,
    m_of_eps,
    member_seed,
    minimize_f,
    phi,
    probability_exponent,
    psi,
    psi_min_check,
    run_family,
    stopping_time_tau,
)
from lcis.online import greedy_as_online, run_online
from lcis.transcript import RoundRecord, Transcript

from oracles import naive_census


def _transcript(adds):
    n = len(adds)
    rounds = [RoundRecord(t, (t - 1, t - 1), np.zeros(t - 1, bool), np.zeros(t - 1, bool),
                          (t - 1, t - 1) if a else None)
              for t, a in enumerate(adds, start=1)]
    return Transcript(n, rounds)


# parameters ------------------------------------------------------------------


def test_m_of_eps():
    assert m_of_eps(1) == 14
    assert m_of_eps(0.5) == 54
    assert m_of_eps(2) == 4
    assert m_of_eps(0.25) == 214
    with pytest.raises(ValueError):
        m_of_eps(0)


def test_params_validation():
    p = OgpParams.from_eps(1.0, 64)
    assert (p.gamma, p.L, p.m) == (1.5, 6.0, 14)
    assert p.tau_threshold == 9 and p.large_size == 18
    with pytest.raises(ValueError):
        OgpParams(1.0, 1.6, 6.0, 14)
    with pytest.raises(ValueError):
        OgpParams(1.0, 1.5, 6.0, 13)


def test_stopping_time_examples(golden):
    assert stopping_time_tau(_transcript([1] * 8), 3) == 3
    assert stopping_time_tau(_transcript([1, 0, 0, 0, 0]), 3) == 5
    _, tr = greedy_lcis(sample_pair(64, 1))
    assert stopping_time_tau(tr, 9) == golden["tau_greedy_n64_seed1_threshold9"]
    with pytest.raises(ValueError):
        stopping_time_tau(tr, 0)


# families --------------------------------------------------------------------


def _family(n, t, m, seed):
    y = sample_pair(n, seed)
    _, tr = run_online(greedy_as_online(), y, seed)
    return build_family(y, tr, t, m, seed ^ 0xABC)


@pytest.mark.parametrize("t", [1, 5, 16, 32])
def test_fixed_region_bit_exact(t):
    for seed in range(20):
        fam = _family(32, t, 4, seed)
        assert fam.members[0] is fam.base
        for j in (1, 2):
            mask = fam.fixed_mask(j)
            assert mask.sum() == t * (t - 1)
            ref = fam.base[j - 1].to_dense()
            for member in fam.members:
                assert np.array_equal(member[j - 1].to_dense()[mask], ref[mask])


def test_full_cut_members_equal_base():
    fam = _family(20, 20, 5, 3)
    for member in fam.members:
        assert member.g1 == fam.base.g1 and member.g2 == fam.base.g2


def test_t1_members_are_fresh_samples():
    from lcis.graph import sample_er
    fam = _family(16, 1, 3, 4)
    for i, member in enumerate(fam.members[1:], start=2):
        assert member.g1 == sample_er(16, member_seed(fam.seed, i, 1))
        assert member.g2 == sample_er(16, member_seed(fam.seed, i, 2))


def test_family_invariants_hold():
    fam = _family(24, 10, 3, 8)
    for member in fam.members:
        for g in member:
            g.check_invariants()


def test_free_region_bits_fair():
    n, t, fams = 32, 16, 10_000
    counts = [np.zeros((n, n)), np.zeros((n, n))]
    for seed in range(fams):
        y = sample_pair(n, seed)
        _, tr = greedy_lcis(y)
        fam = build_family(y, tr, t, 2, seed)
        for j in (0, 1):
            counts[j] += fam.members[1][j].to_dense()
    free = ~fam.fixed_mask(1)  # P = first t vertices for every seed
    iu = np.triu_indices(n, 1)
    for j in (0, 1):
        freq = (counts[j] / fams)[iu][free[iu]]
        assert len(freq) == math.comb(n, 2) - math.comb(t, 2)
        assert freq.min() >= 0.48 and freq.max() <= 0.52


def test_build_family_rejects_bad_t():
    y = sample_pair(8, 0)
    _, tr = greedy_lcis(y)
    with pytest.raises(ValueError):
        build_family(y, tr, 0, 2, 0)
    with pytest.raises(ValueError):
        build_family(y, tr, 9, 2, 0)


def test_run_family_single_member_and_zero_threshold():
    fam = _family(30, 10, 1, 2)
    sol, _ = run_online(greedy_as_online(), fam.base, 0)
    run = run_family(greedy_as_online(), fam, sol.size)
    assert run.sizes == [sol.size] and run.success
    assert not run_family(greedy_as_online(), fam, sol.size + 1).success
    assert run_family(greedy_as_online(), _family(30, 10, 4, 2), 0).success


def test_event_estimates_ordered():
    est = estimate_events(greedy_as_online, 32, 1.0, 30, 7, m=3)
    assert est.s_count <= est.e_count
    assert len(est.taus) == 30
    assert est.to_json()["pr_S"] <= est.to_json()["pr_E"]


# census ----------------------------------------------------------------------


def test_census_hand_example():
    e = GraphPair(Graph.empty(2), Graph.empty(2))
    fam = InterpolationFamily(e, 1, [e], (0,), (0,))
    assert count_forbidden(fam, ForbiddenStructureQuery(1, 2, 1, 1, 10)) == (1, 0)
    assert count_forbidden(fam, ForbiddenStructureQuery(1, 2, 1, 1, 1)) == (0, 1)


def test_census_edge_cases_zero():
    fam = _family(8, 3, 2, 1)
    assert count_forbidden(fam, ForbiddenStructureQuery(2, 4, 4, 3, 10)) == (0, 0)  # k_ov > t
    fam7 = _family(7, 6, 1, 1)
    assert count_forbidden(fam7, ForbiddenStructureQuery(1, 3, 1, 6, 10)) == (0, 0)  # 3 - 1 > 7 - 6
    small = _family(3, 2, 1, 1)
    assert count_forbidden(small, ForbiddenStructureQuery(1, 4, 1, 2, 10)) == (0, 0)  # k_sol > n


def test_census_capacity_and_mismatch():
    with pytest.raises(CapacityError):
        count_forbidden(_family(11, 3, 1, 0), ForbiddenStructureQuery(1, 3, 1, 3, 9))
    with pytest.raises(ValueError):
        count_forbidden(_family(6, 3, 1, 0), ForbiddenStructureQuery(1, 3, 1, 2, 9))
    with pytest.raises(ValueError):
        ForbiddenStructureQuery(1, 2, 3, 3, 9)


def test_query_asymptotic_thresholds():
    q = ForbiddenStructureQuery.from_asymptotic(64, 1.0, 20)
    assert (q.m, q.k_sol, q.k_ov, q.t, q.w_threshold) == (14, 18, 9, 20, 36.0)


@pytest.mark.parametrize("case", range(12))
def test_census_matches_naive(case):
    rng = random.Random(case)
    n = rng.randint(3, 7)
    m = rng.randint(1, 2)
    t = rng.randint(1, n)
    k_sol = rng.randint(1, min(4, n))
    k_ov = rng.randint(0 + 1, k_sol)
    w = rng.choice([1, 2, 3, 10])
    fam = _family(n, t, m, 1000 + case)
    q = ForbiddenStructureQuery(m, k_sol, k_ov, t, w)
    assert count_forbidden(fam, q) == naive_census(fam, m, k_sol, k_ov, w)


# exponent calculus -------------------------------------------------------------


def test_f_term_examples():
    assert f_term(1.5, 1.5) == 0
    assert f_term(3, 1.5) == pytest.approx(0.375)
    assert f_term(6, 1.5) == pytest.approx(7.875)


def test_psi_phi_examples():
    assert psi([], 1.5) == -3
    assert psi([3] * 14, 1.5) == pytest.approx(2.25)
    assert psi([2.5] * 54, 1.75) == pytest.approx(1.5625)
    assert phi([1.5], 1.5) == 0
    assert phi([3, 3], 1.5) == pytest.approx(6.75)
    assert phi([6], 1.75) == pytest.approx(16.46875)


def test_counting_exponent_examples():
    assert counting_exponent([1.5], 1.5, 7) == pytest.approx(2 * 7 * 1.5)
    assert counting_exponent([3, 3], 1.5, 10) == pytest.approx(90)
    assert counting_exponent([3, 3], 1.5, 0) == 0


def test_probability_exponent_slack():
    base = probability_exponent([3, 3], 1.5, 10)
    assert base == pytest.approx(-67.5)
    assert probability_exponent([3, 3], 1.5, 10, C=1) == pytest.approx(base + 2 * math.log(10))


@settings(max_examples=60)
@given(st.lists(st.floats(2, 6), max_size=8), st.floats(0.1, 2))
def test_psi_separable(alphas, eps):
    gamma = 2 - eps / 2
    assert psi(alphas, gamma) == pytest.approx(-2 * gamma + sum(f_term(a, gamma) for a in alphas))


def test_gamma_identity_grid():
    for eps in np.linspace(0.01, 3.99, 100):
        g = 2 - eps / 2
        assert abs((g * g / 2 - 2 * g) - (eps * eps / 8 - 2)) <= 1e-12


def test_minimiser_at_left_end():
    for eps in np.linspace(0.05, 3.9, 40):
        alpha, fmin = minimize_f(eps, 2 - eps / 2)
        assert alpha == pytest.approx(2 + eps)
        assert abs(fmin - 3 * eps * eps / 8) <= 1e-12


@pytest.mark.parametrize("eps, m, value", [
    (1, 14, 2.25), (0.5, 54, 1.5625), (2, 4, 4.0), (0.25, 214, 1.265625),
])
def test_psi_min_check(eps, m, value):
    got_m, got_psi, ok = psi_min_check(eps)
    assert got_m == m and got_psi == pytest.approx(value, abs=1e-12) and ok


def test_exponent_report_shape():
    rep = exponent_report(1.0, n=64)
    assert rep["m"] == 14 and rep["pass"] and rep["L"] == 6
    assert rep["grid"][0]["alpha"] == 3
    assert all(r["first_moment_exponent"] == pytest.approx(r["counting_exponent"] + r["probability_exponent"])
               for r in rep["grid"])
