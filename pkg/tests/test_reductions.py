import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from clawdeg.approxdeg import DegreeQuery, min_approx_degree
from clawdeg.multisym import expand_freq_to_raw
from clawdeg.polyring import X, const, var
from clawdeg.properties import FunctionTuple, claw, enumerate_domain, eval_property
from clawdeg.reductions import (affine_normalization, average_over_subsets, block_partition_instance,
                                claw_to_collision_average, eval_single, injectivity_prob,
                                intersect_prob, lb_formula, mk_schedule, or_embedding, or_error,
                                pcl_exact, psearch_compose_instance, psearch_decode, psearch_inputs,
                                psearch_value, schedule_violations)

F_ = Fraction


def two_to_one(M, pairing=None):
    """A two-to-one h on [M] pairing consecutive points, or along ``pairing``."""
    h = [0] * M
    pairs = pairing or [(2 * a, 2 * a + 1) for a in range(M // 2)]
    for v, (a, b) in enumerate(pairs, start=1):
        h[a] = h[b] = v
    return tuple(h)


def brute_stats(h, F, G):
    """(P[injective S], P[T hits partners | injective S], p_cl) by listing every (S, T)."""
    M = len(h)
    inj = total_s = hits_inj = pairs_inj = claws = pairs = 0
    for S in itertools.combinations(range(M), F):
        total_s += 1
        img = [h[s] for s in S]
        injective = len(set(img)) == F
        inj += injective
        rest = [i for i in range(M) if i not in S]
        for T in itertools.combinations(rest, G):
            pairs += 1
            hit = bool(set(img) & {h[t] for t in T})
            claws += hit
            if injective:
                pairs_inj += 1
                hits_inj += hit
    cond = F_(hits_inj, pairs_inj) if pairs_inj else None
    return F_(inj, total_s), cond, F_(claws, pairs)


def test_injectivity_examples():
    assert injectivity_prob(6, 0) == 1
    assert injectivity_prob(4, 2) == F_(2, 3) == brute_stats(two_to_one(4), 2, 0)[0]
    assert injectivity_prob(6, 2) == F_(4, 5) == brute_stats(two_to_one(6), 2, 0)[0]
    with pytest.raises(ValueError):
        injectivity_prob(4, 3)
    with pytest.raises(ValueError):
        injectivity_prob(5, 1)


def test_intersect_examples():
    assert intersect_prob(8, 2, 2) == F_(3, 5) == brute_stats(two_to_one(8), 2, 2)[1]
    assert intersect_prob(8, 2, 8 - 4 + 1) == 1
    assert intersect_prob(8, 0, 3) == 0
    with pytest.raises(ValueError):
        intersect_prob(6, 2, 5)


def test_pcl_examples():
    assert pcl_exact((1, 2, 3, 4), 1, 2).value == 0
    r = pcl_exact((1, 1, 2, 2), 1, 1)
    assert r.value == F_(1, 3) and r.exact and r.pairs == 12
    assert pcl_exact(FunctionTuple(((1, 1, 2, 2),), 4), 1, 1).value == F_(1, 3)


def test_pcl_monte_carlo_is_flagged_and_seeded():
    h = two_to_one(10)
    a = pcl_exact(h, 2, 3, limit=10, samples=2000, seed=7)
    b = pcl_exact(h, 2, 3, limit=10, samples=2000, seed=7)
    assert not a.exact and a == b and a.seed == 7 and a.samples == 2000
    assert abs(a.value - pcl_exact(h, 2, 3).value) < F_(1, 10)


@given(st.sampled_from([2, 4, 6, 8]), st.integers(0, 3), st.integers(0, 4), st.randoms(use_true_random=False))
def test_closed_forms_and_bounding_event(M, F, G, rnd):
    if 2 * F > M or F + G > M:
        return
    pts = list(range(M))
    rnd.shuffle(pts)
    h = two_to_one(M, [(pts[2 * a], pts[2 * a + 1]) for a in range(M // 2)])
    inj, cond, pcl = brute_stats(h, F, G)
    assert injectivity_prob(M, F) == inj
    if cond is not None:
        assert intersect_prob(M, F, G) == cond
    assert pcl_exact(h, F, G).value == pcl >= injectivity_prob(M, F) * intersect_prob(M, F, G)


# -- averaged collision polynomial ---------------------------------------------------

def exact_claw_witness():
    return var(X(1, 1, 1)) * var(X(2, 1, 1)) + var(X(1, 1, 2)) * var(X(2, 1, 2))


def test_average_with_exact_witness():
    # the exact witness at range 4: sum_j x[1,1,j] x[2,1,j]
    P0 = sum((var(X(1, 1, j)) * var(X(2, 1, j)) for j in range(1, 5)), const(0))
    P = average_over_subsets(P0, 4, 1, 1)
    terms = [(tuple((v.l, v.i, v.j) for v, _ in m), c) for m, c in P.items()]
    assert eval_single(terms, (1, 2, 3, 4)) == 0
    assert eval_single(terms, (1, 1, 2, 2)) == F_(1, 3) == pcl_exact((1, 1, 2, 2), 1, 1).value
    assert P.degree() <= P0.degree()


@pytest.mark.parametrize("FG", [(1, 1), (1, 2)])
def test_average_inequalities_at_M4(FG):
    F, G = FG
    eps = F_(1, 3)
    res = min_approx_degree(DegreeQuery(claw(F, G, 4), eps))
    base = expand_freq_to_raw(res.witness, (F, G))
    ca = claw_to_collision_average(base, 4, F, G, eps)
    assert ca.small_side_ok and ca.large_side_ok
    assert ca.poly.degree() <= base.degree()
    assert ca.gap >= ca.pcl_min * (1 - eps) - eps
    assert ca.reference_map == (ca.poly.scale(25) + 18) / 43
    # the affine normalization maps one-to-one values to <= err and two-to-one to >= 1 - err
    n = ca.normalized
    terms = [(tuple((v.l, v.i, v.j) for v, _ in m), c) for m, c in n.items()]
    assert eval_single(terms, (1, 2, 3, 4)) <= ca.normalized_error
    assert eval_single(terms, (1, 1, 2, 2)) >= 1 - ca.normalized_error


def test_affine_normalization():
    a, b, err = affine_normalization(F_(0), F_(1, 10), F_(1, 2), F_(3, 5))
    assert 0 <= a * 0 + b and a * F_(3, 5) + b <= 1
    assert err == F_(1, 2) - a * (F_(1, 2) - F_(1, 10)) / 2
    assert affine_normalization(F_(0), F_(1, 2), F_(1, 2), F_(1)) == (1, 0, F_(1, 2))


# -- OR embedding ---------------------------------------------------------------

def test_or_embedding_examples():
    assert or_embedding(exact_claw_witness()) == var(X(2, 1, 1))
    assert or_embedding(const(F_(2, 5))) == F_(2, 5)


@pytest.mark.parametrize("G", [1, 2, 3])
def test_or_embedding_from_lp_witness(G):
    eps = F_(1, 3)
    res = min_approx_degree(DegreeQuery(claw(1, G, 2), eps))
    base = expand_freq_to_raw(res.witness, (1, G))
    p = or_embedding(base)
    assert p.degree() <= base.degree()
    err = or_error(p, G)
    assert err is not None and err <= eps


# -- block reduction -----------------------------------------------------------------

def test_block_examples():
    g = FunctionTuple(((3, 1, 2, 2),), 3)
    assert block_partition_instance(g, 2, 1).values == ((3, 1),)
    assert block_partition_instance(g, 4, 1) == g
    with pytest.raises(ValueError):
        block_partition_instance(g, 3, 1)
    with pytest.raises(ValueError):
        block_partition_instance(g, 2, 3)


@pytest.mark.parametrize("F,G,M", [(1, 2, 2), (2, 4, 3), (1, 3, 3)])
def test_blocks_preserve_claws(F, G, M):
    # the long function is cut into blocks of the short function's size
    for t in enumerate_domain(claw(G, F, M)):
        g, f = FunctionTuple((t.values[0],), M), t.values[1]
        anyblock = any(
            eval_property(claw(F, F, M), FunctionTuple((block_partition_instance(g, F, i).values[0], f), M))
            for i in range(1, G // F + 1))
        assert anyblock == bool(eval_property(claw(G, F, M), t))


# -- pSearch -------------------------------------------------------------------------

def test_psearch_value_examples():
    assert psearch_value((None, 5, None)) == 5
    assert psearch_value((7,)) == 7
    with pytest.raises(ValueError):
        psearch_value((None, None))
    with pytest.raises(ValueError):
        psearch_value((1, 2))


def test_block_type_checks_promise():
    from clawdeg.reductions import PartialFunctionBlock
    b = PartialFunctionBlock((None, 3))
    assert b.value == 3 and psearch_value(b) == 3
    with pytest.raises(ValueError):
        PartialFunctionBlock((None, None))
    flat = psearch_compose_instance([b], [PartialFunctionBlock((1, None))], 3)
    assert flat.values == ((4, 3), (1, 5))


def test_compose_example():
    flat = psearch_compose_instance([(None, 2)], [(1, None)], 3)
    assert flat.values == ((4, 2), (1, 5)) and flat.M == 5
    dec = psearch_decode([(None, 2)], [(1, None)], 3)
    c = lambda t: eval_property(claw(len(t.values[0]), len(t.values[1]), t.M), t)
    assert c(dec) == c(flat) == 0


def test_compose_layout_errors():
    with pytest.raises(ValueError):
        psearch_compose_instance([(None, 2)], [(1,)], 3)
    with pytest.raises(ValueError):
        psearch_compose_instance([(None, 4)], [(1, None)], 3)
    with pytest.raises(ValueError):
        list(psearch_inputs(3, 4, 4, 2))


@pytest.mark.parametrize("k,F,G,M", [(1, 2, 2, 2), (2, 2, 4, 2), (1, 2, 4, 2)])
def test_composition_identity(k, F, G, M):
    c = lambda t: eval_property(claw(len(t.values[0]), len(t.values[1]), t.M), t)
    n = 0
    for fb, gb in psearch_inputs(k, F, G, M):
        n += 1
        flat = psearch_compose_instance(fb, gb, M)
        assert len(flat.values[0]) == F and len(flat.values[1]) == G
        assert c(flat) == c(psearch_decode(fb, gb, M))
    K = F // k
    assert n == (K * M) ** (k + G // K)


# -- schedule ------------------------------------------------------------------------

def test_schedule_examples():
    rows = mk_schedule(4, 8)
    assert [r.M_k for r in rows] == [3, 6, 11, 12]
    assert not schedule_violations(4, 8, rows)
    for N in (1, 2, 5, 9):
        rows = mk_schedule(N, N)
        assert rows[0].M_k == 2 and rows[-1].M_k == 2 * N
    with pytest.raises(ValueError):
        mk_schedule(3, 10)
    with pytest.raises(ValueError):
        mk_schedule(3, 2)


@given(st.integers(1, 80).flatmap(lambda F: st.tuples(st.just(F), st.integers(F, F * F))))
def test_schedule_properties(FG):
    F, G = FG
    rows = mk_schedule(F, G)
    assert len(rows) == F
    for r in rows:
        assert r.F_k % r.k == 0 and r.G_k % (r.F_k // r.k) == 0
        assert Fraction(r.M_k) == r.k + Fraction(r.k * r.G_k, r.F_k)
        assert 2 * r.F_k >= F and 2 * r.G_k >= G
    assert all(b.M_k >= a.M_k and b.M_k <= 8 * a.M_k for a, b in zip(rows, rows[1:]))
    assert schedule_violations(F, G, rows) == []


def test_schedule_violations_detected():
    from clawdeg.reductions import ScheduleRow
    rows = mk_schedule(4, 8)
    broken = rows[:1] + [ScheduleRow(2, 4, 8, 100)] + rows[2:]
    assert schedule_violations(4, 8, broken)


# -- bound calculator ---------------------------------------------------------------

def regime_oracle(F, G, M):
    if G > F * F:
        return "SqrtG"
    if M >= F + G:
        return "CubeRootFG"
    if M >= Fraction(G, F) ** 2:
        return "MixedSixth"
    return "SqrtG"


def test_lb_examples():
    for N in (2, 3, 7):
        for M in range(2, 2 * N):
            b = lb_formula(N, N, M)
            assert b.regime == "MixedSixth" and b.value_pow6 == N ** 3 * M
    for M in (2, 10, 1000):
        assert lb_formula(2, 5, M).regime == "SqrtG"
    # F=2, G=4: (G/F)^2 = 4 = boundary, F+G = 6
    assert [lb_formula(2, 4, M).regime for M in (3, 4, 5, 6)] == ["SqrtG", "MixedSixth", "MixedSixth",
                                                                   "CubeRootFG"]
    with pytest.raises(ValueError):
        lb_formula(3, 2, 5)


@given(st.integers(1, 30), st.integers(1, 200), st.integers(2, 2000))
def test_lb_regime_matches_casework(F, G, M):
    if G < F:
        F, G = G, F
    b = lb_formula(F, G, M)
    assert b.regime == regime_oracle(F, G, M)
    if b.regime == "MixedSixth":
        # never weaker than cutting g into blocks of size F
        assert b.value_pow6 >= F ** 3 * M
    assert b.transcript
