import itertools
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from clawdeg.multisym import (canonical, decompose_mon, expand_freq_to_raw, freq_layout, lift_range,
                              matrix_layout, orbit_monomial, orbit_size, power_sum, product_expansion,
                              restrict_range, symmetrize_poly, symmetrize_term, weight)
from clawdeg.polyring import Poly, X, Z, const, var
from clawdeg.properties import FunctionTuple

lay = matrix_layout(1)


def x(i, j):
    return var(X(1, i, j))


def z(j, l=1):
    return var(Z(l, j))


def test_power_sum_examples():
    assert power_sum((1, 0), 2, lay) == x(1, 1) + x(2, 1)
    assert power_sum((0, 0), 3, lay) == 3
    assert power_sum((1, 1), 2, lay) == x(1, 1) * x(1, 2) + x(2, 1) * x(2, 2)


def test_orbit_monomial_examples():
    assert orbit_monomial(((0, 1), (1, 0)), lay) == x(1, 2) * x(2, 1) + x(2, 2) * x(1, 1)
    assert orbit_monomial(((0, 0), (0, 0)), lay) == 1
    assert orbit_monomial(((1,), (1,)), lay) == x(1, 1) * x(2, 1)


def test_decompose_examples():
    assert decompose_mon(((0,), (0,))).terms == {((0,), (0,)): Fraction(1, 4)}
    lam = (2, 1)
    for n in (1, 2, 3, 4):
        omega = (lam,) + ((0, 0),) * (n - 1)
        key = canonical(omega)
        assert decompose_mon(omega).terms == {key: Fraction(1, n ** (n - 1))}
    e = decompose_mon(((1,), (1,)))
    P1, P2 = power_sum((1,), 2, lay), power_sum((2,), 2, lay)
    assert e.expand(2, lay) == (P1 * P1 - P2) / 2


def _product_oracle(omega):
    n = len(omega)
    p = const(1)
    for lam in omega:
        p = p * power_sum(lam, n, lay)
    return p


@st.composite
def exponent_matrices(draw, max_n=3, max_m=3, max_weight=4):
    n = draw(st.integers(1, max_n))
    m = draw(st.integers(1, max_m))
    cells = draw(st.lists(st.integers(0, 2), min_size=n * m, max_size=n * m))
    rows = [tuple(cells[i * m:(i + 1) * m]) for i in range(n)]
    while weight(rows) > max_weight:
        i = max(range(n), key=lambda r: sum(rows[r]))
        j = max(range(m), key=lambda c: rows[i][c])
        rows[i] = rows[i][:j] + (rows[i][j] - 1,) + rows[i][j + 1:]
    return tuple(rows)


@given(exponent_matrices())
def test_product_expansion_matches_direct_expansion(omega):
    got = sum((orbit_monomial(w, lay).scale(c) for w, c in product_expansion(canonical(omega)).items()),
              Poly())
    assert got == _product_oracle(omega)


@given(exponent_matrices())
def test_decomposition_round_trip(omega):
    e = decompose_mon(omega)
    assert e.expand(len(omega), lay) == orbit_monomial(omega, lay)
    assert e.max_weight() <= weight(omega)


def test_stabilizer_only_coefficients_are_wrong():
    # P_(1)^3 over three vectors hits x1^2 x2 three times, but (2,1,0) has a trivial stabilizer
    c = product_expansion(((1,), (1,), (1,)))
    assert c[((2,), (1,), (0,))] == 3
    assert c[((1,), (1,), (1,))] == 6 and c[((3,), (0,), (0,))] == 1


@given(exponent_matrices(), st.randoms(use_true_random=False))
def test_power_sums_and_orbits_are_row_symmetric(omega, rnd):
    n = len(omega)
    perm = list(range(1, n + 1))
    rnd.shuffle(perm)
    relabel = lambda v: X(v.l, perm[v.i - 1], v.j)
    mon = orbit_monomial(omega, lay)
    assert mon.map_vars(relabel) == mon
    ps = power_sum(omega[0], n, lay)
    assert ps.map_vars(relabel) == ps


def test_orbit_size_is_multinomial():
    assert orbit_size(((1, 0), (1, 0), (0, 1))) == 3
    assert orbit_size(((0,),) * 8) == 1
    assert len(orbit_monomial(((1,), (0,), (0,), (0,), (0,), (0,), (0,), (0,)), lay)) == 8


# -- symmetrization --------------------------------------------------------------

def _brute_average(pairs, f):
    F = len(f)
    total = Fraction(0)
    for perm in itertools.permutations(range(F)):
        total += all(f[perm[i - 1]] == j for i, j in pairs)
    return total / math.factorial(F)


def test_symmetrize_examples():
    for F in (1, 2, 4):
        assert symmetrize_term(((X(1, 1, 2), 1),), F) == z(2) / F
    F = 4
    got = symmetrize_term(((X(1, 1, 1), 1), (X(1, 3, 1), 1)), F)
    assert got == z(1) * (z(1) - 1) / (F * (F - 1))
    got = symmetrize_term(((X(1, 1, 1), 1), (X(1, 2, 2), 1)), 2)
    assert got == z(1) * z(2) / 2
    assert got({Z(1, 1): 1, Z(1, 2): 1}) == _brute_average([(1, 1), (2, 2)], (1, 2)) == Fraction(1, 2)


def test_symmetrize_invalid_term_vanishes():
    assert symmetrize_term(((X(1, 1, 1), 1), (X(1, 1, 2), 1)), 3) == 0


def test_symmetrize_rejects_oversized_term():
    with pytest.raises(ValueError):
        symmetrize_term(((X(1, 1, 1), 1), (X(1, 2, 1), 1)), 1)


def test_symmetrize_poly_examples():
    y = lambda k, j: var(X(2, k, j))
    assert symmetrize_poly(x(1, 1) * y(1, 1), (1, 1)) == z(1) * z(1, 2)
    assert symmetrize_poly(x(1, 1) * y(1, 1) + x(1, 2) * y(1, 2), (1, 1)) == z(1) * z(1, 2) + z(2) * z(2, 2)
    assert symmetrize_poly(const(1), (3, 3)) == 1


@given(st.integers(1, 4), st.integers(1, 3), st.data())
def test_symmetrize_term_matches_brute_force(F, M, data):
    deg = data.draw(st.integers(0, min(3, F)))
    idx = data.draw(st.lists(st.integers(1, F), min_size=deg, max_size=deg, unique=True))
    pairs = [(i, data.draw(st.integers(1, M))) for i in idx]
    q = symmetrize_term(tuple(sorted((X(1, i, j), 1) for i, j in pairs)), F)
    f = tuple(data.draw(st.lists(st.integers(1, M), min_size=F, max_size=F)))
    freq = {Z(1, j): f.count(j) for j in range(1, M + 1)}
    assert q(freq) == _brute_average(pairs, f)


def test_expand_examples():
    assert expand_freq_to_raw(z(1), (2,)) == x(1, 1) + x(2, 1)
    assert expand_freq_to_raw(z(1) * z(1, 2), (1, 1)) == x(1, 1) * var(X(2, 1, 1))
    assert expand_freq_to_raw(const(7), (3,)) == 7


@st.composite
def freq_polys(draw, k=2, M=2):
    vs = [Z(l, j) for l in range(1, k + 1) for j in range(1, M + 1)]
    terms = {}
    for _ in range(draw(st.integers(0, 4))):
        exps = draw(st.lists(st.integers(0, 2), min_size=len(vs), max_size=len(vs)))
        terms[tuple((v, e) for v, e in zip(vs, exps) if e)] = draw(st.integers(-3, 3))
    return Poly(terms)


@given(freq_polys(), st.lists(st.integers(1, 2), min_size=2, max_size=2), st.data())
def test_value_preservation(q, sizes, data):
    raw = expand_freq_to_raw(q, sizes)
    back = symmetrize_poly(raw, sizes)
    vals = tuple(tuple(data.draw(st.lists(st.integers(1, 2), min_size=F, max_size=F))) for F in sizes)
    t = FunctionTuple(vals, 2)
    assert raw(t.indicator()) == q(t.frequencies()) == back(t.frequencies())


def test_restrict_examples():
    w2 = z(2, 2)
    assert restrict_range(z(1) * z(3) + w2, 2) == w2
    q = z(1) + w2
    assert restrict_range(q, 2) == q
    P11 = power_sum((1, 1), 3, freq_layout)
    assert restrict_range(P11, 2) == z(1) * z(1, 2) + z(2) * z(2, 2)


def test_lift_examples():
    zw = lambda j: z(j) * z(j, 2)
    assert lift_range(zw(1) + zw(2), 2, 3, 2, image_bound=2) == zw(1) + zw(2) + zw(3)
    assert lift_range(const(Fraction(2, 7)), 2, 3, 2, image_bound=2) == Fraction(2, 7)
    assert lift_range(z(1) + z(2), 2, 3, 1, image_bound=2) == z(1) + z(2) + z(3)


def test_lift_preconditions():
    with pytest.raises(ValueError):
        lift_range(z(1), 1, 3, 2, sizes=(1, 1))
    with pytest.raises(ValueError):
        lift_range(z(1), 2, 2, 2, sizes=(1, 1))
    with pytest.raises(ValueError):
        lift_range(z(1), 2, 3, 2)


@given(freq_polys(k=2, M=2), st.integers(3, 5), st.randoms(use_true_random=False), st.data())
def test_lift_is_range_symmetric(q, M, rnd, data):
    lifted = lift_range(q, 2, M, 2, image_bound=2)
    sigma = list(range(1, M + 1))
    rnd.shuffle(sigma)
    pt = {Z(l, j): data.draw(st.integers(0, 3)) for l in (1, 2) for j in range(1, M + 1)}
    moved = {Z(v.l, sigma[v.j - 1]): c for v, c in pt.items()}
    assert lifted(pt) == lifted(moved)


def test_lift_agrees_on_small_images():
    # on inputs whose image fits in the first M' values, the lift equals the symmetrized original
    q = z(1) * z(1) * z(2, 2) + 3 * z(2)
    lifted = lift_range(q, 2, 4, 2, image_bound=2)
    rnd = random.Random(1)
    for _ in range(30):
        f = (rnd.randint(1, 2), rnd.randint(1, 2))
        g = (rnd.choice(f),)
        t2 = FunctionTuple((f, g), 2)
        t4 = FunctionTuple((f, g), 4)
        sym = sum(q({Z(l, s[j - 1]): c for (l, j), c in
                     (((v.l, v.j), c) for v, c in t2.frequencies().items())})
                  for s in ((1, 2), (2, 1))) / 2
        assert lifted(t4.frequencies()) == sym
