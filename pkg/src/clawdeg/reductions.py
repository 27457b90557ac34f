"""Reductions between claw, collision, OR and pSearch, and the lower-bound casework.

Functions are 1-indexed value tuples as in ``properties``.  ``None`` plays the
role of the pSearch blank symbol.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .polyring import Monomial, Poly, Var, X, const, var
from .properties import FunctionTuple, PromiseViolation, collision, enumerate_domain

EXACT_PAIR_LIMIT = 10 ** 7
DEFAULT_SEED = 20240501


# -- collision probabilities -------------------------------------------------

def _check_two_to_one_sizes(M: int, F: int) -> None:
    if M % 2:
        raise ValueError(f"a two-to-one function on [{M}] needs an even M")
    if F < 0 or 2 * F > M:
        raise ValueError(f"need 0 <= 2F <= M, got F={F}, M={M}")


def injectivity_prob(M: int, F: int) -> Fraction:
    """Chance that a uniform F-subset of a two-to-one function's domain has distinct images."""
    _check_two_to_one_sizes(M, F)
    out = Fraction(1)
    for t in range(F):
        out *= Fraction(M - 2 * t, M - t)
    return out


def intersect_prob(M: int, F: int, G: int) -> Fraction:
    """Chance that a uniform G-subset of the rest meets the partners of an injective F-subset."""
    _check_two_to_one_sizes(M, F)
    if G < 0 or M - F < G:
        raise ValueError(f"need 0 <= G <= M - F, got G={G}")
    return 1 - Fraction(math.comb(M - 2 * F, G), math.comb(M - F, G))


@dataclass(frozen=True)
class PclResult:
    value: Fraction
    exact: bool
    pairs: int
    samples: Optional[int] = None
    seed: Optional[int] = None


def pcl_exact(h: Sequence[int] | FunctionTuple, F: int, G: int,
              limit: int = EXACT_PAIR_LIMIT, samples: int = 200_000,
              seed: int = DEFAULT_SEED) -> PclResult:
    """Probability that ``h`` restricted to disjoint uniform S (|S|=F), T (|T|=G) has a claw.

    S is drawn first, then T from the complement.  Exact whenever the number
    of (S, T) pairs is within ``limit``; otherwise a seeded Monte Carlo
    estimate flagged ``exact=False``.
    """
    if isinstance(h, FunctionTuple):
        h = h.values[0]
    h = tuple(h)
    N = len(h)
    if F < 0 or G < 0 or F + G > N:
        raise ValueError(f"need F + G <= {N}, got F={F}, G={G}")
    pairs = math.comb(N, F) * math.comb(N - F, G)
    if pairs <= limit:
        per_s = math.comb(N - F, G)
        hits = 0
        for S in itertools.combinations(range(N), F):
            seen = {h[s] for s in S}
            inset = set(S)
            avoid = sum(1 for i in range(N) if i not in inset and h[i] not in seen)
            hits += per_s - math.comb(avoid, G)
        return PclResult(Fraction(hits, pairs), True, pairs)
    rng = random.Random(seed)
    hits = 0
    idx = list(range(N))
    for _ in range(samples):
        chosen = rng.sample(idx, F + G)
        if {h[s] for s in chosen[:F]} & {h[t] for t in chosen[F:]}:
            hits += 1
    return PclResult(Fraction(hits, samples), False, pairs, samples, seed)


# -- claw witness averaged into a collision polynomial ----------------------

def _raw_terms(p: Poly) -> List[Tuple[Tuple[Tuple[int, int, int], ...], Fraction]]:
    out = []
    for m, c in p.items():
        if any(v.kind != "x" for v, _ in m):
            raise ValueError("expected a polynomial in indicator variables")
        out.append((tuple((v.l, v.i, v.j) for v, _ in m), c))
    return out


def eval_single(p_terms, h: Sequence[int]) -> Fraction:
    """Value of an indicator polynomial in one function's variables at ``h``."""
    total = Fraction(0)
    for pairs, c in p_terms:
        if all(h[i - 1] == j for _, i, j in pairs):
            total += c
    return total


def average_over_subsets(p_claw: Poly, M: int, F: int, G: int,
                         limit: int = 200_000) -> Poly:
    """Average of the claw witness over all disjoint (S, T) placed inside ``[M]``.

    Domain point ``a`` of the first function goes to the ``a``-th smallest
    element of S, domain point ``b`` of the second to the ``b``-th of T; the
    result is in the variables ``x[1,i,j]`` of a single function on ``[M]``.
    """
    if F + G > M:
        raise ValueError("need F + G <= M")
    pairs = math.comb(M, F) * math.comb(M - F, G)
    if pairs > limit:
        from .properties import BudgetExceeded
        raise BudgetExceeded(pairs, limit, "(S, T) pair set")
    terms = _raw_terms(p_claw)
    acc: Dict[Monomial, Fraction] = {}
    for S in itertools.combinations(range(1, M + 1), F):
        rest = [i for i in range(1, M + 1) if i not in S]
        for T in itertools.combinations(rest, G):
            place = {1: S, 2: T}
            for trip, c in terms:
                mono: Dict[Var, int] = {}
                for l, i, j in trip:
                    if l not in place:
                        raise ValueError(f"claw witness uses function {l}")
                    v = X(1, place[l][i - 1], j)
                    mono[v] = mono.get(v, 0) + 1
                key = tuple(sorted(mono.items()))
                acc[key] = acc.get(key, 0) + c
    return Poly({m: c / pairs for m, c in acc.items()})


@dataclass
class CollisionAverage:
    """Outcome of turning a claw witness into a collision polynomial."""

    poly: Poly
    M: int
    F: int
    G: int
    epsilon: Fraction
    one_to_one_max: Fraction
    one_to_one_min: Fraction
    two_to_one_min: Fraction
    two_to_one_max: Fraction
    pcl_min: Fraction
    small_side_ok: bool  # 0 <= P <= eps on every one-to-one input
    large_side_ok: bool  # P >= pcl (1 - eps) on every two-to-one input
    scale: Fraction
    shift: Fraction
    normalized_error: Fraction
    reference_map: Poly = field(repr=False, default=None)

    @property
    def gap(self) -> Fraction:
        return self.two_to_one_min - self.one_to_one_max

    @property
    def normalized(self) -> Poly:
        return self.poly.scale(self.scale) + self.shift


def affine_normalization(lo_min: Fraction, lo_max: Fraction, hi_min: Fraction,
                         hi_max: Fraction) -> Tuple[Fraction, Fraction, Fraction]:
    """Best ``(a, b, err)`` so that ``a*P + b`` stays in [0, 1] and is within ``err`` of the bit.

    The midpoint between the largest one-to-one value and the smallest
    two-to-one value goes to 1/2, and the scale is as large as the observed
    value range allows.
    """
    if hi_min <= lo_max:
        return Fraction(1), Fraction(0), Fraction(1, 2)
    mid = (lo_max + hi_min) / 2
    caps = []
    if mid > lo_min:
        caps.append(Fraction(1, 2) / (mid - lo_min))
    if hi_max > mid:
        caps.append(Fraction(1, 2) / (hi_max - mid))
    a = min(caps) if caps else Fraction(1)
    b = Fraction(1, 2) - a * mid
    err = Fraction(1, 2) - a * (hi_min - lo_max) / 2
    return a, b, err


def claw_to_collision_average(p_claw: Poly, M: int, F: int, G: int, epsilon,
                              limit: int = 200_000) -> CollisionAverage:
    """Average a claw witness into a collision polynomial and audit it on every promise input."""
    eps = Fraction(epsilon)
    P = average_over_subsets(p_claw, M, F, G, limit)
    terms = _raw_terms(P)
    lo: List[Fraction] = []
    hi: List[Fraction] = []
    small_ok = large_ok = True
    pcl_min = None
    pcl_cache: Dict[Tuple[int, ...], Fraction] = {}
    for t in enumerate_domain(collision(M)):
        h = t.values[0]
        v = eval_single(terms, h)
        if len(set(h)) == len(h):
            lo.append(v)
            small_ok &= 0 <= v <= eps
        else:
            # p_cl only depends on which points collide
            shape = tuple(h.index(x) for x in h)
            if shape not in pcl_cache:
                pcl_cache[shape] = pcl_exact(h, F, G).value
            pcl = pcl_cache[shape]
            pcl_min = pcl if pcl_min is None else min(pcl_min, pcl)
            hi.append(v)
            large_ok &= v >= pcl * (1 - eps)
    a, b, err = affine_normalization(min(lo), max(lo), min(hi), max(hi))
    return CollisionAverage(P, M, F, G, eps, max(lo), min(lo), min(hi), max(hi), pcl_min,
                            small_ok, large_ok, a, b, err,
                            reference_map=(P.scale(25) + 18).scale(Fraction(1, 43)))


# -- OR embedding ------------------------------------------------------------

def multilinearize(p: Poly) -> Poly:
    """Collapse every exponent to 1, valid on Boolean points."""
    return Poly([(tuple((v, 1) for v, _ in m), c) for m, c in p.items()])


def or_embedding(p: Poly) -> Poly:
    """Restrict a raw claw witness to ``f = 1`` everywhere and ``g`` valued in {1, 2}.

    The result is a polynomial in ``x[2,k,1]``, k in [G].
    """
    def image(v: Var):
        if v.kind != "x":
            raise ValueError("OR embedding needs a polynomial in indicator variables")
        if v.l == 1:
            return 1 if v.j == 1 else 0
        if v.l == 2:
            if v.j == 1:
                return v
            if v.j == 2:
                return const(1) - var(X(2, v.i, 1))
            return 0
        raise ValueError(f"claw witness uses function {v.l}")
    return multilinearize(p.map_vars(image))


def or_error(p: Poly, G: int) -> Optional[Fraction]:
    """Worst distance to OR over {0,1}^G, or None when ``p`` leaves [0, 1]."""
    worst = Fraction(0)
    for bits in itertools.product((0, 1), repeat=G):
        v = p({X(2, k, 1): b for k, b in enumerate(bits, start=1)})
        if not 0 <= v <= 1:
            return None
        worst = max(worst, abs(v - int(any(bits))))
    return worst


# -- block reduction ---------------------------------------------------------

def block_partition_instance(g: FunctionTuple, F: int, i: int) -> FunctionTuple:
    """The ``i``-th block (1-based) of size ``F`` of a single function."""
    vals = g.values[0]
    G = len(vals)
    if F < 1 or G % F:
        raise ValueError(f"block size {F} does not divide {G}")
    if not 1 <= i <= G // F:
        raise ValueError(f"block index {i} outside [1, {G // F}]")
    return FunctionTuple((vals[(i - 1) * F:i * F],), g.M)


# -- pSearch composition -----------------------------------------------------

@dataclass(frozen=True)
class PartialFunctionBlock:
    """A block with exactly one non-blank entry, checked on construction."""

    values: Tuple[Optional[int], ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        psearch_value(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    @property
    def value(self) -> int:
        return psearch_value(self.values)


Block = Tuple[Optional[int], ...]


def psearch_value(block) -> int:
    """The unique non-blank entry of a block."""
    hits = [v for v in block if v is not None]
    if len(hits) != 1:
        raise ValueError(f"pSearch promise needs exactly one non-blank entry, got {len(hits)}")
    return hits[0]


def _check_layout(f_blocks, g_blocks, M: int) -> int:
    blocks = list(f_blocks) + list(g_blocks)
    if not f_blocks or not g_blocks:
        raise ValueError("need at least one block on each side")
    K = len(blocks[0])
    if any(len(b) != K for b in blocks) or K < 1:
        raise ValueError("all blocks must share one positive size")
    for b in blocks:
        psearch_value(b)
        if any(v is not None and not 1 <= v <= M for v in b):
            raise ValueError(f"block {b} has a value outside [1, {M}]")
    return K


def psearch_compose_instance(f_blocks: Sequence[Block], g_blocks: Sequence[Block],
                             M: int) -> FunctionTuple:
    """Flatten block inputs into a claw instance on ``[M+2]``.

    Blanks become ``M+1`` in f and ``M+2`` in g, so blanks never collide.
    """
    _check_layout(f_blocks, g_blocks, M)
    f = tuple(M + 1 if v is None else v for b in f_blocks for v in b)
    g = tuple(M + 2 if v is None else v for b in g_blocks for v in b)
    return FunctionTuple((f, g), M + 2)


def psearch_decode(f_blocks: Sequence[Block], g_blocks: Sequence[Block], M: int) -> FunctionTuple:
    _check_layout(f_blocks, g_blocks, M)
    return FunctionTuple((tuple(map(psearch_value, f_blocks)), tuple(map(psearch_value, g_blocks))), M)


def psearch_inputs(k: int, F: int, G: int, M: int) -> Iterator[Tuple[Tuple[Block, ...], Tuple[Block, ...]]]:
    """Every promise input: f in k blocks of size F/k, g in kG/F blocks of the same size."""
    if F % k or G % (F // k):
        raise ValueError("need k | F and (F/k) | G")
    K = F // k
    choices = []
    for pos in range(K):
        for v in range(1, M + 1):
            choices.append(tuple(v if p == pos else None for p in range(K)))
    nf, ng = k, G // K
    for combo in itertools.product(choices, repeat=nf + ng):
        yield combo[:nf], combo[nf:]


# -- schedule of intermediate ranges -----------------------------------------

@dataclass(frozen=True)
class ScheduleRow:
    k: int
    F_k: int
    G_k: int
    M_k: int


def mk_schedule(F: int, G: int) -> List[ScheduleRow]:
    """Rows ``k = 1..F`` with ``F_k = k*floor(F/k)``, ``G_k = (F_k/k)*floor(G/(F_k/k))``."""
    if not 1 <= F <= G <= F * F:
        raise ValueError(f"need 1 <= F <= G <= F^2, got F={F}, G={G}")
    rows = []
    for k in range(1, F + 1):
        block = F // k
        Fk = k * block
        Gk = block * (G // block)
        rows.append(ScheduleRow(k, Fk, Gk, k + k * Gk // Fk))
    return rows


def schedule_violations(F: int, G: int, rows: Sequence[ScheduleRow]) -> List[str]:
    """Every failed schedule property, as readable strings; empty when all hold."""
    bad = []
    for r in rows:
        if r.F_k % r.k or r.G_k % (r.F_k // r.k) or r.M_k * r.F_k != r.k * r.F_k + r.k * r.G_k:
            bad.append(f"k={r.k}: divisibility or M_k definition fails")
        if not (2 * r.F_k >= F and r.F_k <= F and 2 * r.G_k >= G and r.G_k <= G):
            bad.append(f"k={r.k}: F/2 <= F_k <= F and G/2 <= G_k <= G fails")
    for a, b in zip(rows, rows[1:]):
        if b.M_k < a.M_k:
            bad.append(f"k={a.k}: M_k decreases")
        if b.M_k > 8 * a.M_k:
            bad.append(f"k={a.k}: M_(k+1)/M_k = {Fraction(b.M_k, a.M_k)} > 8")
    if rows[0].M_k != 1 + G // F:
        bad.append(f"M_1 = {rows[0].M_k} != 1 + floor(G/F)")
    if rows[-1].M_k != F + G:
        bad.append(f"M_F = {rows[-1].M_k} != F + G")
    return bad


# -- lower-bound casework ----------------------------------------------------

REGIMES = ("SqrtG", "MixedSixth", "CubeRootFG")


@dataclass(frozen=True)
class BoundFormula:
    """The applicable claw lower bound, exactly.

    ``value_pow6`` is the sixth power of the bound without constants:
    ``G^3`` for sqrt(G), ``F^2 G M`` for F^(1/3) G^(1/6) M^(1/6), and
    ``(FG)^2`` for (FG)^(1/3).  ``block_reduction_pow6`` is the sixth power
    of the weaker bound max(sqrt(G), F^(1/2) M^(1/6)) that the plain block
    reduction gives.
    """

    F: int
    G: int
    M: int
    regime: str
    value_pow6: int
    block_reduction_pow6: int
    transcript: Tuple[str, ...]

    @property
    def value(self) -> Fraction:
        return Fraction(self.value_pow6)


def lb_formula(F: int, G: int, M: int) -> BoundFormula:
    if not 1 <= F <= G:
        raise ValueError(f"need 1 <= F <= G, got F={F}, G={G}")
    if M < 2:
        raise ValueError("need M >= 2")
    log = []
    if G > F * F:
        log.append(f"G={G} > F^2={F * F}: sqrt(G) for every M")
        regime = "SqrtG"
    elif M >= F + G:
        log.append(f"G <= F^2 and M={M} >= F+G={F + G}")
        regime = "CubeRootFG"
    elif F * F * G * M >= G ** 3:
        log.append(f"G <= F^2, M < F+G, F^2*G*M={F * F * G * M} >= G^3={G ** 3}, i.e. M >= (G/F)^2")
        regime = "MixedSixth"
    else:
        log.append(f"G <= F^2, M < F+G, F^2*G*M={F * F * G * M} < G^3={G ** 3}, i.e. M < (G/F)^2")
        regime = "SqrtG"
    pow6 = {"SqrtG": G ** 3, "MixedSixth": F * F * G * M, "CubeRootFG": (F * G) ** 2}[regime]
    return BoundFormula(F, G, M, regime, pow6, max(G ** 3, F ** 3 * M), tuple(log))
