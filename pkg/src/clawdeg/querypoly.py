"""Symbolic amplitudes of a query algorithm with rational orthogonal steps.

Basis labels are ``(s, i, b, z)``: ``s`` selects f (0) or g (1), ``i`` is a
1-based domain index, ``b`` a range register in ``0..M-1`` and ``z`` a work
label.  In additive mode range value ``j`` adds ``j mod M`` to the register;
in XOR mode it XORs ``j - 1``.  Each amplitude is a polynomial in the
indicator variables ``x[1,i,j]`` (for f) and ``x[2,k,j]`` (for g).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Mapping, NamedTuple, Optional, Sequence, Tuple

from .polyring import NEG_INF, Poly, X, const, var

MODES = ("add", "xor")


class Label(NamedTuple):
    s: int
    i: int
    b: int
    z: int


@dataclass(frozen=True)
class OracleSpec:
    F: int
    G: int
    M: int
    mode: str = "add"
    work: int = 1

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if min(self.F, self.G, self.M, self.work) < 1:
            raise ValueError("sizes must be positive")
        if self.mode == "xor" and self.M & (self.M - 1):
            raise ValueError(f"XOR mode needs M a power of two, got {self.M}")

    def labels(self) -> List[Label]:
        return [Label(*t) for t in itertools.product(
            (0, 1), range(1, max(self.F, self.G) + 1), range(self.M), range(self.work))]

    def shift(self, b: int, j: int) -> int:
        """Register content after the oracle writes value ``j`` onto ``b``."""
        return (b + j) % self.M if self.mode == "add" else b ^ (j - 1)


@dataclass(frozen=True)
class SymbolicState:
    amplitudes: Mapping[Label, Poly] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", {l: p for l, p in self.amplitudes.items() if p})

    def __getitem__(self, label) -> Poly:
        return self.amplitudes.get(Label(*label), Poly())

    def max_degree(self) -> float:
        return max((p.degree() for p in self.amplitudes.values()), default=NEG_INF)

    def degree_profile(self) -> Dict[Label, int]:
        return {l: p.degree() for l, p in self.amplitudes.items()}


def init_state(spec: Optional[OracleSpec] = None) -> SymbolicState:
    return SymbolicState({Label(0, 1, 0, 0): const(1)})


def apply_oracle(st: SymbolicState, spec: OracleSpec) -> SymbolicState:
    """One oracle call; domain indices past a function's size are left alone."""
    out: Dict[Label, Poly] = {}
    for lab, amp in st.amplitudes.items():
        size = spec.F if lab.s == 0 else spec.G
        if lab.i > size:
            out[lab] = out.get(lab, Poly()) + amp
            continue
        for j in range(1, spec.M + 1):
            new = Label(lab.s, lab.i, spec.shift(lab.b, j), lab.z)
            out[new] = out.get(new, Poly()) + var(X(lab.s + 1, lab.i, j)) * amp
    return SymbolicState(out)


Matrix = Mapping[Tuple[Label, Label], Fraction]


def _support(u: Matrix) -> List[Label]:
    return sorted({r for r, _ in u} | {c for _, c in u})


def check_orthogonal(u: Matrix) -> bool:
    """``u u^T = I`` on the labels the matrix touches."""
    sup = _support(u)
    rows: Dict[Label, Dict[Label, Fraction]] = {l: {} for l in sup}
    for (r, c), v in u.items():
        if v:
            rows[r][c] = Fraction(v)
    for a in sup:
        for b in sup:
            dot = sum((v * rows[b].get(c, 0) for c, v in rows[a].items()), Fraction(0))
            if dot != (1 if a == b else 0):
                return False
    return True


def apply_unitary(st: SymbolicState, u: Matrix) -> SymbolicState:
    """``new[r] = sum_c u[r, c] old[c]`` on the support; other labels pass through."""
    if not check_orthogonal(u):
        raise ValueError("matrix is not orthogonal on its support")
    sup = set(_support(u))
    out: Dict[Label, Poly] = {l: p for l, p in st.amplitudes.items() if l not in sup}
    for (r, c), v in u.items():
        if v and c in st.amplitudes:
            out[r] = out.get(r, Poly()) + st.amplitudes[c].scale(Fraction(v))
    return SymbolicState(out)


def permutation_matrix(mapping: Mapping[Label, Label]) -> Dict[Tuple[Label, Label], Fraction]:
    return {(dst, src): Fraction(1) for src, dst in mapping.items()}


def _matmul(a: Matrix, b: Matrix) -> Dict[Tuple[Label, Label], Fraction]:
    by_row: Dict[Label, List[Tuple[Label, Fraction]]] = {}
    for (r, c), v in b.items():
        by_row.setdefault(r, []).append((c, v))
    out: Dict[Tuple[Label, Label], Fraction] = {}
    for (r, k), v in a.items():
        for c, w in by_row.get(k, ()):
            out[(r, c)] = out.get((r, c), 0) + v * w
    return {k: v for k, v in out.items() if v}


def random_orthogonal(labels: Sequence[Label], rng: random.Random,
                      rotations: int = 4) -> Dict[Tuple[Label, Label], Fraction]:
    """A random rational orthogonal matrix: a permutation times Givens rotations.

    Rotations use the rational point ``((1-t^2)/(1+t^2), 2t/(1+t^2))`` of the
    unit circle for a small random rational ``t``.
    """
    labels = list(labels)
    shuffled = labels[:]
    rng.shuffle(shuffled)
    u = permutation_matrix(dict(zip(labels, shuffled)))
    for _ in range(rotations):
        a, b = rng.sample(labels, 2)
        t = Fraction(rng.randint(-3, 3), rng.randint(1, 3))
        c, s = (1 - t * t) / (1 + t * t), 2 * t / (1 + t * t)
        g = {(l, l): Fraction(1) for l in labels if l not in (a, b)}
        g.update({(a, a): c, (a, b): -s, (b, a): s, (b, b): c})
        u = _matmul(g, u)
    return u


def acceptance_polynomial(st: SymbolicState, accepting: Iterable) -> Poly:
    total = Poly()
    for lab in set(Label(*l) for l in accepting):
        a = st.amplitudes.get(lab)
        if a is not None:
            total = total + a * a
    return total


def indicator_assignment(f: Sequence[int], g: Sequence[int], M: int) -> Dict:
    out = {}
    for l, vals in ((1, f), (2, g)):
        for i, v in enumerate(vals, start=1):
            for j in range(1, M + 1):
                out[X(l, i, j)] = int(v == j)
    return out


def all_function_pairs(spec: OracleSpec) -> Iterator[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    rng = range(1, spec.M + 1)
    for f in itertools.product(rng, repeat=spec.F):
        for g in itertools.product(rng, repeat=spec.G):
            yield f, g


def oracle_permutation(spec: OracleSpec, f: Sequence[int], g: Sequence[int]) -> Dict[Label, Label]:
    """The concrete oracle for fixed ``(f, g)`` as a map on basis labels."""
    out = {}
    for lab in spec.labels():
        vals = f if lab.s == 0 else g
        out[lab] = lab if lab.i > len(vals) else lab._replace(b=spec.shift(lab.b, vals[lab.i - 1]))
    return out


@dataclass
class AuditResult:
    q: int
    seed: int
    amplitude_degree: float
    acceptance_degree: float
    norm_ok: bool
    functions_checked: int

    @property
    def passed(self) -> bool:
        return (self.amplitude_degree <= self.q and self.acceptance_degree <= 2 * self.q
                and self.norm_ok)


def degree_audit(spec: OracleSpec, q: int, seed: int, rotations: int = 4,
                 accepting: Optional[Iterable] = None) -> AuditResult:
    """Run ``U_q O ... O U_0`` from the zero state with random orthogonal ``U``s.

    Checks the degree bounds and that the squared amplitudes sum to exactly 1
    for every function pair.
    """
    rng = random.Random(seed)
    labels = spec.labels()
    st = apply_unitary(init_state(spec), random_orthogonal(labels, rng, rotations))
    for _ in range(q):
        st = apply_oracle(st, spec)
        st = apply_unitary(st, random_orthogonal(labels, rng, rotations))
    if accepting is None:
        accepting = [l for l in labels if l.z == 0 and l.b == 0]
    acc = acceptance_polynomial(st, accepting)
    total = acceptance_polynomial(st, labels)
    count = 0
    ok = True
    for f, g in all_function_pairs(spec):
        point = indicator_assignment(f, g, spec.M)
        ok &= total(point) == 1 and 0 <= acc(point) <= 1
        count += 1
    return AuditResult(q, seed, st.max_degree(), acc.degree(), ok, count)
