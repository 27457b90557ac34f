"""Boolean properties of function tuples and their symmetry classes.

A function ``f: [F] -> [M]`` is stored as the tuple ``(f(1), ..., f(F))``
with values in ``1..M``.
"""

from __future__ import annotations

import itertools
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

DEFAULT_BUDGET = 2_000_000

CanonicalKey = Tuple[Tuple[int, ...], ...]


class BudgetExceeded(RuntimeError):
    def __init__(self, count: int, budget: int, what: str = "domain"):
        super().__init__(f"{what} has {count} elements, over the budget of {budget}")
        self.count = count
        self.budget = budget


class PromiseViolation(ValueError):
    def __init__(self, t: "FunctionTuple", reason: str = "outside the promise domain"):
        super().__init__(f"{t.to_text()}: {reason}")
        self.tuple = t


@dataclass(frozen=True)
class FunctionTuple:
    values: Tuple[Tuple[int, ...], ...]
    M: int

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(tuple(f) for f in self.values))
        for l, f in enumerate(self.values, start=1):
            for v in f:
                if not 1 <= v <= self.M:
                    raise ValueError(f"f{l} takes value {v} outside [1, {self.M}]")

    @property
    def k(self) -> int:
        return len(self.values)

    @property
    def domains(self) -> Tuple[int, ...]:
        return tuple(len(f) for f in self.values)

    def image(self) -> set:
        return {v for f in self.values for v in f}

    def to_text(self) -> str:
        parts = [f"f{l}=" + ",".join(map(str, f)) for l, f in enumerate(self.values, start=1)]
        return "; ".join(parts + [f"M={self.M}"])

    def indicator(self):
        """Assignment of every raw indicator variable ``x[l,i,j]``."""
        from .polyring import X
        return {X(l, i, j): int(f[i - 1] == j)
                for l, f in enumerate(self.values, start=1)
                for i in range(1, len(f) + 1) for j in range(1, self.M + 1)}

    def frequencies(self):
        """Assignment of every frequency variable ``z[l,j]``."""
        from .polyring import Z
        fm = freq_matrix(self)
        return {Z(l, j): fm[l - 1][j - 1] for l in range(1, self.k + 1) for j in range(1, self.M + 1)}

    def permuted(self, domain_perms: Sequence[Sequence[int]] | None = None,
                 range_perm: Sequence[int] | None = None) -> "FunctionTuple":
        """``sigma . f_l . pi_l`` with permutations given as 0-based index tuples."""
        vals = []
        for l, f in enumerate(self.values):
            pi = domain_perms[l] if domain_perms else range(len(f))
            g = [f[p] for p in pi]
            if range_perm is not None:
                g = [range_perm[v - 1] + 1 for v in g]
            vals.append(tuple(g))
        return FunctionTuple(tuple(vals), self.M)


class ParseError(ValueError):
    def __init__(self, msg: str, text: str, pos: int):
        super().__init__(f"{msg} at column {pos + 1}: {text!r}")
        self.pos = pos


_PART = re.compile(r"\s*(?:f(\d+)\s*=\s*([0-9,\s]*?)|M\s*=\s*(\d+))\s*(?:;|$)")


def parse_tuple(text: str) -> FunctionTuple:
    """Parse ``"f1=1,1,2; f2=2,1; M=3"``."""
    funcs: Dict[int, Tuple[int, ...]] = {}
    M = None
    pos = 0
    while pos < len(text):
        if not text[pos:].strip():
            break
        m = _PART.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError("expected 'f<l>=v,...' or 'M=<int>'", text, pos + len(text[pos:]) - len(text[pos:].lstrip()))
        if m.group(3):
            if M is not None:
                raise ParseError("M given twice", text, m.start(3))
            M = int(m.group(3))
        else:
            l = int(m.group(1))
            if l in funcs:
                raise ParseError(f"f{l} given twice", text, m.start(1) - 1)
            body = m.group(2).strip()
            try:
                funcs[l] = tuple(int(v) for v in body.split(",")) if body else ()
            except ValueError:
                raise ParseError("bad value list", text, m.start(2)) from None
        pos = m.end()
    if M is None:
        raise ParseError("missing M", text, len(text))
    if sorted(funcs) != list(range(1, len(funcs) + 1)):
        raise ParseError("functions must be numbered f1, f2, ... without gaps", text, 0)
    try:
        return FunctionTuple(tuple(funcs[l] for l in sorted(funcs)), M)
    except ValueError as e:
        raise ParseError(str(e), text, 0) from None


# -- frequency statistics and orbits ----------------------------------------

def freq_matrix(t: FunctionTuple) -> Tuple[Tuple[int, ...], ...]:
    """Row ``l`` holds the preimage counts of ``f_l`` over ``1..M``."""
    rows = []
    for f in t.values:
        c = Counter(f)
        rows.append(tuple(c.get(j, 0) for j in range(1, t.M + 1)))
    return tuple(rows)


def orbit_canonical(t: FunctionTuple) -> CanonicalKey:
    """Columns of the frequency matrix, sorted descending.

    A complete invariant for independent domain permutations together with a
    common range permutation.
    """
    fm = freq_matrix(t)
    cols = [tuple(fm[l][j] for l in range(t.k)) for j in range(t.M)]
    return tuple(sorted(cols, reverse=True))


def key_orbit_size(key: CanonicalKey, domains: Sequence[int]) -> int:
    """Number of tuples whose canonical key is ``key``."""
    arrangements = math.factorial(len(key)) // math.prod(
        math.factorial(c) for c in Counter(key).values())
    fillings = 1
    for l, F in enumerate(domains):
        col = [c[l] for c in key]
        fillings *= math.factorial(F) // math.prod(math.factorial(c) for c in col)
    return arrangements * fillings


def representative(key: CanonicalKey, M: int) -> FunctionTuple:
    k = len(key[0]) if key else 0
    vals = []
    for l in range(k):
        f: List[int] = []
        for j, col in enumerate(key, start=1):
            f.extend([j] * col[l])
        vals.append(tuple(f))
    return FunctionTuple(tuple(vals), M)


def _compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


# -- property catalog --------------------------------------------------------

KINDS = ("claw", "kclaw", "collision", "or_on_second", "custom")


@dataclass(frozen=True)
class PropertySpec:
    """A Boolean property together with its input sizes and promise.

    ``kind`` is one of ``claw``, ``kclaw``, ``collision`` (one-to-one versus
    two-to-one, value 1 on two-to-one), ``or_on_second`` (the last function
    hits ``target``) or ``custom``.  A custom property is either a lookup
    ``table`` from canonical key to bit, which makes it symmetric by
    construction, or an arbitrary ``predicate``.
    """

    kind: str
    domains: Tuple[int, ...]
    M: int
    promise: Optional[Callable[[FunctionTuple], bool]] = field(default=None, compare=False)
    image_bound: Optional[int] = None
    target: int = 1
    table: Optional[Mapping[CanonicalKey, int]] = field(default=None, compare=False)
    predicate: Optional[Callable[[FunctionTuple], int]] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "domains", tuple(self.domains))
        if self.kind not in KINDS:
            raise ValueError(f"unknown property kind {self.kind!r}")
        if self.M < 1 or any(F < 0 for F in self.domains):
            raise ValueError("sizes must be positive")
        if self.kind == "claw" and len(self.domains) != 2:
            raise ValueError("claw takes exactly two functions")
        if self.kind == "kclaw" and len(self.domains) < 2:
            raise ValueError("k-claw needs at least two functions")
        if self.kind == "collision" and len(self.domains) != 1:
            raise ValueError("collision takes a single function")
        if self.kind == "custom" and (self.table is None) == (self.predicate is None):
            raise ValueError("custom property needs exactly one of table or predicate")

    @property
    def k(self) -> int:
        return len(self.domains)

    def with_range(self, M: int) -> "PropertySpec":
        return PropertySpec(self.kind, self.domains, M, self.promise, self.image_bound,
                            self.target, self.table, self.predicate)

    def label(self) -> str:
        return f"{self.kind}({','.join(map(str, self.domains))})->{self.M}"

    # promise ---------------------------------------------------------------
    def in_promise(self, t: FunctionTuple) -> bool:
        if self.kind == "collision":
            counts = set(Counter(t.values[0]).values())
            if not (counts <= {1} or counts == {2}):
                return False
        if self.image_bound is not None and len(t.image()) > self.image_bound:
            return False
        if self.promise is not None and not self.promise(t):
            return False
        return True

    def has_promise(self) -> bool:
        return self.kind == "collision" or self.image_bound is not None or self.promise is not None


def claw(F: int, G: int, M: int, **kw) -> PropertySpec:
    return PropertySpec("claw", (F, G), M, **kw)


def kclaw(domains: Sequence[int], M: int, **kw) -> PropertySpec:
    return PropertySpec("kclaw", tuple(domains), M, **kw)


def collision(M: int, F: int | None = None, **kw) -> PropertySpec:
    return PropertySpec("collision", (M if F is None else F,), M, **kw)


def or_on_second(domains: Sequence[int], M: int, target: int = 1, **kw) -> PropertySpec:
    return PropertySpec("or_on_second", tuple(domains), M, target=target, **kw)


def _raw_value(spec: PropertySpec, t: FunctionTuple) -> int:
    if spec.kind == "claw":
        return int(bool(set(t.values[0]) & set(t.values[1])))
    if spec.kind == "kclaw":
        common = set(t.values[0])
        for f in t.values[1:]:
            common &= set(f)
        return int(bool(common))
    if spec.kind == "collision":
        return int(set(Counter(t.values[0]).values()) == {2})
    if spec.kind == "or_on_second":
        return int(spec.target in t.values[-1])
    if spec.table is not None:
        return int(spec.table[orbit_canonical(t)])
    return int(spec.predicate(t))


def eval_property(spec: PropertySpec, t: FunctionTuple) -> int:
    if t.domains != spec.domains or t.M != spec.M:
        raise ValueError(f"{t.to_text()} does not match sizes of {spec.label()}")
    if not spec.in_promise(t):
        raise PromiseViolation(t)
    return _raw_value(spec, t)


def domain_size(spec: PropertySpec) -> int:
    """Size of the unrestricted product ``prod_l M ** F_l``."""
    return math.prod(spec.M ** F for F in spec.domains)


def enumerate_domain(spec: PropertySpec, budget: int = DEFAULT_BUDGET) -> Iterator[FunctionTuple]:
    """Every promise-satisfying tuple once, in lexicographic order."""
    total = domain_size(spec)
    if total > budget:
        raise BudgetExceeded(total, budget)
    if spec.kind == "collision" and spec.domains[0] % 2:
        raise ValueError("collision promise needs an even domain size for the two-to-one half")
    ranges = [range(1, spec.M + 1)] * sum(spec.domains)
    cuts = list(itertools.accumulate(spec.domains))
    for flat in itertools.product(*ranges):
        vals = tuple(flat[a:b] for a, b in zip([0] + cuts[:-1], cuts))
        t = FunctionTuple(vals, spec.M)
        if spec.in_promise(t):
            yield t


@dataclass(frozen=True)
class Orbit:
    key: CanonicalKey
    representative: FunctionTuple
    size: int


def enumerate_orbits(spec: PropertySpec, budget: int = DEFAULT_BUDGET) -> List[Orbit]:
    """One entry per canonical key inside the promise domain.

    Keys are generated directly from preimage-count vectors, so the cost is
    the number of frequency matrices rather than the number of tuples.  The
    promise is tested on one representative; that is sound only when the
    promise domain is closed under the symmetry group.
    """
    if spec.kind == "collision" and spec.domains[0] % 2:
        raise ValueError("collision promise needs an even domain size for the two-to-one half")
    count = math.prod(math.comb(F + spec.M - 1, spec.M - 1) for F in spec.domains)
    if count > budget:
        raise BudgetExceeded(count, budget, "frequency-matrix space")
    seen = set()
    out = []
    for rows in itertools.product(*(list(_compositions(F, spec.M)) for F in spec.domains)):
        cols = tuple(sorted((tuple(r[j] for r in rows) for j in range(spec.M)), reverse=True))
        if cols in seen:
            continue
        seen.add(cols)
        rep = representative(cols, spec.M)
        if spec.in_promise(rep):
            out.append(Orbit(cols, rep, key_orbit_size(cols, spec.domains)))
    out.sort(key=lambda o: o.key, reverse=True)
    return out


def enumerate_freq_classes(spec: PropertySpec, budget: int = DEFAULT_BUDGET) -> List[Tuple[FunctionTuple, int]]:
    """One tuple per distinct frequency matrix (domain permutations only), with class size."""
    count = math.prod(math.comb(F + spec.M - 1, spec.M - 1) for F in spec.domains)
    if count > budget:
        raise BudgetExceeded(count, budget, "frequency-matrix space")
    out = []
    for rows in itertools.product(*(list(_compositions(F, spec.M)) for F in spec.domains)):
        vals = tuple(tuple(j for j, c in enumerate(r, start=1) for _ in range(c)) for r in rows)
        t = FunctionTuple(vals, spec.M)
        if spec.in_promise(t):
            size = math.prod(math.factorial(sum(r)) // math.prod(math.factorial(c) for c in r) for r in rows)
            out.append((t, size))
    return out


def _generators(n: int) -> List[Tuple[int, ...]]:
    if n < 2:
        return []
    swap = (1, 0) + tuple(range(2, n))
    cycle = tuple(range(1, n)) + (0,)
    return [swap] if n == 2 else [swap, cycle]


def check_symmetry(spec: PropertySpec, range_symmetry: bool = True,
                   budget: int = DEFAULT_BUDGET) -> bool:
    """True iff the property and its promise domain are invariant under the group.

    The group is generated by a transposition and a full cycle on each domain,
    plus the same on the range when ``range_symmetry`` is set.  Invariance
    under generators gives invariance under the whole group.
    """
    total = domain_size(spec)
    if total > budget:
        raise BudgetExceeded(total, budget)
    moves = []
    for l, F in enumerate(spec.domains):
        for g in _generators(F):
            perms = [tuple(range(n)) for n in spec.domains]
            perms[l] = g
            moves.append((perms, None))
    if range_symmetry:
        moves += [(None, g) for g in _generators(spec.M)]
    ranges = [range(1, spec.M + 1)] * sum(spec.domains)
    cuts = list(itertools.accumulate(spec.domains))
    for flat in itertools.product(*ranges):
        t = FunctionTuple(tuple(flat[a:b] for a, b in zip([0] + cuts[:-1], cuts)), spec.M)
        inside = spec.in_promise(t)
        value = _raw_value(spec, t) if inside else None
        for perms, sigma in moves:
            u = t.permuted(perms, sigma)
            if spec.in_promise(u) != inside:
                return False
            if inside and _raw_value(spec, u) != value:
                return False
    return True
