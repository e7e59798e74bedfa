"""Valued relations over finite (possibly multi-sorted) domains.

A relation of arity ``r`` is stored as a dense integer table of shape
``(|D_1|, ..., |D_r|)``.  Tuples are addressed in lexicographic order, which
coincides with numpy's C order, so the mixed-radix index of a tuple is its
position in ``product_array(domains)``.

Everything tuple-level lives here: AND restrictions, extreme tuples,
irrelevant pairs, decomposability and the min/max sandwich.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

MAX_ARITY = 8
MAX_DOMAIN = 6

Tuple = tuple[int, ...]


class RelationError(ValueError):
    """Raised for malformed relations or violated operation preconditions."""


class EmptySupportError(RelationError):
    """The relation has no nonzero entry."""


class NotExtremeError(RelationError):
    """The reference tuple is not at distance c(R) from the support."""


class ParseError(RelationError):
    """A text file could not be parsed; ``line`` is 1-based."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@lru_cache(maxsize=None)
def product_array(domains: tuple[int, ...]) -> np.ndarray:
    """All tuples of ``D_1 x ... x D_r`` in lexicographic order, shape (N, r)."""
    grids = np.indices(domains).reshape(len(domains), -1).T
    out = np.ascontiguousarray(grids, dtype=np.int64)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def strides(domains: tuple[int, ...]) -> np.ndarray:
    """Mixed-radix place values; ``tuple @ strides`` is the lex index."""
    s = np.ones(len(domains), dtype=np.int64)
    for i in range(len(domains) - 2, -1, -1):
        s[i] = s[i + 1] * domains[i + 1]
    s.setflags(write=False)
    return s


@dataclass(frozen=True, eq=False)
class ValuedRelation:
    """A map ``R : D_1 x ... x D_r -> Z_{>=0}``.

    Ordinary relations are the 0/1-valued case.  The table is copied and
    frozen on construction.
    """

    domains: tuple[int, ...]
    table: np.ndarray = field(repr=False)

    def __post_init__(self):
        domains = tuple(int(d) for d in self.domains)
        if not 1 <= len(domains) <= MAX_ARITY:
            raise RelationError(f"arity must be in 1..{MAX_ARITY}, got {len(domains)}")
        if any(not 1 <= d <= MAX_DOMAIN for d in domains):
            raise RelationError(f"domain sizes must be in 1..{MAX_DOMAIN}, got {domains}")
        table = np.array(self.table, dtype=np.int64).reshape(domains)
        if (table < 0).any():
            raise RelationError("relation values must be non-negative")
        table.setflags(write=False)
        object.__setattr__(self, "domains", domains)
        object.__setattr__(self, "table", table)

    # construction helpers

    @classmethod
    def from_support(cls, domains: Sequence[int], tuples: Iterable[Sequence[int]],
                     value: int = 1) -> "ValuedRelation":
        table = np.zeros(tuple(domains), dtype=np.int64)
        for t in tuples:
            table[tuple(t)] = value
        return cls(tuple(domains), table)

    @classmethod
    def from_mapping(cls, domains: Sequence[int],
                     values: Mapping[Sequence[int], int]) -> "ValuedRelation":
        table = np.zeros(tuple(domains), dtype=np.int64)
        for t, v in values.items():
            table[tuple(t)] = v
        return cls(tuple(domains), table)

    @classmethod
    def from_strings(cls, q: int, words: Iterable[str], values: Iterable[int] | None = None
                     ) -> "ValuedRelation":
        """Single-domain shorthand: ``from_strings(2, ["000", "001"])``."""
        words = list(words)
        if not words:
            raise RelationError("need at least one word to fix the arity")
        r = len(words[0])
        vals = [1] * len(words) if values is None else list(values)
        return cls.from_mapping((q,) * r, {tuple(int(ch) for ch in w): v
                                           for w, v in zip(words, vals)})

    # basic views

    @property
    def r(self) -> int:
        return len(self.domains)

    @property
    def W(self) -> int:
        return int(self.table.max())

    @property
    def flat(self) -> np.ndarray:
        return self.table.reshape(-1)

    @property
    def single_domain(self) -> bool:
        return len(set(self.domains)) == 1

    @property
    def q(self) -> int:
        """Shared domain size; only meaningful when ``single_domain``."""
        if not self.single_domain:
            raise RelationError("relation is multi-sorted")
        return self.domains[0]

    @property
    def is_boolean(self) -> bool:
        return all(d == 2 for d in self.domains)

    @property
    def is_zero_one(self) -> bool:
        return bool(((self.table == 0) | (self.table == 1)).all())

    @property
    def is_full(self) -> bool:
        """Every tuple carries the same nonzero value."""
        v = self.flat
        return bool(v[0] > 0 and (v == v[0]).all())

    def tuples(self) -> np.ndarray:
        return product_array(self.domains)

    def index(self, t: Sequence[int]) -> int:
        return int(np.asarray(t, dtype=np.int64) @ strides(self.domains))

    def value(self, t: Sequence[int]) -> int:
        return int(self.table[tuple(t)])

    def __call__(self, t: Sequence[int]) -> int:
        return self.value(t)

    def support_array(self) -> np.ndarray:
        return self.tuples()[self.flat > 0]

    def support(self) -> list[Tuple]:
        return [tuple(int(x) for x in row) for row in self.support_array()]

    def require_support(self) -> None:
        if not (self.flat > 0).any():
            raise EmptySupportError("relation has empty support")

    def __eq__(self, other) -> bool:
        if not isinstance(other, ValuedRelation):
            return NotImplemented
        return self.domains == other.domains and np.array_equal(self.table, other.table)

    def __hash__(self) -> int:
        return hash((self.domains, self.table.tobytes()))

    def __repr__(self) -> str:
        supp = self.support()
        if len(supp) > 8:
            body = f"{len(supp)} support tuples"
        elif self.is_zero_one:
            body = "{" + ", ".join("".join(map(str, t)) for t in supp) + "}"
        else:
            body = ", ".join(f"{''.join(map(str, t))}:{self.value(t)}" for t in supp)
        return f"ValuedRelation(domains={self.domains}, {body})"

    def permuted(self, perms: Sequence[Sequence[int]]) -> "ValuedRelation":
        """Relabel symbols: the new relation satisfies ``new(s) = self(perm(s))``."""
        idx = tuple(np.asarray(p, dtype=np.int64) for p in perms)
        return ValuedRelation(self.domains, self.table[np.ix_(*idx)])

    def transposed(self, order: Sequence[int]) -> "ValuedRelation":
        """Permute coordinates: ``new(s)_i`` reads coordinate ``order[i]``."""
        return ValuedRelation(tuple(self.domains[i] for i in order),
                              np.transpose(self.table, order))


# -- text format ------------------------------------------------------------

def format_relation(R: ValuedRelation) -> str:
    lines = [f"r={R.r} domains={','.join(map(str, R.domains))}"]
    bare = R.is_zero_one
    for t in R.support():
        word = " ".join(map(str, t))
        lines.append(word if bare else f"{word} {R.value(t)}")
    return "\n".join(lines) + "\n"


def parse_relation(text: str) -> ValuedRelation:
    header = None
    entries: dict[Tuple, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            header = _parse_relation_header(line, lineno)
            continue
        r, domains = header
        parts = line.split()
        if len(parts) not in (r, r + 1):
            raise ParseError(lineno, f"expected {r} symbols and an optional value")
        try:
            nums = [int(p) for p in parts]
        except ValueError:
            raise ParseError(lineno, "non-integer token") from None
        t = tuple(nums[:r])
        if any(not 0 <= x < d for x, d in zip(t, domains)):
            raise ParseError(lineno, f"symbol out of range for domains {domains}")
        value = nums[r] if len(nums) > r else 1
        if value < 0:
            raise ParseError(lineno, "negative value")
        if t in entries:
            raise ParseError(lineno, f"duplicate tuple {t}")
        entries[t] = value
    if header is None:
        raise ParseError(1, "missing header 'r=<int> domains=<d1,...,dr>'")
    return ValuedRelation.from_mapping(header[1], entries)


def _parse_relation_header(line: str, lineno: int) -> tuple[int, tuple[int, ...]]:
    fields = dict(tok.split("=", 1) for tok in line.split() if "=" in tok)
    if set(fields) != {"r", "domains"} or len(line.split()) != 2:
        raise ParseError(lineno, "header must be 'r=<int> domains=<d1,...,dr>'")
    try:
        r = int(fields["r"])
        domains = tuple(int(x) for x in fields["domains"].split(","))
    except ValueError:
        raise ParseError(lineno, "non-integer in header") from None
    if len(domains) != r:
        raise ParseError(lineno, f"r={r} but {len(domains)} domain sizes given")
    if not 1 <= r <= MAX_ARITY or any(not 1 <= d <= MAX_DOMAIN for d in domains):
        raise ParseError(lineno, f"arity/domain sizes outside 1..{MAX_ARITY} / 1..{MAX_DOMAIN}")
    return r, domains


# -- AND restrictions -------------------------------------------------------

@dataclass(frozen=True)
class RestrictionWitness:
    """Sets ``E_1..E_r`` (sorted tuples) with distinguished coordinates.

    For a plain AND witness ``survivor`` is the unique support tuple in the
    box.  For a generalized AND, ``marked[j]`` is the symbol ``e_i`` of the
    j-th distinguished coordinate and ``values`` lists the distinct nonzero
    outputs on the box.
    """

    sets: tuple[tuple[int, ...], ...]
    distinguished: tuple[int, ...]
    survivor: Tuple | None = None
    marked: Tuple | None = None
    values: tuple[int, ...] = ()
    uniform: bool | None = None

    @property
    def k(self) -> int:
        return len(self.distinguished)


def max_and_arity(R: ValuedRelation) -> tuple[int, RestrictionWitness]:
    """Largest k such that R restricts to AND_k, with the first witness found.

    Survivors are scanned in lex order; at each coordinate a pair (with the
    smaller partner symbol first) is tried before the singleton.
    """
    R.require_support()
    supp = R.support_array()
    r = R.r
    best_k = -1
    best: RestrictionWitness | None = None

    for a in supp:
        others = supp[(supp != a).any(axis=1)]
        a_t = tuple(int(x) for x in a)
        found = _and_dfs(R.domains, a_t, others, best_k)
        if found is not None and found[0] > best_k:
            best_k, sets = found
            pairs = tuple(i for i, E in enumerate(sets) if len(E) == 2)
            best = RestrictionWitness(sets=sets, distinguished=pairs, survivor=a_t)
            if best_k == r:
                break
    assert best is not None
    return best_k, best


def _and_dfs(domains, a, others, floor_k):
    r = len(domains)
    result = None
    bar = floor_k

    def rec(i, alive, sets, k):
        nonlocal result, bar
        if k + (r - i) <= bar:
            return
        if not alive.any():
            # nothing left to exclude: pair up every remaining coordinate
            tail = []
            for j in range(i, r):
                b = next((x for x in range(domains[j]) if x != a[j]), None)
                tail.append((a[j],) if b is None else tuple(sorted((a[j], b))))
            kk = k + sum(len(E) == 2 for E in tail)
            if kk > bar:
                bar, result = kk, (kk, sets + tuple(tail))
            return
        if i == r:
            return
        col = others[:, i]
        for b in range(domains[i]):
            if b != a[i]:
                rec(i + 1, alive & ((col == a[i]) | (col == b)),
                    sets + (tuple(sorted((a[i], b))),), k + 1)
        rec(i + 1, alive & (col == a[i]), sets + ((a[i],),), k)

    rec(0, np.ones(len(others), dtype=bool), (), 0)
    return result


def boolean_uniform_exponent(R: ValuedRelation) -> int:
    """``max(wt(a_min), r - wt(a_max))`` over the support of a Boolean relation."""
    if not R.is_boolean:
        raise RelationError("boolean_uniform_exponent needs a Boolean domain")
    R.require_support()
    weights = R.support_array().sum(axis=1)
    return int(max(weights.min(), R.r - weights.max()))


def hamming_to_support(t: Sequence[int], R: ValuedRelation) -> np.ndarray:
    supp = R.support_array()
    return (supp != np.asarray(t, dtype=np.int64)).sum(axis=1)


def distance_and_extremality(t: Sequence[int], R: ValuedRelation,
                             c: int | None = None) -> tuple[int, bool]:
    """Hamming distance from ``t`` to the support and whether it equals c(R)."""
    R.require_support()
    _check_tuple(t, R)
    if c is None:
        c = max_and_arity(R)[0]
    dist = int(hamming_to_support(t, R).min())
    # a nearest support tuple spans an AND_dist box, so dist can never exceed c
    assert dist <= c, (dist, c)
    return dist, dist == c


def _check_tuple(t, R):
    if len(t) != R.r or any(not 0 <= int(x) < d for x, d in zip(t, R.domains)):
        raise RelationError(f"tuple {tuple(t)} not in the product domain {R.domains}")


# -- irrelevance ------------------------------------------------------------

@dataclass(frozen=True)
class IrrelevanceStructure:
    """Minimum-distance support tuples from ``t`` and the irrelevant pairs.

    ``irrelevant`` holds pairs ``(i, d)``; it always contains ``(i, t_i)``.
    ``perms[i]`` is the symbol relabeling at coordinate i that sends ``t`` to
    ``0^r`` (it is an involution).
    """

    t: Tuple
    c: int
    family: tuple[Tuple, ...]
    irrelevant: frozenset[tuple[int, int]]
    domains: tuple[int, ...]
    perms: tuple[tuple[int, ...], ...]

    @property
    def covered(self) -> tuple[int, ...]:
        return tuple(sorted({i for s in self.family for i in range(len(s)) if s[i] != self.t[i]}))

    @property
    def irrelevant_coordinates(self) -> tuple[int, ...]:
        return tuple(i for i, q in enumerate(self.domains)
                     if all((i, d) in self.irrelevant for d in range(q)))

    def is_irrelevant(self, i: int, d: int) -> bool:
        return (i, d) in self.irrelevant

    def canonical(self, s: Sequence[int]) -> Tuple:
        """Representative of the ~_I class of ``s``: irrelevant symbols become ``t_i``."""
        return tuple(self.t[i] if (i, x) in self.irrelevant else x for i, x in enumerate(s))

    def class_index(self) -> np.ndarray:
        """Lex index of the canonical representative, for every tuple."""
        tuples = product_array(self.domains)
        mask = np.zeros((len(self.domains), max(self.domains)), dtype=bool)
        for i, d in self.irrelevant:
            mask[i, d] = True
        cols = np.arange(len(self.domains))
        irr = mask[cols, tuples]
        canon = np.where(irr, np.asarray(self.t, dtype=np.int64), tuples)
        return canon @ strides(self.domains)


def _zero_perms(t: Sequence[int], domains: Sequence[int]) -> tuple[tuple[int, ...], ...]:
    perms = []
    for ti, q in zip(t, domains):
        p = list(range(q))
        p[0], p[ti] = p[ti], p[0]
        perms.append(tuple(p))
    return tuple(perms)


def irrelevance_structure(R: ValuedRelation, t: Sequence[int], c: int | None = None,
                          check: bool = True) -> IrrelevanceStructure:
    """Irrelevant pairs relative to an extreme tuple ``t``.

    The computation relabels symbols so that ``t`` becomes ``0^r`` and maps
    the result back.  With ``check`` the closure property is asserted.
    """
    t = tuple(int(x) for x in t)
    dist, extreme = distance_and_extremality(t, R, c)
    if not extreme:
        raise NotExtremeError(f"{t} is at distance {dist}, not c(R)")
    perms = _zero_perms(t, R.domains)
    R0 = R.permuted(perms)
    supp = R0.support_array()
    near = supp[(supp != 0).sum(axis=1) == dist]
    used = {(i, int(s[i])) for s in near for i in range(R.r) if s[i] != 0}
    irrelevant = set()
    for i, q in enumerate(R.domains):
        for d in range(q):
            if d == 0 or (i, d) not in used:
                irrelevant.add((i, perms[i][d]))
    family = sorted(tuple(perms[i][int(x)] for i, x in enumerate(s)) for s in near)
    structure = IrrelevanceStructure(t=t, c=dist, family=tuple(family),
                                     irrelevant=frozenset(irrelevant),
                                     domains=R.domains, perms=perms)
    if check:
        bad = closure_violations(R, structure, limit=1)
        assert not bad, f"irrelevance closure fails at {bad[0]}"
    return structure


def closure_violations(R: ValuedRelation, structure: IrrelevanceStructure,
                       limit: int | None = None) -> list[Tuple]:
    """Tuples that the closure property says are in the support but are not.

    For each ``s`` in the family, every tuple agreeing with ``s`` where
    ``s`` differs from ``t`` and otherwise using ``t_i`` or an irrelevant
    symbol must be a support tuple.
    """
    bad: list[Tuple] = []
    t = structure.t
    for s in structure.family:
        choices = []
        for i, q in enumerate(R.domains):
            if s[i] != t[i]:
                choices.append((s[i],))
            else:
                choices.append(tuple(d for d in range(q) if (i, d) in structure.irrelevant))
        for u in itertools.product(*choices):
            if R.value(u) == 0:
                bad.append(u)
                if limit is not None and len(bad) >= limit:
                    return bad
    return bad


def extreme_tuples(R: ValuedRelation, c: int | None = None) -> list[Tuple]:
    R.require_support()
    if c is None:
        c = max_and_arity(R)[0]
    tuples = R.tuples()
    supp = R.support_array()
    dist = (tuples[:, None, :] != supp[None, :, :]).sum(axis=2).min(axis=1)
    return [tuple(int(x) for x in row) for row in tuples[dist == c]]


def is_decomposable(R: ValuedRelation, t: Sequence[int],
                    structure: IrrelevanceStructure | None = None) -> bool:
    """Values are constant on every ~_I class."""
    if structure is None:
        structure = irrelevance_structure(R, t)
    return is_invariant(R.flat, structure.class_index())


def is_invariant(values: np.ndarray, classes: np.ndarray) -> bool:
    return bool((values == values[classes]).all())


def sandwich_decomposable(R: ValuedRelation, t: Sequence[int],
                          structure: IrrelevanceStructure | None = None
                          ) -> tuple[ValuedRelation, ValuedRelation]:
    """Pointwise min and max of R over each ~_I class."""
    if structure is None:
        structure = irrelevance_structure(R, t)
    lo, hi = class_min_max(R.flat, structure.class_index())
    return ValuedRelation(R.domains, lo), ValuedRelation(R.domains, hi)


def class_min_max(values: np.ndarray, classes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    big = np.iinfo(np.int64).max
    lo = np.full(len(values), big, dtype=np.int64)
    hi = np.zeros(len(values), dtype=np.int64)
    np.minimum.at(lo, classes, values)
    np.maximum.at(hi, classes, values)
    return lo[classes], hi[classes]


# -- generalized ANDs -------------------------------------------------------

def _subsets_upto_two(q: int) -> list[tuple[int, ...]]:
    return [(d,) for d in range(q)] + list(itertools.combinations(range(q), 2))


def iter_generalized_ands(R: ValuedRelation, k: int) -> Iterator[RestrictionWitness]:
    """All generalized AND_k restrictions with ``1 <= |E_i| <= 2``.

    For a distinguished coordinate the pair is ordered ``(d_i, e_i)``; a box
    tuple must be nonzero exactly when it uses ``e_i`` on every distinguished
    coordinate.
    """
    r = R.r
    table = R.table
    for S in itertools.combinations(range(r), k):
        options = []
        for i in range(r):
            q = R.domains[i]
            if i in S:
                options.append([(d, e) for d in range(q) for e in range(q) if d != e])
            else:
                options.append(_subsets_upto_two(q))
        for choice in itertools.product(*options):
            box = table[np.ix_(*[np.asarray(E) for E in choice])]
            # in a distinguished coordinate index 1 is e_i
            want = np.ones(box.shape, dtype=bool)
            for i in S:
                shape = [1] * r
                shape[i] = 2
                want &= (np.arange(2) == 1).reshape(shape)
            if not np.array_equal(box > 0, want):
                continue
            vals = tuple(sorted({int(v) for v in box[want]}))
            sets = tuple(tuple(sorted(E)) for E in choice)
            marked = tuple(choice[i][1] for i in S)
            yield RestrictionWitness(sets=sets, distinguished=S, marked=marked,
                                     values=vals, uniform=len(vals) == 1)


def generalized_ands(R: ValuedRelation, k: int) -> list[RestrictionWitness]:
    R.require_support()
    return list(iter_generalized_ands(R, k))


def first_nonuniform_and(R: ValuedRelation, k: int) -> RestrictionWitness | None:
    for w in iter_generalized_ands(R, k):
        if not w.uniform:
            return w
    return None


def hat_c(R: ValuedRelation) -> int:
    """c(R) if every generalized AND_c is uniform, else c(R) + 1."""
    c, _ = max_and_arity(R)
    return c if first_nonuniform_and(R, c) is None else c + 1
