"""CSP instances: construction, random generation, evaluation, file format.

Three clause universes are supported:

``uniform``   ordered r-tuples of distinct variables from ``[n]``;
``rpartite``  one variable from each of r parts of size n; the variable
              ``j`` of part ``i`` has global index ``i * n + j``;
``symset``    unordered r-subsets of ``[n]`` (stored sorted), evaluated
              through the symmetrized relation.

Weights are exact rationals stored as integer numerators over one shared
denominator.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .histogram_core import SymmetricValuedRelation, symmetrize
from .relation_core import ParseError, RelationError, ValuedRelation

KINDS = ("uniform", "rpartite", "symset")
_INT64_SAFE = 2 ** 62


@dataclass(frozen=True, eq=False)
class Instance:
    kind: str
    n: int
    r: int
    clauses: np.ndarray = field(repr=False)
    weight_num: np.ndarray = field(repr=False)
    weight_den: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown instance kind {self.kind!r}")
        clauses = np.array(self.clauses, dtype=np.int64).reshape(-1, self.r)
        num = np.array(self.weight_num, dtype=object if _needs_object(self.weight_num) else np.int64)
        num = num.reshape(-1)
        if len(num) != len(clauses):
            raise ValueError("one weight per clause required")
        if len(num) and min(num) <= 0:
            raise ValueError("clause weights must be positive")
        if self.weight_den <= 0:
            raise ValueError("weight denominator must be positive")
        if len(clauses) and (clauses.min() < 0 or clauses.max() >= self.n):
            raise ValueError("variable index out of range")
        if self.kind == "uniform" and self.r > 1 and len(clauses):
            s = np.sort(clauses, axis=1)
            if (s[:, 1:] == s[:, :-1]).any():
                raise ValueError("uniform clauses need distinct variables")
        if self.kind == "symset" and len(clauses):
            if (clauses[:, 1:] <= clauses[:, :-1]).any():
                raise ValueError("symset clauses must be strictly increasing")
        clauses.setflags(write=False)
        num.setflags(write=False)
        object.__setattr__(self, "clauses", clauses)
        object.__setattr__(self, "weight_num", num)
        object.__setattr__(self, "weight_den", int(self.weight_den))

    @classmethod
    def from_weights(cls, kind: str, n: int, r: int, clauses, weights: Iterable) -> "Instance":
        fr = [Fraction(w) for w in weights]
        den = math.lcm(*(f.denominator for f in fr)) if fr else 1
        num = [f.numerator * (den // f.denominator) for f in fr]
        return cls(kind, n, r, np.asarray(clauses, dtype=np.int64).reshape(-1, r), num, den)

    @property
    def m(self) -> int:
        return len(self.clauses)

    @property
    def num_variables(self) -> int:
        return self.n * self.r if self.kind == "rpartite" else self.n

    @property
    def weights(self) -> list[Fraction]:
        return [Fraction(int(w), self.weight_den) for w in self.weight_num]

    @property
    def total_weight(self) -> Fraction:
        return Fraction(int(sum(int(w) for w in self.weight_num)), self.weight_den)

    def global_variables(self) -> np.ndarray:
        """Clause entries as indices into the assignment vector."""
        if self.kind == "rpartite":
            return self.clauses + np.arange(self.r, dtype=np.int64) * self.n
        return self.clauses

    def merged(self) -> "Instance":
        """Combine repeated clauses by adding their weights (order of first use kept)."""
        if self.m == 0:
            return self
        uniq, first, inverse = np.unique(self.clauses, axis=0, return_index=True,
                                         return_inverse=True)
        inverse = inverse.reshape(-1)
        sums = [0] * len(uniq)
        for j, w in zip(inverse, self.weight_num):
            sums[j] += int(w)
        order = np.argsort(first, kind="stable")
        return Instance(self.kind, self.n, self.r, uniq[order], [sums[j] for j in order],
                        self.weight_den)

    def scaled(self, factor) -> "Instance":
        factor = Fraction(factor)
        num = [int(w) * factor.numerator for w in self.weight_num]
        g = math.gcd(*num, self.weight_den * factor.denominator) if num else 1
        return Instance(self.kind, self.n, self.r, self.clauses, [w // g for w in num],
                        self.weight_den * factor.denominator // g)

    @property
    def distinct_clauses(self) -> int:
        return len(np.unique(self.clauses, axis=0)) if self.m else 0


def _needs_object(values) -> bool:
    try:
        return any(abs(int(v)) >= _INT64_SAFE for v in values)
    except TypeError:
        return False


def universe_size(kind: str, n: int, r: int) -> int:
    if kind == "uniform":
        return math.perm(n, r)
    if kind == "rpartite":
        return n ** r
    if kind == "symset":
        return math.comb(n, r)
    raise ValueError(f"unknown instance kind {kind!r}")


def complete(kind: str, n: int, r: int) -> Instance:
    """The complete instance of the given kind with unit weights."""
    if n < r:
        raise ValueError(f"need n >= r, got n={n}, r={r}")
    if kind == "uniform":
        it = itertools.permutations(range(n), r)
    elif kind == "rpartite":
        it = itertools.product(range(n), repeat=r)
    elif kind == "symset":
        it = itertools.combinations(range(n), r)
    else:
        raise ValueError(f"unknown instance kind {kind!r}")
    clauses = np.array(list(it), dtype=np.int64).reshape(-1, r)
    return Instance(kind, n, r, clauses, np.ones(len(clauses), dtype=np.int64), 1)


def is_complete(C: Instance) -> bool:
    if C.m != universe_size(C.kind, C.n, C.r):
        return False
    if len(set(int(w) for w in C.weight_num)) != 1:
        return False
    return C.distinct_clauses == C.m


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator so streams are reproducible across platforms."""
    return np.random.Generator(np.random.Philox(seed))


def decode_clauses(kind: str, n: int, r: int, index: np.ndarray) -> np.ndarray:
    """Map universe indices to clauses by mixed-radix decoding.

    For ``uniform`` the digits have radices n, n-1, ..., n-r+1 and digit j
    picks the j-th smallest unused variable, so the map is a bijection onto
    ordered tuples in lex order.
    """
    index = np.asarray(index, dtype=np.int64).reshape(-1)
    if kind == "rpartite":
        digits = np.empty((len(index), r), dtype=np.int64)
        rest = index.copy()
        for j in range(r - 1, -1, -1):
            digits[:, j] = rest % n
            rest //= n
        return digits
    if kind == "uniform":
        radices = [n - j for j in range(r)]
        digits = np.empty((len(index), r), dtype=np.int64)
        rest = index.copy()
        for j in range(r - 1, -1, -1):
            digits[:, j] = rest % radices[j]
            rest //= radices[j]
        out = np.empty_like(digits)
        for j in range(r):
            val = digits[:, j].copy()
            prev = np.sort(out[:, :j], axis=1)
            for col in range(j):
                val += val >= prev[:, col]
            out[:, j] = val
        return out
    if kind == "symset":
        return np.array([_unrank_combination(int(i), n, r) for i in index],
                        dtype=np.int64).reshape(-1, r)
    raise ValueError(f"unknown instance kind {kind!r}")


def _unrank_combination(idx: int, n: int, r: int) -> tuple[int, ...]:
    out = []
    x = 0
    for j in range(r, 0, -1):
        while True:
            block = math.comb(n - x - 1, j - 1)
            if idx < block:
                out.append(x)
                x += 1
                break
            idx -= block
            x += 1
    return tuple(out)


def random_instance(kind: str, n: int, r: int, m: int, seed: int) -> Instance:
    """m clauses drawn uniformly with replacement from the kind's universe."""
    if n < r:
        raise ValueError(f"need n >= r, got n={n}, r={r}")
    if m < 1:
        raise ValueError("m must be positive")
    U = universe_size(kind, n, r)
    if U >= 2 ** 63:
        raise ValueError("clause universe too large for int64 indexing")
    index = make_rng(seed).integers(0, U, size=m)
    return Instance(kind, n, r, decode_clauses(kind, n, r, index),
                    np.ones(m, dtype=np.int64), 1)


# -- evaluation -------------------------------------------------------------

Predicate = ValuedRelation | SymmetricValuedRelation


@dataclass(frozen=True)
class Assignment:
    """Symbols of every variable plus the per-part (or global) symbol counts."""

    values: tuple[int, ...]
    q: int
    parts: int = 1

    @property
    def counts(self) -> tuple[tuple[int, ...], ...]:
        n = len(self.values) // self.parts
        out = []
        for i in range(self.parts):
            block = self.values[i * n:(i + 1) * n]
            out.append(tuple(block.count(d) for d in range(self.q)))
        return tuple(out)


def lookup_table(R: Predicate, C: Instance) -> tuple[np.ndarray, np.ndarray]:
    """Flat value table and strides used to evaluate clauses of C."""
    if C.kind == "symset":
        if isinstance(R, ValuedRelation):
            R = symmetrize(R)
        if R.r != C.r:
            raise RelationError("arity mismatch")
        table = R.as_tuple_table()
        domains = (R.q,) * R.r
    else:
        if not isinstance(R, ValuedRelation):
            raise RelationError(f"{C.kind} instances need a tuple-level relation")
        if R.r != C.r:
            raise RelationError("arity mismatch")
        table = R.flat
        domains = R.domains
    s = np.ones(len(domains), dtype=np.int64)
    for i in range(len(domains) - 2, -1, -1):
        s[i] = s[i + 1] * domains[i + 1]
    return table, s


def variable_domains(R: Predicate, C: Instance) -> list[int]:
    """Domain size of every variable of C."""
    if isinstance(R, SymmetricValuedRelation):
        return [R.q] * C.num_variables
    if C.kind == "rpartite":
        return [R.domains[i] for i in range(C.r) for _ in range(C.n)]
    if not R.single_domain:
        raise RelationError(f"{C.kind} instances need a single shared domain")
    return [R.q] * C.num_variables


def clause_values(R: Predicate, C: Instance, assignments: np.ndarray) -> np.ndarray:
    """Per-clause values for a batch of assignments, shape (B, m)."""
    A = np.asarray(assignments, dtype=np.int64)
    if A.ndim == 1:
        A = A[None, :]
    if A.shape[1] != C.num_variables:
        raise ValueError(f"assignment has {A.shape[1]} variables, instance needs {C.num_variables}")
    table, s = lookup_table(R, C)
    gv = C.global_variables()
    idx = np.zeros((A.shape[0], C.m), dtype=np.int64)
    for j in range(C.r):
        idx += A[:, gv[:, j]] * s[j]
    return table[idx]


def _weighted_sums(values: np.ndarray, C: Instance) -> np.ndarray:
    """Exact ``values @ weight_num`` as int64 when safe, else Python ints."""
    w = C.weight_num
    vmax = int(values.max()) if values.size else 0
    wsum = int(sum(int(x) for x in w)) if w.dtype == object else int(w.sum())
    if w.dtype != object and vmax * wsum < _INT64_SAFE:
        return values @ w
    return values.astype(object) @ w.astype(object)


def sat_numerators(R: Predicate, C: Instance, assignments: np.ndarray) -> np.ndarray:
    """``sat * weight_den`` for each assignment in the batch."""
    return _weighted_sums(clause_values(R, C, assignments), C)


def sat_value(R: Predicate, C: Instance, psi) -> Fraction:
    """Exact weighted value of one assignment."""
    psi = psi.values if isinstance(psi, Assignment) else psi
    return Fraction(int(sat_numerators(R, C, np.asarray(psi))[0]), C.weight_den)


def codeword(R: Predicate, C: Instance, psi) -> np.ndarray:
    psi = psi.values if isinstance(psi, Assignment) else psi
    return clause_values(R, C, np.asarray(psi))[0]


def count_assignments(domains: Sequence[int]) -> int:
    return math.prod(domains)


def assignment_block(domains: Sequence[int], start: int, stop: int) -> np.ndarray:
    """Assignments ``start..stop-1`` in mixed-radix order, variable 0 fastest."""
    idx = np.arange(start, stop, dtype=np.int64)
    out = np.empty((len(idx), len(domains)), dtype=np.int64)
    for v, q in enumerate(domains):
        out[:, v] = idx % q
        idx //= q
    return out


def assignment_at(domains: Sequence[int], index: int) -> tuple[int, ...]:
    return tuple(int(x) for x in assignment_block(domains, index, index + 1)[0])


# -- file formats -----------------------------------------------------------

def format_instance(C: Instance) -> str:
    lines = [f"kind={C.kind} n={C.n} r={C.r}"]
    for clause, w in zip(C.clauses, C.weights):
        lines.append(" ".join(map(str, clause)) + f" {w}")
    return "\n".join(lines) + "\n"


def parse_instance(text: str) -> Instance:
    header = None
    clauses, weights = [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            try:
                fields = dict(tok.split("=", 1) for tok in line.split())
                kind, n, r = fields["kind"], int(fields["n"]), int(fields["r"])
            except (KeyError, ValueError):
                raise ParseError(lineno, "header must be 'kind=<k> n=<int> r=<int>'") from None
            if kind not in KINDS or set(fields) != {"kind", "n", "r"}:
                raise ParseError(lineno, f"kind must be one of {', '.join(KINDS)}")
            header = (kind, n, r)
            continue
        kind, n, r = header
        parts = line.split()
        if len(parts) != r + 1:
            raise ParseError(lineno, f"expected {r} variables and a weight")
        try:
            clause = [int(p) for p in parts[:r]]
            w = Fraction(parts[r])
        except (ValueError, ZeroDivisionError):
            raise ParseError(lineno, "bad variable index or weight") from None
        if any(not 0 <= v < n for v in clause):
            raise ParseError(lineno, f"variable index out of range 0..{n - 1}")
        if w <= 0:
            raise ParseError(lineno, "weights must be positive")
        if kind == "uniform" and len(set(clause)) != r:
            raise ParseError(lineno, "uniform clauses need distinct variables")
        if kind == "symset" and clause != sorted(set(clause)):
            raise ParseError(lineno, "symset clauses must be strictly increasing")
        clauses.append(clause)
        weights.append(w)
    if header is None:
        raise ParseError(1, "missing header")
    kind, n, r = header
    return Instance.from_weights(kind, n, r, np.array(clauses, dtype=np.int64).reshape(-1, r),
                                 weights)


def format_assignment(psi: Sequence[int]) -> str:
    return " ".join(str(int(x)) for x in psi) + "\n"


def parse_assignment(text: str) -> tuple[int, ...]:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if len(lines) != 1:
        raise ParseError(1 if not lines else 2, "assignment file must hold exactly one line")
    tokens = lines[0].split() if " " in lines[0] else list(lines[0])
    try:
        return tuple(int(x) for x in tokens)
    except ValueError:
        raise ParseError(1, "non-integer symbol") from None
