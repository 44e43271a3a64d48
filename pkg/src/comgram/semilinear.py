"""Linear and semilinear sets over N^m, linear Diophantine systems, Huynh form.

A linear set ``L(b, P) = b + cone(P)`` is stored with its periods
deduplicated and zero periods dropped (neither changes the set).  All
arithmetic is exact integer/rational arithmetic.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations, product
from math import comb
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .budget import Deadline, tick
from .core.words import bit_size
from .errors import BudgetExceeded, ConsistencyError, DimensionError, ParseError, VerificationError
from .linalg import FullRankSolver, circuits, primitive_kernel_vector, rank_of_vectors

log = logging.getLogger(__name__)

Vector = tuple[int, ...]


def norm_inf(v: Sequence[int]) -> int:
    return max((abs(x) for x in v), default=0)


def vector_size(v: Sequence[int]) -> int:
    """#v: total binary size of the entries."""
    return sum(bit_size(abs(x)) for x in v)


def _add(u: Sequence[int], v: Sequence[int]) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def _check_dim(v: Sequence[int], dim: int) -> None:
    if len(v) != dim:
        raise DimensionError(f"vector of dimension {len(v)} where {dim} was expected")


@dataclass(frozen=True)
class LinearSet:
    base: Vector
    periods: tuple[Vector, ...] = ()

    def __post_init__(self):
        base = tuple(int(x) for x in self.base)
        dim = len(base)
        periods = set()
        for p in self.periods:
            p = tuple(int(x) for x in p)
            _check_dim(p, dim)
            if any(x < 0 for x in p):
                raise ValueError(f"period {p} has a negative entry")
            if any(p):
                periods.add(p)
        if any(x < 0 for x in base):
            raise ValueError(f"base {base} has a negative entry")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "periods", tuple(sorted(periods)))

    @property
    def dim(self) -> int:
        return len(self.base)

    @cached_property
    def rank(self) -> int:
        return rank_of_vectors(self.periods)

    @property
    def is_full_rank(self) -> bool:
        return self.rank == len(self.periods)

    @cached_property
    def _solver(self) -> FullRankSolver | None:
        return FullRankSolver(self.periods, self.dim) if self.is_full_rank else None

    @property
    def size(self) -> int:
        return vector_size(self.base) + sum(vector_size(p) for p in self.periods)

    def __contains__(self, v) -> bool:
        return member_linear(tuple(v), self)

    def points(self, admissible: Callable[[Vector], bool], deadline: Deadline | None = None) -> set[Vector]:
        """All points ``v`` of the set with ``admissible(v)``.

        ``admissible`` must be downward closed (if it rejects ``v`` it rejects
        everything above ``v`` pointwise); the enumeration prunes on it.
        """
        out: set[Vector] = set()
        if not admissible(self.base):
            return out
        periods = self.periods

        def rec(i: int, v: Vector):
            if i == len(periods):
                out.add(v)
                return
            p = periods[i]
            while True:
                tick(deadline)
                rec(i + 1, v)
                v = _add(v, p)
                if not admissible(v):
                    return

        rec(0, self.base)
        return out

    def points_up_to_length(self, max_length: int) -> set[Vector]:
        return self.points(lambda v: sum(v) <= max_length)

    def iter_point_arrays(self, max_length: int) -> Iterator[np.ndarray]:
        """Points with total length <= max_length as int64 arrays, one chunk per value of the first coefficient.

        Only meaningful for full-rank sets, where coefficient vectors and
        points correspond one to one (no duplicates across chunks).
        """
        room = max_length - sum(self.base)
        if room < 0:
            return
        base = np.array(self.base, dtype=np.int64)
        if not self.periods:
            yield base[None, :]
            return
        P = np.array(self.periods, dtype=np.int64)
        weights = P.sum(axis=1)
        for first in range(room // weights[0] + 1):
            lam = np.array([[first]], dtype=np.int64)
            left = np.array([room - first * weights[0]], dtype=np.int64)
            for w in weights[1:]:
                counts = left // w + 1
                idx = np.repeat(np.arange(len(lam)), counts)
                offsets = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
                lam = np.concatenate([lam[idx], offsets[:, None]], axis=1)
                left = left[idx] - offsets * w
            yield base + lam @ P

    def contains_array(self, X: np.ndarray) -> np.ndarray:
        """Row-wise membership for an integer array (full-rank sets use the vectorized elimination path)."""
        X = np.asarray(X, dtype=np.int64)
        solver = self._solver
        if solver is None or not self._fits_int64(X):
            return np.array([member_linear(tuple(int(x) for x in row), self) for row in X], dtype=bool)
        base = np.array(self.base, dtype=np.int64)
        D = X - base
        ok = (D >= 0).all(axis=1)
        if solver.k == 0:
            return ok & (D == 0).all(axis=1)
        adj = np.array(solver.adj, dtype=np.int64)
        num = D[:, solver.rows] @ adj.T
        ok &= (num >= 0).all(axis=1) & (num % solver.det == 0).all(axis=1)
        lam = num // solver.det
        P = np.array(self.periods, dtype=np.int64)
        ok &= (lam @ P == D).all(axis=1)
        return ok

    def _fits_int64(self, X: np.ndarray) -> bool:
        """Whether the elimination products stay below 2^62 for the rows of ``X``."""
        solver = self._solver
        if not len(X) or not solver.k:
            return True
        d = int(np.abs(X).max()) + max(map(abs, self.base), default=0)
        a = max(abs(x) for row in solver.adj for x in row)
        p = max(abs(x) for q in self.periods for x in q)
        bound = solver.k * a * d
        return max(bound, solver.k * bound * p, abs(solver.det)) < 2**62

    def to_json(self) -> dict:
        return {"base": [str(x) for x in self.base], "periods": [[str(x) for x in p] for p in self.periods]}


@dataclass(frozen=True)
class SemiLinearSet:
    dim: int
    components: tuple[LinearSet, ...] = ()

    def __post_init__(self):
        comps = tuple(self.components)
        for c in comps:
            if c.dim != self.dim:
                raise DimensionError(f"component of dimension {c.dim} in a set of dimension {self.dim}")
        object.__setattr__(self, "components", comps)

    @classmethod
    def of(cls, *components: LinearSet) -> "SemiLinearSet":
        if not components:
            raise ValueError("cannot infer the dimension of an empty union; use SemiLinearSet(dim)")
        return cls(components[0].dim, components)

    @property
    def size(self) -> int:
        """#M = sum over components of #b + |{b}| * #P."""
        return sum(c.size for c in self.components)

    def __contains__(self, v) -> bool:
        return member_semilinear(tuple(v), self)

    def __or__(self, other: "SemiLinearSet") -> "SemiLinearSet":
        if other.dim != self.dim:
            raise DimensionError("union of semilinear sets of different dimensions")
        return SemiLinearSet(self.dim, self.components + other.components)

    def points(self, admissible: Callable[[Vector], bool], deadline: Deadline | None = None) -> set[Vector]:
        out: set[Vector] = set()
        for c in self.components:
            out |= c.points(admissible, deadline)
        return out

    def points_up_to_length(self, max_length: int) -> set[Vector]:
        return self.points(lambda v: sum(v) <= max_length)

    def contains_array(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.int64)
        hit = np.zeros(len(X), dtype=bool)
        for c in self.components:
            todo = ~hit
            if not todo.any():
                break
            hit[todo] = c.contains_array(X[todo])
        return hit

    def to_json(self) -> dict:
        return {"dim": self.dim, "components": [c.to_json() for c in self.components]}

    def dumps(self, **extra) -> str:
        doc = self.to_json()
        doc.update(extra)
        return json.dumps(doc, indent=2)


def loads_semilinear(text: str) -> SemiLinearSet:
    try:
        doc = json.loads(text)
        return semilinear_from_json(doc)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad semilinear JSON: {exc}") from exc


def semilinear_from_json(doc: dict) -> SemiLinearSet:
    dim = int(doc["dim"])
    comps = []
    for c in doc["components"]:
        base = tuple(int(x) for x in c["base"])
        periods = tuple(tuple(int(x) for x in p) for p in c.get("periods", []))
        _check_dim(base, dim)
        comps.append(LinearSet(base, periods))
    return SemiLinearSet(dim, tuple(comps))


# --- membership -----------------------------------------------------------


def member_linear(v: Sequence[int], L: LinearSet, deadline: Deadline | None = None) -> bool:
    """Is ``v`` in ``b + cone(P)``?

    Full-column-rank period sets are decided by exact elimination.  Otherwise
    a depth-first search over the coefficients, bounded coordinate-wise by
    the residual ``v - b`` and memoized on (period index, residual).
    """
    v = tuple(v)
    _check_dim(v, L.dim)
    rest = tuple(a - b for a, b in zip(v, L.base))
    if any(x < 0 for x in rest):
        return False
    if L._solver is not None:
        return L._solver.coefficients(rest) is not None
    return _member_cone(rest, L.periods, deadline)


def cone_coefficients(
    target: Sequence[int], periods: Sequence[Sequence[int]], deadline: Deadline | None = None
) -> tuple[int, ...] | None:
    """Natural ``lam`` with ``sum(lam[i] * periods[i]) == target``, or None.

    Repeated and zero periods are allowed; they get coefficient 0.
    """
    target = tuple(target)
    if any(x < 0 for x in target):
        return None
    first: dict[Vector, int] = {}
    for i, p in enumerate(periods):
        p = tuple(p)
        if any(p) and p not in first:
            first[p] = i
    P = list(first)
    if P and rank_of_vectors(P) == len(P):
        lam = FullRankSolver(P, len(target)).coefficients(target)
    elif not P:
        lam = None if any(target) else []
    else:
        lam = _cone_search(target, P, deadline)
    if lam is None:
        return None
    out = [0] * len(periods)
    for p, k in zip(P, lam):
        out[first[p]] = k
    return tuple(out)


def _member_cone(target: Vector, periods: Sequence[Vector], deadline: Deadline | None) -> bool:
    return _cone_search(target, periods, deadline) is not None


def _cone_search(target: Vector, periods: Sequence[Vector], deadline: Deadline | None) -> list[int] | None:
    """Complete search for natural coefficients, with propagation.

    A coordinate whose residual is 0 forces every open period touching it
    to 0; a coordinate left with a single open period fixes that period's
    coefficient.  Otherwise the search branches on the most constrained
    coordinate.  Failed (open periods, residual) states are memoized.
    """
    n, dim = len(periods), len(target)
    cover = [[i for i in range(n) if periods[i][j] > 0] for j in range(dim)]
    failed: set[tuple[tuple[int, ...], Vector]] = set()

    def assign(lam, rem, i, k) -> bool:
        lam[i] = k
        if k:
            for j, x in enumerate(periods[i]):
                if x:
                    rem[j] -= k * x
                    if rem[j] < 0:
                        return False
        return True

    def solve(lam: list, rem: list) -> list | None:
        changed = True
        while changed:
            changed = False
            for j in range(dim):
                open_ = [i for i in cover[j] if lam[i] is None]
                if rem[j] == 0:
                    for i in open_:
                        lam[i] = 0
                    changed |= bool(open_)
                elif not open_:
                    return None
                elif len(open_) == 1:
                    i = open_[0]
                    q, r = divmod(rem[j], periods[i][j])
                    if r or not assign(lam, rem, i, q):
                        return None
                    changed = True
        todo = tuple(i for i in range(n) if lam[i] is None)
        if not todo:
            return lam
        key = (todo, tuple(rem))
        if key in failed:
            return None
        tick(deadline)
        j = min(
            (j for j in range(dim) if rem[j] > 0),
            key=lambda j: sum(1 for i in cover[j] if lam[i] is None),
        )
        i = max((i for i in cover[j] if lam[i] is None), key=lambda i: sum(1 for x in periods[i] if x))
        top = min(r // x for r, x in zip(rem, periods[i]) if x > 0)
        for k in range(top, -1, -1):
            lam2, rem2 = lam[:], rem[:]
            if assign(lam2, rem2, i, k):
                out = solve(lam2, rem2)
                if out is not None:
                    return out
        failed.add(key)
        return None

    lam0: list = [None if any(p) else 0 for p in periods]
    return solve(lam0, list(target))


def member_semilinear(v: Sequence[int], M: SemiLinearSet, deadline: Deadline | None = None) -> bool:
    v = tuple(v)
    _check_dim(v, M.dim)
    return any(member_linear(v, c, deadline) for c in M.components)


# --- linear Diophantine systems -------------------------------------------


@dataclass(frozen=True)
class DiophantineSystem:
    """``A @ x >= c`` over natural unknowns ``x``; ``A`` is m x n."""

    A: tuple[tuple[int, ...], ...]
    c: tuple[int, ...]
    n: int = field(default=-1)

    def __post_init__(self):
        A = tuple(tuple(int(x) for x in row) for row in self.A)
        c = tuple(int(x) for x in self.c)
        n = self.n if self.n >= 0 else (len(A[0]) if A else 0)
        if len(c) != len(A):
            raise DimensionError(f"{len(A)} rows but {len(c)} right-hand sides")
        for row in A:
            _check_dim(row, n)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "n", n)

    @property
    def m(self) -> int:
        return len(self.A)

    @property
    def norm_1_inf(self) -> int:
        return max((sum(abs(x) for x in row) for row in self.A), default=0)

    def satisfied_by(self, x: Sequence[int]) -> bool:
        return all(sum(a * b for a, b in zip(row, x)) >= cc for row, cc in zip(self.A, self.c))

    def pottier_bound(self) -> int:
        return (self.norm_1_inf + norm_inf(self.c) + 2) ** (self.m + self.n)

    def to_json(self) -> dict:
        return {"A": [[str(x) for x in r] for r in self.A], "c": [str(x) for x in self.c], "n": self.n}

    @classmethod
    def from_json(cls, doc: dict) -> "DiophantineSystem":
        A = tuple(tuple(int(x) for x in r) for r in doc["A"])
        return cls(A, tuple(int(x) for x in doc["c"]), int(doc.get("n", len(A[0]) if A else 0)))


@dataclass(frozen=True)
class HilbertDecomposition:
    """``[[D]] = L(bases, periods)`` together with the size bound checks."""

    bases: tuple[Vector, ...]
    periods: tuple[Vector, ...]
    bound: int
    cardinality_bound_holds: bool

    def to_semilinear(self, n: int) -> SemiLinearSet:
        return SemiLinearSet(n, tuple(LinearSet(b, self.periods) for b in self.bases))


def minimal_solutions(D: DiophantineSystem, max_nodes: int = 2_000_000, deadline: Deadline | None = None) -> HilbertDecomposition:
    """Minimal solutions ``B`` of ``D`` and minimal solutions ``P`` of ``A x >= 0``.

    Computed as the Hilbert basis of the homogenized system
    ``A x - c x0 - s = 0`` over naturals (``s`` are slack variables) with the
    Contejean-Devie completion procedure, keeping elements with ``x0 <= 1``:
    those with ``x0 = 1`` are the bases and those with ``x0 = 0`` the periods.
    """
    m, n = D.m, D.n
    N = n + 1 + m
    # image under the lifted matrix of each unit vector
    cols = [tuple(D.A[i][j] for i in range(m)) for j in range(n)]
    cols.append(tuple(-x for x in D.c))
    cols.extend(tuple(-1 if i == k else 0 for i in range(m)) for k in range(m))

    basis: list[tuple[int, ...]] = []
    frontier: dict[tuple[int, ...], tuple[int, ...]] = {}
    for k in range(N):
        e = tuple(int(i == k) for i in range(N))
        frontier[e] = cols[k]
    nodes = 0
    while frontier:
        solved = [p for p, img in frontier.items() if not any(img)]
        basis.extend(solved)
        nxt: dict[tuple[int, ...], tuple[int, ...]] = {}
        for p, img in frontier.items():
            if not any(img):
                continue
            for k in range(N):
                if sum(a * b for a, b in zip(img, cols[k])) >= 0:
                    continue
                if k == n and p[n] >= 1:
                    continue
                q = p[:k] + (p[k] + 1,) + p[k + 1 :]
                if q in nxt or any(all(bi <= qi for bi, qi in zip(b, q)) for b in basis):
                    continue
                nodes += 1
                tick(deadline)
                if nodes > max_nodes:
                    raise BudgetExceeded(
                        f"completion exceeded {max_nodes} nodes; Pottier bound for this system is {D.pottier_bound()}"
                    )
                nxt[q] = tuple(a + b for a, b in zip(img, cols[k]))
        frontier = nxt

    bases = tuple(sorted(h[:n] for h in basis if h[n] == 1))
    periods = tuple(sorted(h[:n] for h in basis if h[n] == 0))
    bound = D.pottier_bound()
    for v in bases + periods:
        if norm_inf(v) > bound:
            raise ConsistencyError(f"minimal solution {v} exceeds the Pottier bound {bound}")
    for b in bases:
        if not D.satisfied_by(b):
            raise ConsistencyError(f"base {b} is not a solution")
    hom = DiophantineSystem(D.A, (0,) * m, n)
    for p in periods:
        if not hom.satisfied_by(p):
            raise ConsistencyError(f"period {p} is not a homogeneous solution")
    card_ok = len(periods) <= comb(n, m)
    if not card_ok:
        log.debug("|P| = %d exceeds binom(%d, %d)", len(periods), n, m)
    return HilbertDecomposition(bases, periods, bound, card_ok)


def solve_diophantine(D: DiophantineSystem, max_nodes: int = 2_000_000, deadline: Deadline | None = None) -> SemiLinearSet:
    """The solution set of ``D`` as ``L(B, P)``, one component per minimal solution."""
    return minimal_solutions(D, max_nodes, deadline).to_semilinear(D.n)


# --- Huynh decomposition --------------------------------------------------


def circuit_bound(periods: Sequence[Vector]) -> int:
    """Largest entry of a primitive integer dependency among the periods (0 if independent)."""
    best = 0
    for idx in circuits(periods):
        mu = primitive_kernel_vector([periods[i] for i in idx])
        best = max(best, norm_inf(mu))
    return best


def default_verification_box(L: LinearSet) -> Vector:
    """Per coordinate: base + 2 * (largest period entry) + 2."""
    return tuple(
        b + 2 * max((p[i] for p in L.periods), default=0) + 2 for i, b in enumerate(L.base)
    )


def huynh_decompose(
    L: LinearSet,
    verify: bool = True,
    box: Sequence[int] | None = None,
    max_components: int = 100_000,
    deadline: Deadline | None = None,
) -> SemiLinearSet:
    """Rewrite ``L(b, Q)`` as a union of ``L(b_i, Q_i)`` with every ``Q_i`` full column rank.

    Each ``Q_i`` ranges over the linearly independent subsets of ``Q`` of size
    ``rank(Q)``.  With ``d`` the largest entry of a primitive integer
    dependency among the periods, every ``v = b + sum(lam_q q)`` can be
    rewritten (subtracting dependencies among the periods with coefficients
    ``>= d``) so that the periods outside some ``Q_i`` carry coefficients
    ``< d``.  The bases ``b_i`` are therefore ``b + sum(lam_q q)`` over
    ``q`` outside ``Q_i`` with ``0 <= lam_q < d``; bases already covered
    by an emitted component with the same ``Q_i`` are dropped.

    When ``verify`` is set, every point of ``L`` inside the verification box
    is checked against the union.
    """
    Q = L.periods
    r = L.rank
    if r == len(Q):
        return SemiLinearSet(L.dim, (L,))
    d = circuit_bound(Q)
    comps: list[LinearSet] = []
    for S in combinations(range(len(Q)), r):
        sub = [Q[i] for i in S]
        if rank_of_vectors(sub) != r:
            continue
        others = [Q[i] for i in range(len(Q)) if i not in S]
        mine: list[LinearSet] = []
        for lam in product(range(d), repeat=len(others)):
            tick(deadline)
            b = L.base
            for k, q in zip(lam, others):
                if k:
                    b = _add(b, tuple(k * x for x in q))
            if any(member_linear(b, c) for c in mine):
                continue
            mine = [c for c in mine if not member_linear(c.base, LinearSet(b, sub))]
            mine.append(LinearSet(b, tuple(sub)))
        comps.extend(mine)
        if len(comps) > max_components:
            raise BudgetExceeded(f"Huynh decomposition exceeded {max_components} components")
    result = SemiLinearSet(L.dim, tuple(comps))
    if verify:
        verify_huynh(L, result, box, deadline)
    return result


def verify_huynh(L: LinearSet, H: SemiLinearSet, box: Sequence[int] | None = None, deadline: Deadline | None = None) -> None:
    for c in H.components:
        if not c.is_full_rank:
            raise VerificationError(f"component {c} is not full column rank")
        if not member_linear(c.base, L) or not set(c.periods) <= set(L.periods):
            raise VerificationError(f"component {c} is not contained in {L}")
    box = tuple(box) if box is not None else default_verification_box(L)
    inside = L.points(lambda v: all(x <= bx for x, bx in zip(v, box)), deadline)
    for v in inside:
        if v not in H:
            raise VerificationError(f"point {v} of {L} not covered; equality fails on box {box}")


def huynh_form(M: SemiLinearSet, verify: bool = True, deadline: Deadline | None = None) -> SemiLinearSet:
    comps: list[LinearSet] = []
    for c in M.components:
        comps.extend(huynh_decompose(c, verify=verify, deadline=deadline).components)
    return SemiLinearSet(M.dim, tuple(dict.fromkeys(comps)))


# --- inclusion ------------------------------------------------------------


@dataclass(frozen=True)
class InclusionResult:
    """Outcome of a bit-bounded inclusion search.

    ``included`` with ``exhaustive=False`` only means no witness of bit size
    at most ``bound`` exists.
    """

    included: bool
    witness: Vector | None
    bound: int
    exhaustive: bool
    candidates: int


def semilinear_inclusion(
    M: SemiLinearSet, N: SemiLinearSet, witness_bit_bound: int, deadline: Deadline | None = None
) -> InclusionResult:
    """Search ``M \\ N`` for a witness of bit size at most ``witness_bit_bound``.

    Candidates are exactly the points of ``M`` within the bit bound (bit size
    is monotone, so the coefficient search prunes on it), tried in order of
    (bit size, length, vector).  The first one outside ``N`` is returned.
    The verdict is exhaustive only when ``M`` is finite and fits the bound.
    """
    if M.dim != N.dim:
        raise DimensionError(f"inclusion between dimensions {M.dim} and {N.dim}")
    cands = M.points(lambda v: vector_size(v) <= witness_bit_bound, deadline)
    finite_inside = all(
        not c.periods and vector_size(c.base) <= witness_bit_bound for c in M.components
    )
    ordered = sorted(cands, key=lambda v: (vector_size(v), sum(v), v))
    for v in ordered:
        tick(deadline)
        if not member_semilinear(v, N):
            return InclusionResult(False, v, witness_bit_bound, True, len(ordered))
    return InclusionResult(True, None, witness_bit_bound, finite_inside, len(ordered))
