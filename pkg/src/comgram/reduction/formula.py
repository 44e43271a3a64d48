"""Pi_2 Presburger sentences ``forall x. exists y. psi`` with a positive matrix.

Atoms are normalized to

    sum_j (a+_j - a-_j) x_j + (z+ - z-)  >=  sum_j (b+_j - b-_j) y_j

with at most one of each +/- pair nonzero.  Text format (s-expressions)::

    (forall (x) (exists (y)
      (or (and (>= x (* 2 y)) (>= (- 0 x) (* -2 y)))
          (and (>= (+ x 1) (* 2 y)) (>= (+ (* -1 x) -1) (* -2 y))))))

``and``/``or`` take two or more arguments; comparisons are ``>=``, ``<=``
and ``=`` (the latter becomes a conjunction of two atoms); linear terms use
``+``, ``-``, ``*`` (one factor constant), integers and variable names.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import product
from typing import Iterator, Sequence, Union

from ..errors import FormulaError


@dataclass(frozen=True)
class Atom:
    """One normalized inequality; index is 1-based."""

    index: int
    a_pos: tuple[int, ...]
    a_neg: tuple[int, ...]
    b_pos: tuple[int, ...]
    b_neg: tuple[int, ...]
    z_pos: int
    z_neg: int

    def __post_init__(self):
        for p, q in zip(self.a_pos + self.b_pos + (self.z_pos,), self.a_neg + self.b_neg + (self.z_neg,)):
            if p < 0 or q < 0 or (p and q):
                raise FormulaError(f"atom t{self.index}: coefficient parts must be naturals with one side zero")

    @classmethod
    def from_signed(cls, index: int, a: Sequence[int], b: Sequence[int], z: int) -> "Atom":
        return cls(
            index,
            tuple(max(v, 0) for v in a),
            tuple(max(-v, 0) for v in a),
            tuple(max(v, 0) for v in b),
            tuple(max(-v, 0) for v in b),
            max(z, 0),
            max(-z, 0),
        )

    @property
    def a(self) -> tuple[int, ...]:
        return tuple(p - q for p, q in zip(self.a_pos, self.a_neg))

    @property
    def b(self) -> tuple[int, ...]:
        return tuple(p - q for p, q in zip(self.b_pos, self.b_neg))

    @property
    def z(self) -> int:
        return self.z_pos - self.z_neg

    def lhs(self, x: Sequence[int]) -> int:
        return sum(c * v for c, v in zip(self.a, x)) + self.z

    def rhs(self, y: Sequence[int]) -> int:
        return sum(c * v for c, v in zip(self.b, y))

    def holds(self, x: Sequence[int], y: Sequence[int]) -> bool:
        return self.lhs(x) >= self.rhs(y)

    @property
    def plus(self) -> str:
        return f"t{self.index}+"

    @property
    def minus(self) -> str:
        return f"t{self.index}-"


@dataclass(frozen=True)
class Leaf:
    atom: int


@dataclass(frozen=True)
class And:
    left: "Matrix"
    right: "Matrix"


@dataclass(frozen=True)
class Or:
    left: "Matrix"
    right: "Matrix"


Matrix = Union[Leaf, And, Or]


def leaves(psi: Matrix) -> list[int]:
    if isinstance(psi, Leaf):
        return [psi.atom]
    return leaves(psi.left) + leaves(psi.right)


def nodes(psi: Matrix, path: str = "/") -> Iterator[tuple[str, Matrix]]:
    """Syntax-tree nodes with their positions (root ``/``, children ``/0`` and ``/1``)."""
    yield path, psi
    if not isinstance(psi, Leaf):
        sep = "" if path.endswith("/") else "/"
        yield from nodes(psi.left, f"{path}{sep}0")
        yield from nodes(psi.right, f"{path}{sep}1")


def child(path: str, k: int) -> str:
    return f"{path}{'' if path.endswith('/') else '/'}{k}"


def show(psi: Matrix) -> str:
    if isinstance(psi, Leaf):
        return f"t{psi.atom}"
    op = "&" if isinstance(psi, And) else "|"
    return f"({show(psi.left)}{op}{show(psi.right)})"


def subst_bool(psi: Matrix, xi: Sequence[int] | dict) -> bool:
    """Evaluate ``psi`` with atom ``t_i`` replaced by the bit ``xi[i]`` (1-based)."""
    get = (lambda i: xi[i]) if isinstance(xi, dict) else (lambda i: xi[i - 1])
    if isinstance(psi, Leaf):
        return bool(get(psi.atom))
    l, r = subst_bool(psi.left, xi), subst_bool(psi.right, xi)
    return (l and r) if isinstance(psi, And) else (l or r)


def dnf(psi: Matrix) -> list[frozenset[int]]:
    """Clauses (sets of atom indices) of the disjunctive normal form, without subsumed clauses."""
    if isinstance(psi, Leaf):
        out = [frozenset({psi.atom})]
    elif isinstance(psi, Or):
        out = dnf(psi.left) + dnf(psi.right)
    else:
        out = [a | b for a in dnf(psi.left) for b in dnf(psi.right)]
    uniq = set(out)
    return sorted((c for c in uniq if not any(d < c for d in uniq)), key=lambda c: (len(c), sorted(c)))


@dataclass(frozen=True)
class Pi2Sentence:
    universals: tuple[str, ...]
    existentials: tuple[str, ...]
    atoms: tuple[Atom, ...]
    matrix: Matrix

    def __post_init__(self):
        m, n = len(self.universals), len(self.existentials)
        for i, t in enumerate(self.atoms, 1):
            if t.index != i:
                raise FormulaError("atoms must be numbered 1..k in order")
            if len(t.a_pos) != m or len(t.b_pos) != n:
                raise FormulaError(f"atom t{i} has the wrong arity")
        used = sorted(set(leaves(self.matrix)))
        if used != list(range(1, len(self.atoms) + 1)):
            raise FormulaError("every atom must occur in the matrix and only declared atoms may occur")

    @property
    def m(self) -> int:
        return len(self.universals)

    @property
    def n(self) -> int:
        return len(self.existentials)

    @property
    def k(self) -> int:
        return len(self.atoms)

    @property
    def leaves_distinct(self) -> bool:
        ls = leaves(self.matrix)
        return len(ls) == len(set(ls))

    def atom(self, i: int) -> Atom:
        return self.atoms[i - 1]

    @property
    def terminals(self) -> tuple[str, ...]:
        out: list[str] = []
        for t in self.atoms:
            out += [t.plus, t.minus]
        return tuple(out)

    @property
    def norm_inf(self) -> int:
        """Largest absolute coefficient or constant."""
        vals = [abs(v) for t in self.atoms for v in t.a + t.b + (t.z,)]
        return max(vals, default=0)

    @property
    def norm_1_inf(self) -> int:
        return max((sum(abs(v) for v in t.a + t.b) for t in self.atoms), default=0)

    def holds(self, x: Sequence[int], y: Sequence[int]) -> bool:
        return eval_matrix(self, x, y)


def eval_matrix(phi: Pi2Sentence, x: Sequence[int], y: Sequence[int]) -> bool:
    if len(x) != phi.m or len(y) != phi.n:
        raise FormulaError(f"expected {phi.m} universal and {phi.n} existential values")
    bits = {t.index: t.holds(x, y) for t in phi.atoms}
    return subst_bool(phi.matrix, bits)


@dataclass(frozen=True)
class FormulaLength:
    """|phi| and its ingredients; ``value`` is the padded length used by the reduction."""

    nodes: int
    constants: int
    occurrences: int
    declarations: int
    raw: int
    value: int


def formula_length(phi: Pi2Sentence) -> FormulaLength:
    """Syntax-tree nodes + unary constants + variable occurrences + declared variables, padded.

    Padding raises the value to at least ``2 + m + n + k`` and ``||phi||_inf``.
    """
    n_nodes = sum(1 for _ in nodes(phi.matrix))
    consts = sum(abs(v) for t in phi.atoms for v in t.a + t.b + (t.z,))
    occ = sum(1 for t in phi.atoms for v in t.a + t.b if v)
    decl = phi.m + phi.n
    raw = n_nodes + consts + occ + decl
    return FormulaLength(n_nodes, consts, occ, decl, raw, max(raw, 2 + phi.m + phi.n + phi.k, phi.norm_inf))


# --- parsing --------------------------------------------------------------

_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def _sexp(text: str):
    # ';' starts a comment running to the end of the line
    toks = _TOKEN.findall("\n".join(line.split(";", 1)[0] for line in text.splitlines()))
    pos = 0

    def read():
        nonlocal pos
        if pos >= len(toks):
            raise FormulaError("unexpected end of input")
        t = toks[pos]
        pos += 1
        if t == "(":
            out = []
            while pos < len(toks) and toks[pos] != ")":
                out.append(read())
            if pos >= len(toks):
                raise FormulaError("missing ')'")
            pos += 1
            return out
        if t == ")":
            raise FormulaError("unexpected ')'")
        return t

    expr = read()
    if pos != len(toks):
        raise FormulaError("trailing input after the sentence")
    return expr


_INT = re.compile(r"^[+-]?\d+$")
_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_']*$")


def _linear(e, vars_: set[str]) -> dict:
    """Linear term as {var: coeff, None: constant}."""
    if isinstance(e, str):
        if _INT.match(e):
            return {None: int(e)}
        if e in vars_:
            return {e: 1}
        raise FormulaError(f"free or unknown variable {e!r}")
    if not e:
        raise FormulaError("empty term")
    op, args = e[0], e[1:]
    parts = [_linear(a, vars_) for a in args]
    if op == "+":
        return _lsum(parts)
    if op == "-":
        if len(parts) == 1:
            return _lscale(parts[0], -1)
        return _lsum([parts[0]] + [_lscale(p, -1) for p in parts[1:]])
    if op == "*":
        const = [p for p in parts if set(p) <= {None}]
        if len(parts) - len(const) > 1:
            raise FormulaError("nonlinear product")
        k = 1
        for p in const:
            k *= p.get(None, 0)
        rest = [p for p in parts if not set(p) <= {None}]
        return _lscale(rest[0], k) if rest else {None: k}
    raise FormulaError(f"unknown term operator {op!r}")


def _lsum(parts):
    out: dict = {}
    for p in parts:
        for k, v in p.items():
            out[k] = out.get(k, 0) + v
    return out


def _lscale(p, k):
    return {a: k * v for a, v in p.items()}


def parse_formula(text: str) -> Pi2Sentence:
    """Parse and normalize a sentence; raises FormulaError on negation, wrong prefix or free variables."""
    e = _sexp(text)
    xs: list[str] = []
    ys: list[str] = []
    if isinstance(e, list) and e and e[0] == "forall":
        if len(e) != 3 or not isinstance(e[1], list):
            raise FormulaError("expected (forall (vars...) BODY)")
        xs = list(e[1])
        e = e[2]
    if isinstance(e, list) and e and e[0] == "exists":
        if len(e) != 3 or not isinstance(e[1], list):
            raise FormulaError("expected (exists (vars...) BODY)")
        ys = list(e[1])
        e = e[2]
    for v in xs + ys:
        if not isinstance(v, str) or not _NAME.match(v):
            raise FormulaError(f"bad variable name {v!r}")
    if len(set(xs + ys)) != len(xs + ys):
        raise FormulaError("variables must be declared once")
    vars_ = set(xs) | set(ys)
    atoms: list[Atom] = []

    def build(b) -> Matrix:
        if not isinstance(b, list) or not b:
            raise FormulaError(f"expected a formula, got {b!r}")
        op = b[0]
        if op in ("forall", "exists"):
            raise FormulaError("quantifier prefix is not of the form forall-exists")
        if op == "not":
            raise FormulaError("negation is not allowed in the matrix")
        if op in ("and", "or"):
            if len(b) < 3:
                raise FormulaError(f"({op} ...) needs at least two arguments")
            kids = [build(a) for a in b[1:]]
            node = kids[-1]
            for kid in reversed(kids[:-1]):
                node = And(kid, node) if op == "and" else Or(kid, node)
            return node
        if op in (">=", "<=", "="):
            if len(b) != 3:
                raise FormulaError(f"({op} LIN LIN) takes two terms")
            l, r = _linear(b[1], vars_), _linear(b[2], vars_)
            if op == "<=":
                l, r = r, l
            if op == "=":
                return And(atom(l, r), atom(r, l))
            return atom(l, r)
        raise FormulaError(f"unknown connective {op!r}")

    def atom(l: dict, r: dict) -> Leaf:
        d = _lsum([l, _lscale(r, -1)])
        a = [d.get(x, 0) for x in xs]
        b = [-d.get(y, 0) for y in ys]
        atoms.append(Atom.from_signed(len(atoms) + 1, a, b, d.get(None, 0)))
        return Leaf(len(atoms))

    psi = build(e)
    return Pi2Sentence(tuple(xs), tuple(ys), tuple(atoms), psi)


def _lin_text(coeffs: Sequence[int], names: Sequence[str], const: int = 0) -> str:
    terms = [f"(* {c} {v})" for c, v in zip(coeffs, names) if c]
    if const or not terms:
        terms.append(str(const))
    return terms[0] if len(terms) == 1 else "(+ " + " ".join(terms) + ")"


def format_formula(phi: Pi2Sentence) -> str:
    """Round-trippable text form of a normalized sentence."""

    def body(psi: Matrix) -> str:
        if isinstance(psi, Leaf):
            t = phi.atom(psi.atom)
            return f"(>= {_lin_text(t.a, phi.universals, t.z)} {_lin_text(t.b, phi.existentials)})"
        op = "and" if isinstance(psi, And) else "or"
        return f"({op} {body(psi.left)} {body(psi.right)})"

    return f"(forall ({' '.join(phi.universals)}) (exists ({' '.join(phi.existentials)}) {body(phi.matrix)}))"


# --- bounded validity -----------------------------------------------------


@dataclass(frozen=True)
class ValidityResult:
    """``valid_on_box``, or a refuting ``x``; ``certified`` means no ``y`` exists at all for it."""

    valid_on_box: bool
    refuted: tuple[int, ...] | None
    certified: bool
    checked: int

    def __bool__(self) -> bool:
        return self.valid_on_box


def clause_system(phi: Pi2Sentence, clause: frozenset[int], x: Sequence[int]):
    """The system in ``y`` for one DNF clause at fixed ``x``: ``-b . y >= -(a . x + z)`` per atom."""
    from ..semilinear import DiophantineSystem

    A = tuple(tuple(-v for v in phi.atom(i).b) for i in sorted(clause))
    c = tuple(-phi.atom(i).lhs(x) for i in sorted(clause))
    return DiophantineSystem(A, c, phi.n)


def validity_bounded(phi: Pi2Sentence, x_box: int, y_box: int, certify: bool = True) -> ValidityResult:
    """Check ``forall x in [0,x_box]^m exists y in [0,y_box]^n . psi``.

    The first ``x`` (lexicographic) without a witness in the ``y`` box is
    returned.  With ``certify``, such an ``x`` only counts once the remaining
    linear system in ``y`` of every DNF clause is shown unsolvable, either
    because the ``y`` box already covers the Pottier bound or by computing
    its minimal solutions exactly; an ``x`` whose witnesses all lie
    outside the box is skipped.
    """
    ys = list(product(range(y_box + 1), repeat=phi.n))
    checked = 0
    clauses = dnf(phi.matrix)
    for x in product(range(x_box + 1), repeat=phi.m):
        checked += 1
        if any(eval_matrix(phi, x, y) for y in ys):
            continue
        cert = certify and _no_solution(phi, clauses, x, y_box)
        if certify and not cert:
            continue
        return ValidityResult(False, tuple(x), cert, checked)
    return ValidityResult(True, None, False, checked)


def _no_solution(phi: Pi2Sentence, clauses, x, y_box: int) -> bool:
    from ..semilinear import minimal_solutions

    for cl in clauses:
        D = clause_system(phi, cl, x)
        if y_box >= D.pottier_bound():
            continue
        if minimal_solutions(D).bases:
            return False
    return True
