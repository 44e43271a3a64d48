"""Commutative grammars, class detection and size measures."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from ..errors import BudgetExceeded, GrammarError
from .words import CommutativeWord, bit_size


@dataclass(frozen=True)
class Production:
    """A production ``lhs -> rhs`` with both sides commutative words."""

    lhs: CommutativeWord
    rhs: CommutativeWord

    def __post_init__(self):
        if self.lhs.is_empty():
            raise GrammarError("left-hand side of a production must be nonempty")

    @classmethod
    def of(cls, lhs: str | CommutativeWord, rhs: str | CommutativeWord) -> "Production":
        if isinstance(lhs, str):
            lhs = CommutativeWord.parse(lhs)
        if isinstance(rhs, str):
            rhs = CommutativeWord.parse(rhs)
        return cls(lhs, rhs)

    @property
    def sort_key(self):
        return (self.lhs.items(), self.rhs.items())

    def __str__(self) -> str:
        return f"{self.lhs} -> {self.rhs}"


class GrammarKind(enum.IntEnum):
    """Grammar classes in order of preference when reporting the primary class."""

    REGULAR = 0
    CONTEXT_FREE = 1
    EXPONENT_SENSITIVE = 2
    CONTEXT_SENSITIVE = 3
    TYPE0 = 4

    @property
    def label(self) -> str:
        return _KIND_LABELS[self]


_KIND_LABELS = {
    GrammarKind.REGULAR: "regular",
    GrammarKind.CONTEXT_FREE: "context-free",
    GrammarKind.EXPONENT_SENSITIVE: "exponent-sensitive",
    GrammarKind.CONTEXT_SENSITIVE: "context-sensitive",
    GrammarKind.TYPE0: "type-0",
}


@dataclass(frozen=True)
class GrammarClass:
    primary: GrammarKind
    classes: frozenset

    def __contains__(self, kind: GrammarKind) -> bool:
        return kind in self.classes

    @property
    def is_regular(self) -> bool:
        return GrammarKind.REGULAR in self.classes

    @property
    def is_context_free(self) -> bool:
        return GrammarKind.CONTEXT_FREE in self.classes


@dataclass(frozen=True)
class Grammar:
    """A commutative grammar (N, Sigma, S, P).

    ``nonterminals`` and ``terminals`` are tuples in declaration order; that
    order is the canonical coordinate order used to turn words into vectors.
    Construction validates disjointness and that every production only uses
    declared symbols, with terminal-free left-hand sides.
    """

    nonterminals: tuple[str, ...]
    terminals: tuple[str, ...]
    axiom: str
    productions: tuple[Production, ...]
    _nonterminal_set: frozenset = field(init=False, repr=False, compare=False)
    _terminal_set: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "nonterminals", tuple(self.nonterminals))
        object.__setattr__(self, "terminals", tuple(self.terminals))
        object.__setattr__(self, "productions", tuple(self.productions))
        nts, ts = frozenset(self.nonterminals), frozenset(self.terminals)
        if len(nts) != len(self.nonterminals):
            raise GrammarError("duplicate nonterminal declaration")
        if len(ts) != len(self.terminals):
            raise GrammarError("duplicate terminal declaration")
        if nts & ts:
            raise GrammarError(f"symbols declared both terminal and nonterminal: {sorted(nts & ts)}")
        if self.axiom not in nts:
            raise GrammarError(f"axiom {self.axiom!r} is not a declared nonterminal")
        for p in self.productions:
            bad = [s for s in p.lhs if s not in nts]
            if bad:
                raise GrammarError(f"left-hand side of {p} contains non-nonterminals {bad}")
            bad = [s for s in p.rhs if s not in nts and s not in ts]
            if bad:
                raise GrammarError(f"undeclared symbols {bad} in {p}")
        object.__setattr__(self, "_nonterminal_set", nts)
        object.__setattr__(self, "_terminal_set", ts)

    @classmethod
    def build(
        cls,
        productions: Iterable[tuple[str, str] | Production],
        axiom: str,
        nonterminals: Sequence[str] | None = None,
        terminals: Sequence[str] | None = None,
    ) -> "Grammar":
        """Convenience constructor from ``("S", "S a")`` pairs.

        Undeclared symbols are classified by appearance: anything occurring
        on a left-hand side (or the axiom) is a nonterminal, the rest are
        terminals.  Declared orders are kept; inferred symbols are appended
        in order of first appearance.
        """
        prods = [p if isinstance(p, Production) else Production.of(*p) for p in productions]
        nts = list(nonterminals or [])
        if axiom not in nts:
            nts.insert(0, axiom)
        for p in prods:
            for s in p.lhs:
                if s not in nts:
                    nts.append(s)
        ts = list(terminals or [])
        if terminals is None:
            for p in prods:
                for s in p.rhs:
                    if s not in nts and s not in ts:
                        ts.append(s)
        return cls(tuple(nts), tuple(ts), axiom, tuple(prods))

    @property
    def symbols(self) -> tuple[str, ...]:
        return self.nonterminals + self.terminals

    def is_terminal(self, sym: str) -> bool:
        return sym in self._terminal_set

    def is_nonterminal(self, sym: str) -> bool:
        return sym in self._nonterminal_set

    def terminal_part(self, w: CommutativeWord) -> CommutativeWord:
        return w.project(self._terminal_set)

    def nonterminal_part(self, w: CommutativeWord) -> CommutativeWord:
        return w.project(self._nonterminal_set)

    def productions_of(self, lhs: str) -> list[Production]:
        target = CommutativeWord({lhs: 1})
        return [p for p in self.productions if p.lhs == target]

    def canonical(self) -> "Grammar":
        """Same grammar with productions deduplicated and sorted."""
        prods = sorted(set(self.productions), key=lambda p: p.sort_key)
        return Grammar(self.nonterminals, self.terminals, self.axiom, tuple(prods))

    def with_axiom(self, axiom: str) -> "Grammar":
        return Grammar(self.nonterminals, self.terminals, axiom, self.productions)

    def __str__(self) -> str:
        from .textformat import dump_grammar

        return dump_grammar(self)


def size(g: Grammar) -> int:
    """Unary size ||G|| = |N| + |Sigma| + sum over productions of |V| + |W|."""
    return len(g.nonterminals) + len(g.terminals) + sum(p.lhs.length + p.rhs.length for p in g.productions)


def binary_size(g: Grammar) -> int:
    """Size with every multiplicity written in binary (one unit per symbol occurrence plus its bits)."""
    total = len(g.nonterminals) + len(g.terminals)
    for p in g.productions:
        for w in (p.lhs, p.rhs):
            total += sum(1 + bit_size(n) for _, n in w.items())
    return total


def classify(g: Grammar) -> GrammarClass:
    """All classes ``g`` belongs to, with the most restrictive one as primary."""
    regular = context_free = exp_sensitive = context_sensitive = True
    for p in g.productions:
        lhs_len = p.lhs.length
        if len(p.lhs) != 1:
            exp_sensitive = False
        if lhs_len != 1:
            context_free = regular = False
        if sum(n for s, n in p.rhs.items() if g.is_nonterminal(s)) > 1:
            regular = False
        if lhs_len < p.rhs.length:
            context_sensitive = False
    classes = {GrammarKind.TYPE0}
    if context_sensitive:
        classes.add(GrammarKind.CONTEXT_SENSITIVE)
    if exp_sensitive:
        classes.add(GrammarKind.EXPONENT_SENSITIVE)
    if context_free:
        classes.add(GrammarKind.CONTEXT_FREE)
    if regular:
        classes.add(GrammarKind.REGULAR)
    return GrammarClass(min(classes), frozenset(classes))


def require_context_free(g: Grammar, what: str) -> None:
    if not classify(g).is_context_free:
        raise GrammarError(f"{what} requires a context-free grammar")


def fresh_name(base: str, taken: set[str]) -> str:
    if base not in taken:
        return base
    k = 1
    while f"{base}~{k}" in taken:
        k += 1
    return f"{base}~{k}"


def binary_expand(g: Grammar, budget: int = 10_000) -> Grammar:
    """Encode every terminal multiplicity > 1 through doubling nonterminals.

    A terminal ``a`` with multiplicity ``k`` in some right-hand side is
    replaced, for each set bit ``e`` of ``k``, by ``a`` itself (``e = 0``) or
    two copies of a fresh ``D_{e-1}`` where ``D_e -> D_{e-1}^2`` and
    ``D_0 -> a``.  The doubling chains are shared between productions, so the
    unary size grows with the bit lengths of the multiplicities only.

    The result is context-free even when ``g`` is regular.  ``budget``
    bounds the number of fresh nonterminals.
    """
    require_context_free(g, "binary_expand")
    taken = set(g.symbols)
    chain: dict[tuple[str, int], str] = {}
    new_nts = list(g.nonterminals)
    extra: list[Production] = []

    def doubler(a: str, e: int) -> str:
        # D^a_e derives exactly a^(2^e)
        key = (a, e)
        if key in chain:
            return chain[key]
        if len(chain) >= budget:
            raise BudgetExceeded(f"binary_expand needs more than {budget} fresh nonterminals")
        name = fresh_name(f"bin.{a}.{e}", taken)
        taken.add(name)
        chain[key] = name
        new_nts.append(name)
        if e == 0:
            extra.append(Production(CommutativeWord({name: 1}), CommutativeWord({a: 1})))
        else:
            below = doubler(a, e - 1)
            extra.append(Production(CommutativeWord({name: 1}), CommutativeWord({below: 2})))
        return name

    prods = []
    for p in g.productions:
        rhs: dict[str, int] = {}
        for s, n in p.rhs.items():
            if g.is_terminal(s) and n > 1:
                for e in range(n.bit_length()):
                    if not (n >> e) & 1:
                        continue
                    if e == 0:
                        rhs[s] = rhs.get(s, 0) + 1
                    else:
                        d = doubler(s, e - 1)
                        rhs[d] = rhs.get(d, 0) + 2
            else:
                rhs[s] = rhs.get(s, 0) + n
        prods.append(Production(p.lhs, CommutativeWord(rhs)))
    return Grammar(tuple(new_nts), g.terminals, g.axiom, tuple(prods + extra))
