"""Line-oriented grammar text format.

::

    # comment
    terminals a b
    nonterminals S X
    axiom S
    S -> X a^2 | eps
    X^2 -> b

Each side of a production is a whitespace-separated list of ``sym`` or
``sym^k``; ``eps`` is the empty word and ``|`` separates alternatives.
"""

from __future__ import annotations

from ..errors import GrammarError, ParseError
from .grammar import Grammar, Production
from .words import CommutativeWord

_HEADERS = ("terminals", "nonterminals", "axiom")


def parse_grammar(text: str) -> Grammar:
    terminals: list[str] = []
    nonterminals: list[str] = []
    axiom = None
    prods: list[Production] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        if head in _HEADERS and "->" not in line:
            names = rest.split()
            if head == "terminals":
                terminals.extend(names)
            elif head == "nonterminals":
                nonterminals.extend(names)
            else:
                if len(names) != 1 or axiom is not None:
                    raise ParseError(f"line {lineno}: exactly one axiom expected")
                axiom = names[0]
            continue
        if line.count("->") != 1:
            raise ParseError(f"line {lineno}: expected 'LHS -> RHS', got {raw!r}")
        lhs_text, rhs_text = line.split("->")
        try:
            lhs = CommutativeWord.parse(lhs_text)
            for alt in rhs_text.split("|"):
                prods.append(Production(lhs, CommutativeWord.parse(alt)))
        except (ValueError, GrammarError) as exc:
            raise ParseError(f"line {lineno}: {exc}") from exc
    if axiom is None:
        raise ParseError("missing 'axiom' line")
    if not nonterminals:
        nonterminals = [axiom]
    try:
        return Grammar(tuple(nonterminals), tuple(terminals), axiom, tuple(prods))
    except GrammarError as exc:
        raise ParseError(str(exc)) from exc


def load_grammar(path) -> Grammar:
    with open(path, encoding="utf-8") as fh:
        return parse_grammar(fh.read())


def dump_grammar(g: Grammar, group: bool = True) -> str:
    """Serialize ``g``; alternatives for the same left-hand side share a line when ``group``."""
    order = g.symbols
    lines = [
        "terminals " + " ".join(g.terminals) if g.terminals else "terminals",
        "nonterminals " + " ".join(g.nonterminals),
        f"axiom {g.axiom}",
    ]
    rows: dict[str, list[str]] = {}
    for p in g.productions:
        rows.setdefault(p.lhs.format(order), []).append(p.rhs.format(order))
    for lhs, rhss in rows.items():
        if group:
            lines.append(f"{lhs} -> {' | '.join(rhss)}")
        else:
            lines.extend(f"{lhs} -> {r}" for r in rhss)
    return "\n".join(lines) + "\n"
