"""Compile a Pi_2 sentence into commutative grammar inclusion/equivalence instances.

Terminals are ``t1+, t1-, ..., tk+, tk-``.  Nonterminals carry a namespace
prefix per component: ``g.`` for G, ``h.`` for H, ``e.`` for the shared
axiom of the equivalence pair, ``gr.``/``hr.``/``hreg.``/``c.l.``/``c.r.``
for the regular pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from ..core.grammar import Grammar, Production, binary_expand, binary_size, classify, size
from ..core.words import CommutativeWord
from ..errors import GrammarError
from .formula import And, FormulaLength, Leaf, Matrix, Or, Pi2Sentence, child, formula_length, nodes, show

G_AXIOM, G_X = "g.S", "g.X"
H_AXIOM, H_Y, H_I = "h.S", "h.Y", "h.I"
E_AXIOM = "e.S"


def compute_c(phi_or_length: Pi2Sentence | int) -> int:
    """Least power of two >= L^(3L+2) * 2^L for L = |phi|."""
    L = phi_or_length if isinstance(phi_or_length, int) else formula_length(phi_or_length).value
    if L < 1:
        raise ValueError("formula length must be positive")
    bound = L ** (3 * L + 2) << L
    return 1 << (bound - 1).bit_length()


def is_power_of_two(c: int) -> bool:
    return c >= 1 and c & (c - 1) == 0


def _word(d: dict) -> CommutativeWord:
    return CommutativeWord({k: v for k, v in d.items() if v})


def u_vector(phi: Pi2Sentence, c: int = 0) -> CommutativeWord:
    """(z1+, z1-, ..., zk+, zk-) plus ``c`` on every coordinate."""
    d = {}
    for t in phi.atoms:
        d[t.plus], d[t.minus] = t.z_pos + c, t.z_neg + c
    return _word(d)


def v_vector(phi: Pi2Sentence, j: int, c: int = 0) -> CommutativeWord:
    """(a+_{1,j}, a-_{1,j}, ...) for universal j (1-based), plus ``c`` everywhere."""
    d = {}
    for t in phi.atoms:
        d[t.plus], d[t.minus] = t.a_pos[j - 1] + c, t.a_neg[j - 1] + c
    return _word(d)


def w_vector(phi: Pi2Sentence, j: int) -> CommutativeWord:
    d = {}
    for t in phi.atoms:
        d[t.plus], d[t.minus] = t.b_pos[j - 1], t.b_neg[j - 1]
    return _word(d)


def _nt(sym: str) -> CommutativeWord:
    return CommutativeWord({sym: 1})


def _prod(lhs: str, *parts) -> Production:
    rhs = CommutativeWord()
    for p in parts:
        rhs = rhs + (p if isinstance(p, CommutativeWord) else _nt(p))
    return Production(_nt(lhs), rhs)


def build_G(phi: Pi2Sentence, c: int, binary: bool = False) -> Grammar:
    """S_G -> X c^ u,  X -> X c^ v_j (1 <= j <= m),  X -> eps."""
    if c < 1:
        raise ValueError("c must be positive")
    prods = [_prod(G_AXIOM, G_X, u_vector(phi, c))]
    prods += [_prod(G_X, G_X, v_vector(phi, j, c)) for j in range(1, phi.m + 1)]
    prods.append(_prod(G_X))
    g = Grammar((G_AXIOM, G_X), phi.terminals, G_AXIOM, tuple(prods))
    return binary_expand(g) if binary else g


def F(path: str) -> str:
    return f"h.F@{path}"


def R(path: str) -> str:
    return f"h.R@{path}"


def _F_productions(psi: Matrix) -> tuple[list[str], list[Production]]:
    nts: list[str] = []
    prods: list[Production] = []
    for path, node in nodes(psi):
        nts += [F(path), R(path)]
        if isinstance(node, Leaf):
            t = node.atom
            prods.append(_prod(F(path)))
            prods.append(_prod(R(path)))
            prods.append(_prod(R(path), R(path), _nt(f"t{t}+")))
            prods.append(_prod(R(path), R(path), _nt(f"t{t}-")))
            continue
        l, r = child(path, 0), child(path, 1)
        if isinstance(node, And):
            prods.append(_prod(F(path), F(l), F(r)))
        else:
            prods.append(_prod(F(path), F(l), R(r)))
            prods.append(_prod(F(path), R(l), F(r)))
            prods.append(_prod(F(path), F(l), F(r)))
        prods.append(_prod(R(path), R(l), R(r)))
    return nts, prods


def build_H(phi: Pi2Sentence) -> Grammar:
    """S_H -> Y F_psi I with the Y, F, R and I gadgets.

    ``F_gamma``/``R_gamma`` are named by syntax-tree position (``h.F@/0/1``).
    """
    f_nts, f_prods = _F_productions(phi.matrix)
    prods = [_prod(H_AXIOM, H_Y, F("/"), H_I)]
    prods += [_prod(H_Y, H_Y, w_vector(phi, j)) for j in range(1, phi.n + 1)]
    prods.append(_prod(H_Y))
    prods += f_prods
    prods.append(_prod(H_I))
    for t in phi.atoms:
        prods.append(_prod(H_I, H_I, _nt(t.plus), _nt(t.minus)))
        prods.append(_prod(H_I, H_I, _nt(t.plus)))
    return Grammar((H_AXIOM, H_Y, H_I, *f_nts), phi.terminals, H_AXIOM, tuple(prods))


def build_equiv_pair(G: Grammar, H: Grammar) -> tuple[Grammar, Grammar]:
    """G^e = P_G + P_H + {S -> S_G, S -> S_H};  H^e = P_H + {S -> S_G, S -> X S_H, X -> eps}."""
    if set(G.nonterminals) & set(H.nonterminals) or E_AXIOM in G.nonterminals + H.nonterminals:
        raise GrammarError("nonterminal namespaces of G and H collide")
    nts = (E_AXIOM,) + G.nonterminals + H.nonterminals
    ge = G.productions + H.productions + (_prod(E_AXIOM, G.axiom), _prod(E_AXIOM, H.axiom))
    he = H.productions + (_prod(E_AXIOM, G.axiom), _prod(E_AXIOM, G_X, H.axiom), _prod(G_X))
    return Grammar(nts, G.terminals, E_AXIOM, ge), Grammar(nts, H.terminals, E_AXIOM, he)


@dataclass(frozen=True)
class ReductionArtifacts:
    """Everything compiled from one sentence.

    ``certified`` is false when ``c`` was overridden: then only the
    inclusion-implies-validity direction is guaranteed.  The regular pair is
    built on first access (its size grows quadratically in log2 c).
    """

    sentence: Pi2Sentence
    c: int
    certified: bool
    length: FormulaLength
    G: Grammar
    H: Grammar
    G_e: Grammar
    H_e: Grammar
    binary: bool = False

    @property
    def alphabet(self) -> tuple[str, ...]:
        return self.sentence.terminals

    @property
    def j(self) -> int | None:
        return self.c.bit_length() - 1 if is_power_of_two(self.c) else None

    @cached_property
    def regular(self):
        from .regular import build_regular_pair

        return build_regular_pair(self.sentence, self.c)

    @property
    def G_r(self) -> Grammar:
        return self.regular.G_r

    @property
    def H_r(self) -> Grammar:
        return self.regular.H_r

    @property
    def H_reg(self) -> Grammar:
        return self.regular.H_reg

    def gadget_axioms(self) -> dict:
        out = {"G": G_AXIOM, "X": G_X, "H": H_AXIOM, "Y": H_Y, "F_psi": F("/"), "I": H_I, "equiv": E_AXIOM}
        if "regular" in self.__dict__:
            out.update(self.regular.axioms)
        return out

    def manifest(self, include_regular: bool = False) -> dict:
        grammars = {"G": self.G, "H": self.H, "G_e": self.G_e, "H_e": self.H_e}
        if include_regular:
            grammars.update({"G_r": self.G_r, "H_r": self.H_r})
        L = self.length
        return {
            "c": str(self.c),
            "j": self.j,
            "certified": self.certified,
            "binary": self.binary,
            "alphabet": list(self.alphabet),
            "formula_length": {
                "value": L.value,
                "raw": L.raw,
                "padded": L.value != L.raw,
                "nodes": L.nodes,
                "constants": L.constants,
                "occurrences": L.occurrences,
                "declarations": L.declarations,
            },
            "m": self.sentence.m,
            "n": self.sentence.n,
            "k": self.sentence.k,
            "matrix": show(self.sentence.matrix),
            "paths": {p: show(node) for p, node in nodes(self.sentence.matrix)},
            "sizes": {name: str(size(g)) for name, g in grammars.items()},
            "binary_sizes": {name: binary_size(g) for name, g in grammars.items()},
            "classes": {name: classify(g).primary.label for name, g in grammars.items()},
            "gadget_axioms": self.gadget_axioms(),
        }


def universal_values(art: ReductionArtifacts, trace) -> tuple[int, ...]:
    """The ``x`` encoded by a derivation in G: how often each loop ``X -> X c^ v_j`` was used."""
    if art.binary:
        raise ValueError("x is only read off derivations of the non-expanded G")
    loops = {p: j for j, p in enumerate(art.G.productions[1 : 1 + art.sentence.m])}
    x = [0] * art.sentence.m
    for st in trace:
        j = loops.get(st.production)
        if j is not None:
            x[j] += 1
    return tuple(x)


def compile_sentence(phi: Pi2Sentence, c_override: int | None = None, binary: bool = False) -> ReductionArtifacts:
    length = formula_length(phi)
    c = compute_c(length.value) if c_override is None else int(c_override)
    if c < 1:
        raise ValueError("c must be positive")
    G = build_G(phi, c, binary=binary)
    H = build_H(phi)
    G_e, H_e = build_equiv_pair(G, H)
    return ReductionArtifacts(phi, c, c_override is None, length, G, H, G_e, H_e, binary)


compile = compile_sentence
