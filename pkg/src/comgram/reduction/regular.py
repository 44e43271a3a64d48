"""Regular counterparts: serialized F_psi, the doubling gadgets and the pair G^r / H^r."""

from __future__ import annotations

from dataclasses import dataclass

from ..core.grammar import Grammar, Production
from ..core.words import CommutativeWord
from ..errors import GrammarError
from .compiler import _nt, _prod, is_power_of_two, u_vector, v_vector, w_vector
from .formula import And, Leaf, Matrix, Pi2Sentence, child, leaves

HREG = "hreg."


def gamma_alphabet(i: int) -> tuple[str, ...]:
    """p0, pbar1, p1, ..., pbar_i, p_i."""
    out = ["p0"]
    for j in range(1, i + 1):
        out += [f"pbar{j}", f"p{j}"]
    return tuple(out)


def p(j: int) -> str:
    return f"p{j}"


def pbar(j: int) -> str:
    return f"pbar{j}"


def T_gamma(gamma: Matrix) -> list[str]:
    """t_i+ and t_i- for every atom occurring in ``gamma``."""
    out: list[str] = []
    for i in sorted(set(leaves(gamma))):
        out += [f"t{i}+", f"t{i}-"]
    return out


# --- F_psi as an automaton ------------------------------------------------


@dataclass(frozen=True)
class RegularFragment:
    """Regular productions with a designated entry nonterminal.

    Accepting states either derive ``eps`` or hand over to ``exit_to``.
    """

    nonterminals: tuple[str, ...]
    productions: tuple[Production, ...]
    entry: str
    accepting: tuple[str, ...]


def _F_nfa(psi: Matrix):
    edges: list[tuple[str, str | None, str]] = []

    def eps(a, b):
        edges.append((a, None, b))

    def F(node, path, src, dst):
        if isinstance(node, Leaf):
            eps(src, dst)
        elif isinstance(node, And):
            mid = f"F@{path}~m"
            F(node.left, child(path, 0), src, mid)
            F(node.right, child(path, 1), mid, dst)
        else:
            m1, m2 = f"F@{path}~m1", f"F@{path}~m2"
            F(node.left, child(path, 0), src, m1)
            R(node.right, child(path, 1), m1, dst)
            eps(m1, m2)
            R(node.left, child(path, 0), src, m2)
            F(node.right, child(path, 1), m2, dst)

    def R(node, path, src, dst):
        loop = f"R@{path}"
        eps(src, loop)
        for t in T_gamma(node):
            edges.append((loop, t, loop))
        eps(loop, dst)

    entry, exit_ = "F@/", "F@/~out"
    F(psi, "/", entry, exit_)
    return entry, exit_, edges


def regularize_F(psi: Matrix, prefix: str = HREG, exit_to: str | None = None) -> RegularFragment:
    """Serialize the F_psi gadget into a regular fragment.

    The automaton is built by rewriting one F-labelled transition at a time
    (conjunction: sequence; disjunction: the three paths F R, F F, R F
    through two middle states; leaf: epsilon; R_gamma: a state looping on
    T_gamma between epsilon edges).  Epsilon edges are then removed by
    closure, leaving one nonterminal per reachable state.
    """
    entry, exit_, edges = _F_nfa(psi)
    eps_out: dict[str, list[str]] = {}
    moves: dict[str, list[tuple[str, str]]] = {}
    for a, lab, b in edges:
        if lab is None:
            eps_out.setdefault(a, []).append(b)
        else:
            moves.setdefault(a, []).append((lab, b))

    def closure(s: str) -> list[str]:
        seen, stack = [s], [s]
        while stack:
            for b in eps_out.get(stack.pop(), []):
                if b not in seen:
                    seen.append(b)
                    stack.append(b)
        return seen

    order: list[str] = [entry]
    prods: dict[Production, None] = {}
    accepting: list[str] = []
    k = 0
    while k < len(order):
        s = order[k]
        k += 1
        cl = closure(s)
        if exit_ in cl:
            accepting.append(s)
        for u in cl:
            for lab, b in moves.get(u, []):
                if b not in order:
                    order.append(b)
                prods.setdefault(_prod(prefix + s, prefix + b, _nt(lab)))
    for s in accepting:
        prods.setdefault(_prod(prefix + s, exit_to) if exit_to else _prod(prefix + s))
    return RegularFragment(tuple(prefix + s for s in order), tuple(prods), prefix + entry, tuple(prefix + s for s in accepting))


def regular_F_grammar(phi: Pi2Sentence, prefix: str = HREG) -> Grammar:
    frag = regularize_F(phi.matrix, prefix)
    return Grammar(frag.nonterminals, phi.terminals, frag.entry, frag.productions)


def build_H_regular(phi: Pi2Sentence, prefix: str = HREG) -> Grammar:
    """Regular H: S_H -> Y, Y -> Y w_j | eps | F_psi, accepting F states -> I, I as before."""
    S, Y, I = prefix + "S", prefix + "Y", prefix + "I"
    frag = regularize_F(phi.matrix, prefix, exit_to=I)
    prods = [_prod(S, Y)]
    prods += [_prod(Y, Y, w_vector(phi, j)) for j in range(1, phi.n + 1)]
    prods.append(_prod(Y))
    prods.append(_prod(Y, frag.entry))
    prods += frag.productions
    prods.append(_prod(I))
    for t in phi.atoms:
        prods.append(_prod(I, I, _nt(t.plus), _nt(t.minus)))
        prods.append(_prod(I, I, _nt(t.plus)))
    return Grammar((S, Y, I) + frag.nonterminals, phi.terminals, S, tuple(prods))


# --- doubling gadgets -----------------------------------------------------


@dataclass(frozen=True)
class CGadgets:
    C_l: Grammar
    C_r: Grammar
    C_l_sigma: Grammar
    C_r_sigma: Grammar


def _word(*syms: str) -> CommutativeWord:
    return CommutativeWord(list(syms))


def build_C_l(i: int, sigma: tuple[str, ...] = (), prefix: str = "c.l.") -> Grammar:
    """S -> eps | S p0 | S pbar_j p_j p_j (1 <= j <= i); with ``sigma``, the j = i production
    also emits two copies of every symbol of ``sigma``."""
    if i < 1:
        raise ValueError("the doubling gadgets need i >= 1")
    S = prefix + "S"
    prods = [_prod(S), _prod(S, S, _word(p(0)))]
    for j in range(1, i + 1):
        rhs = _word(pbar(j), p(j), p(j))
        if j == i and sigma:
            rhs = rhs + CommutativeWord({s: 2 for s in sigma})
        prods.append(_prod(S, S, rhs))
    return Grammar((S,), tuple(sigma) + gamma_alphabet(i), S, tuple(prods))


def build_C_r(i: int, sigma: tuple[str, ...] = (), prefix: str = "c.r.") -> Grammar:
    """Words with w(p_j) != w(pbar_{j+1}) for some 0 <= j < i; with ``sigma``, free loops on it everywhere."""
    if i < 1:
        raise ValueError("the doubling gadgets need i >= 1")
    S = prefix + "S"

    def N(j):
        return f"{prefix}N{j}"

    def Nbar(j):
        return f"{prefix}Nbar{j}"

    nts = [S]
    prods = [_prod(S, S, _word(p(i)))]
    for j in range(i):
        nts += [N(j), Nbar(j + 1)]
        prods.append(_prod(S, N(j), _word(p(j))))
        prods.append(_prod(S, Nbar(j + 1), _word(pbar(j + 1))))
        for A, own in ((N(j), p(j)), (Nbar(j + 1), pbar(j + 1))):
            prods.append(_prod(A, A, _word(own)))
            prods.append(_prod(A, A, _word(p(j), pbar(j + 1))))
            for g in range(i):
                if g != j:
                    prods.append(_prod(A, A, _word(p(g))))
                    prods.append(_prod(A, A, _word(pbar(g + 1))))
            prods.append(_prod(A))
    for A in nts:
        for s in sigma:
            prods.append(_prod(A, A, _word(s)))
    return Grammar(tuple(nts), tuple(sigma) + gamma_alphabet(i), S, tuple(prods))


def build_C_gadgets(i: int, sigma: tuple[str, ...] = ()) -> CGadgets:
    return CGadgets(build_C_l(i), build_C_r(i), build_C_l(i, sigma), build_C_r(i, sigma))


# --- assembly -------------------------------------------------------------


@dataclass(frozen=True)
class RegularPair:
    G_r: Grammar
    H_r: Grammar
    H_reg: Grammar
    j: int
    axioms: dict


def build_regular_pair(phi: Pi2Sentence, c: int) -> RegularPair:
    """G^r: S -> X p0 u, X -> X p0 v_j, X -> C_l^Sigma;  H^r: S -> C_r^Sigma | H_reg padded with Gamma_j loops."""
    if not is_power_of_two(c) or c < 2:
        raise GrammarError(f"the regular pair needs c to be a power of two >= 2, got {c}")
    j = c.bit_length() - 1
    sigma = phi.terminals
    gam = gamma_alphabet(j)
    Cl = build_C_l(j, sigma)
    Cr = build_C_r(j, sigma)
    S, X = "gr.S", "gr.X"
    prods = [_prod(S, X, _word(p(0)) + u_vector(phi))]
    prods += [_prod(X, X, _word(p(0)) + v_vector(phi, k)) for k in range(1, phi.m + 1)]
    prods.append(_prod(X, Cl.axiom))
    prods += Cl.productions
    G_r = Grammar((S, X) + Cl.nonterminals, sigma + gam, S, tuple(prods))

    H_reg = build_H_regular(phi)
    HS = "hr.S"
    prods = [_prod(HS, Cr.axiom), _prod(HS, H_reg.axiom)]
    prods += Cr.productions
    prods += H_reg.productions
    prods += [_prod(H_reg.axiom, H_reg.axiom, _word(g)) for g in gam]
    H_r = Grammar((HS,) + Cr.nonterminals + H_reg.nonterminals, sigma + gam, HS, tuple(prods))
    axioms = {"G_r": S, "H_r": HS, "C_l_sigma": Cl.axiom, "C_r_sigma": Cr.axiom, "H_reg": H_reg.axiom}
    return RegularPair(G_r, H_r, H_reg, j, axioms)
