"""Derivation semantics, bounded exploration, the word problem, Parikh images and inclusion deciders.

Sentential forms are handled internally as integer tuples indexed by the
grammar's symbol order (nonterminals first, then terminals).  Because no
left-hand side contains a terminal, the terminal part of a form never
decreases along a derivation; every pruning rule below relies on that.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import product as cartesian
from typing import Iterable, Sequence

import networkx as nx

from .budget import Deadline, tick
from .core.grammar import Grammar, Production, classify, size
from .core.words import CommutativeWord
from .errors import BudgetExceeded, GrammarError, VerificationError
from .semilinear import LinearSet, SemiLinearSet, cone_coefficients, huynh_form, semilinear_inclusion, vector_size

log = logging.getLogger(__name__)

Form = tuple[int, ...]


@dataclass(frozen=True)
class EnumerationBudget:
    """Caps for bounded exploration.  ``None`` means uncapped.

    ``max_total_count`` bounds the terminal length of a form and
    ``max_symbol_count`` every single terminal count; both prune soundly for
    terminal words (terminal counts never decrease), so results under those
    caps alone are complete inside the box.  The other caps can lose words.
    """

    max_total_count: int | None = None
    max_forms: int | None = 1_000_000
    max_depth: int | None = None
    max_symbol_count: int | None = None
    max_nonterminals: int | None = None
    max_form_size: int | None = None

    def __post_init__(self):
        for name in ("max_total_count", "max_forms", "max_depth", "max_symbol_count", "max_nonterminals", "max_form_size"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise ValueError(f"{name} must be nonnegative")


@dataclass(frozen=True)
class Exploration:
    """Forms (or words) found by a bounded search.

    ``exhaustive``: nothing was pruned, the set is the full closure.
    ``complete_in_box``: only terminal caps pruned, so every terminal word
    within those caps is present.
    """

    items: frozenset
    exhaustive: bool
    complete_in_box: bool

    def __iter__(self):
        return iter(self.items)

    def __len__(self):
        return len(self.items)

    def __contains__(self, w):
        return w in self.items

    def sorted(self) -> list[CommutativeWord]:
        return sorted(self.items, key=lambda w: (w.length, w.items()))


class _Compiled:
    """Index-based view of a grammar used by all search loops."""

    def __init__(self, g: Grammar):
        self.g = g
        self.symbols = g.symbols
        self.index = {s: i for i, s in enumerate(self.symbols)}
        self.nN = len(g.nonterminals)
        self.dim = len(self.symbols)
        self.context_free = classify(g).is_context_free
        self.prods: list[tuple[int, tuple[tuple[int, int], ...], Form]] = []
        self.by_lhs: list[list[int]] = [[] for _ in range(self.nN)]
        for k, p in enumerate(g.productions):
            lhs = tuple((self.index[s], n) for s, n in p.lhs.items())
            delta = [0] * self.dim
            for i, n in lhs:
                delta[i] -= n
            for s, n in p.rhs.items():
                delta[self.index[s]] += n
            self.prods.append((k, lhs, tuple(delta)))
            if len(lhs) == 1 and lhs[0][1] == 1:
                self.by_lhs[lhs[0][0]].append(k)

    def vec(self, w: CommutativeWord) -> Form:
        v = [0] * self.dim
        for s, n in w.items():
            i = self.index.get(s)
            if i is None:
                raise GrammarError(f"symbol {s!r} is not in the grammar")
            v[i] = n
        return tuple(v)

    def word(self, v: Form) -> CommutativeWord:
        return CommutativeWord({self.symbols[i]: n for i, n in enumerate(v) if n})

    def terminal_word(self, v: Form) -> CommutativeWord:
        return CommutativeWord({self.symbols[i]: v[i] for i in range(self.nN, self.dim) if v[i]})

    def applicable(self, f: Form, leftmost: bool) -> Iterable[int]:
        if leftmost:
            for i in range(self.nN):
                if f[i]:
                    return self.by_lhs[i]
            return ()
        return [k for k, lhs, _ in self.prods if all(f[i] >= n for i, n in lhs)]

    def apply(self, f: Form, k: int) -> Form:
        return tuple(a + b for a, b in zip(f, self.prods[k][2]))

    def productive(self) -> list[bool]:
        """Nonterminals from which some terminal word is derivable (context-free grammars)."""
        ok = [False] * self.nN
        changed = True
        while changed:
            changed = False
            for k, lhs, delta in self.prods:
                i = lhs[0][0]
                if ok[i]:
                    continue
                rhs = self.g.productions[k].rhs
                if all(ok[self.index[s]] for s in rhs if self.g.is_nonterminal(s)):
                    ok[i] = changed = True
        return ok

    def min_yield(self) -> list[list[float]]:
        """Per nonterminal and terminal, the least count of that terminal in any word it derives."""
        INF = float("inf")
        T = self.dim - self.nN
        best = [[INF] * T for _ in range(self.nN)]
        changed = True
        while changed:
            changed = False
            for k, lhs, _ in self.prods:
                i = lhs[0][0]
                rhs = self.g.productions[k].rhs
                cand = [0] * T
                for s, n in rhs.items():
                    j = self.index[s]
                    if j >= self.nN:
                        cand[j - self.nN] += n
                    else:
                        for t in range(T):
                            cand[t] += n * best[j][t]
                for t in range(T):
                    if cand[t] < best[i][t]:
                        best[i][t] = cand[t]
                        changed = True
        return best


_CACHE: dict[int, tuple[Grammar, _Compiled]] = {}


def _compile(g: Grammar) -> _Compiled:
    hit = _CACHE.get(id(g))
    if hit is not None and hit[0] is g:
        return hit[1]
    cg = _Compiled(g)
    if len(_CACHE) > 64:
        _CACHE.clear()
    _CACHE[id(g)] = (g, cg)
    return cg


def _as_word(u) -> CommutativeWord:
    if isinstance(u, CommutativeWord):
        return u
    if isinstance(u, str):
        return CommutativeWord.parse(u)
    return CommutativeWord(u)


def step(u, g: Grammar) -> set[CommutativeWord]:
    """All E with u => E in one production application."""
    cg = _compile(g)
    f = cg.vec(_as_word(u))
    return {cg.word(cg.apply(f, k)) for k in cg.applicable(f, leftmost=False)}


def _form_key(f: Form):
    return (sum(f), f)


def _explore(
    cg: _Compiled,
    start: Form,
    budget: EnumerationBudget,
    leftmost: bool,
    prune_unproductive: bool,
    deadline: Deadline | None,
) -> tuple[set[Form], bool, bool]:
    nN = cg.nN
    alive = cg.productive() if prune_unproductive else None
    seen = {start}
    frontier = [start]
    exhaustive = complete = True
    depth = 0
    while frontier:
        if budget.max_depth is not None and depth >= budget.max_depth:
            if any(cg.applicable(f, leftmost) for f in frontier):
                exhaustive = complete = False
            break
        nxt = []
        for f in sorted(frontier, key=_form_key):
            for k in cg.applicable(f, leftmost):
                tick(deadline)
                h = cg.apply(f, k)
                if h in seen:
                    continue
                if alive is not None and any(h[i] and not alive[i] for i in range(nN)):
                    continue
                terminal_cap = (budget.max_total_count is not None and sum(h[nN:]) > budget.max_total_count) or (
                    budget.max_symbol_count is not None and max(h[nN:], default=0) > budget.max_symbol_count
                )
                if terminal_cap:
                    exhaustive = False
                    continue
                if (budget.max_nonterminals is not None and sum(h[:nN]) > budget.max_nonterminals) or (
                    budget.max_form_size is not None and sum(h) > budget.max_form_size
                ):
                    exhaustive = complete = False
                    continue
                if budget.max_forms is not None and len(seen) >= budget.max_forms:
                    exhaustive = complete = False
                    continue
                seen.add(h)
                nxt.append(h)
        frontier = nxt
        depth += 1
    return seen, exhaustive, complete


def reach_bounded(
    g: Grammar, start=None, budget: EnumerationBudget | None = None, deadline: Deadline | None = None
) -> Exploration:
    """Breadth-first closure of ``start`` (default: the axiom) under one-step derivation."""
    cg = _compile(g)
    budget = budget or EnumerationBudget()
    s = cg.vec(_as_word(start if start is not None else g.axiom))
    forms, ex, comp = _explore(cg, s, budget, leftmost=False, prune_unproductive=False, deadline=deadline)
    return Exploration(frozenset(cg.word(f) for f in forms), ex, comp)


def language_bounded(
    g: Grammar, start=None, budget: EnumerationBudget | None = None, deadline: Deadline | None = None
) -> Exploration:
    """Terminal words derivable from ``start`` within the budget.

    Context-free grammars are explored expanding only the first nonterminal
    of each form (in symbol order) with unproductive nonterminals discarded;
    both restrictions keep every terminal word reachable.
    """
    cg = _compile(g)
    budget = budget or EnumerationBudget()
    s = cg.vec(_as_word(start if start is not None else g.axiom))
    cf = cg.context_free
    forms, ex, comp = _explore(cg, s, budget, leftmost=cf, prune_unproductive=cf, deadline=deadline)
    words = frozenset(cg.word(f) for f in forms if not any(f[: cg.nN]))
    return Exploration(words, ex, comp)


# --- word problem ---------------------------------------------------------


@dataclass(frozen=True)
class TraceStep:
    production: Production
    form: CommutativeWord


@dataclass(frozen=True)
class MembershipResult:
    """``member`` with a derivation trace, or a refusal that is definitive only if ``exhaustive``."""

    member: bool
    exhaustive: bool
    start: CommutativeWord
    trace: tuple[TraceStep, ...] | None = None
    explored: int = 0

    def __bool__(self) -> bool:
        return self.member


def replay(g: Grammar, start: CommutativeWord, trace: Sequence[TraceStep]) -> CommutativeWord:
    """Apply the trace's productions in order, checking each intermediate form."""
    cur = start
    for st in trace:
        p = st.production
        if p not in g.productions:
            raise VerificationError(f"{p} is not a production of the grammar")
        if not p.lhs <= cur:
            raise VerificationError(f"{p} does not apply to {cur}")
        cur = cur - p.lhs + p.rhs
        if cur != st.form:
            raise VerificationError(f"trace form mismatch: {cur} vs {st.form}")
    return cur


def word_problem(
    g: Grammar,
    w,
    max_nonterminals: int | None = None,
    max_forms: int = 2_000_000,
    start=None,
    deadline: Deadline | None = None,
) -> MembershipResult:
    """Decide ``w in lan(g, start)``.

    Forms whose terminal part exceeds ``w`` anywhere are dropped.  For
    context-free grammars the search runs only over the *skeleton*: it
    expands the first nonterminal whose reachable sub-grammar is not regular
    and drops forms whose nonterminals must yield more of some terminal (or
    more letters) than ``w`` has left.  Once every remaining nonterminal is
    regular below, the rest of ``w`` is matched exactly against the sum of
    their Parikh images and the derivation is rebuilt from the coefficients.
    Forms with more than ``max_nonterminals`` nonterminals (default
    ``|w| + ||g||``) are dropped and make a negative answer non-exhaustive.
    """
    w = _as_word(w)
    start_word = _as_word(start if start is not None else g.axiom)
    cg = _compile(g)
    nN = cg.nN
    if any(not g.is_terminal(s) for s in w):
        return MembershipResult(False, True, start_word)
    target = cg.vec(w)[nN:]
    tlen = sum(target)
    cap = max_nonterminals if max_nonterminals is not None else tlen + size(g)
    cf = cg.context_free
    if cf:
        alive = cg.productive()
        my = cg.min_yield()
        ml = [sum(row) for row in my]
    s = cg.vec(start_word)
    parent: dict[Form, tuple[Form, int] | None] = {s: None}
    frontier = [s]
    exhaustive = True

    def feasible(h: Form) -> bool:
        rest = [target[t] - h[nN + t] for t in range(len(target))]
        if min(rest, default=0) < 0:
            return False
        if cf:
            need_len = 0
            for i in range(nN):
                if h[i]:
                    if not alive[i]:
                        return False
                    need_len += h[i] * ml[i]
            if need_len > sum(rest):
                return False
            for t, r in enumerate(rest):
                need = 0
                for i in range(nN):
                    if h[i]:
                        need += h[i] * my[i][t]
                if need > r:
                    return False
        return True

    def finish(f: Form, tail: list[int]) -> MembershipResult:
        steps = []
        cur = f
        while parent[cur] is not None:
            prev, k = parent[cur]
            steps.append(TraceStep(g.productions[k], cg.word(cur)))
            cur = prev
        steps.reverse()
        cur = f
        for k in tail:
            cur = cg.apply(cur, k)
            steps.append(TraceStep(g.productions[k], cg.word(cur)))
        return MembershipResult(True, True, start_word, tuple(steps), len(parent))

    if not feasible(s):
        return MembershipResult(False, True, start_word)
    goal = (0,) * nN + tuple(target)
    if not cf:
        while frontier and goal not in parent:
            nxt = []
            for f in sorted(frontier, key=_form_key):
                for k in cg.applicable(f, leftmost=False):
                    tick(deadline)
                    h = cg.apply(f, k)
                    if h in parent or not feasible(h):
                        continue
                    if sum(h[:nN]) > cap or len(parent) >= max_forms:
                        exhaustive = False
                        continue
                    parent[h] = (f, k)
                    nxt.append(h)
                    if h == goal:
                        break
                if goal in parent:
                    break
            frontier = nxt
        if goal not in parent:
            return MembershipResult(False, exhaustive, start_word, None, len(parent))
        return finish(goal, [])

    images = _RegularImages(cg, deadline)
    while frontier:
        nxt = []
        for f in sorted(frontier, key=_form_key):
            pick = images.skeleton_choice(f)
            if pick is None:
                tail = images.solve(f, target)
                if tail is not None:
                    return finish(f, tail)
                continue
            for k in cg.by_lhs[pick]:
                tick(deadline)
                h = cg.apply(f, k)
                if h in parent or not feasible(h):
                    continue
                if sum(h[:nN]) > cap or len(parent) >= max_forms:
                    exhaustive = False
                    continue
                parent[h] = (f, k)
                nxt.append(h)
        frontier = nxt
    return MembershipResult(False, exhaustive, start_word, None, len(parent))


# --- Parikh images of regular grammars ------------------------------------

Step = tuple[str, int]  # (state, production index)


class _TooManyComponents(BudgetExceeded):
    pass


@dataclass(frozen=True)
class _Component:
    """One linear component with the walk that realizes it.

    ``path`` is a simple accepting path, ``growth`` the cycles added to its
    base (in an order where each touches the states before it), and
    ``cycles[i]`` a cycle whose effect is ``periods[i]``.
    """

    base: Form
    periods: tuple[Form, ...]
    path: tuple[Step, ...]
    growth: tuple[tuple[Step, ...], ...]
    cycles: tuple[tuple[Step, ...], ...]

    def walk(self, lam: Sequence[int]) -> list[int]:
        """Production indices of an accepting walk with Parikh vector ``base + lam @ periods``."""
        walk = list(self.path)

        def insert(cyc: tuple[Step, ...], times: int) -> None:
            for pos, (st, _) in enumerate(walk):
                for r, (t, _) in enumerate(cyc):
                    if t == st:
                        walk[pos:pos] = list(cyc[r:] + cyc[:r]) * times
                        return
            raise VerificationError("cycle does not touch the walk")

        for cyc in self.growth:
            insert(cyc, 1)
        for cyc, n in zip(self.cycles, lam):
            if n:
                insert(cyc, n)
        return [k for _, k in walk]


def _regular_components(
    g: Grammar,
    axiom: str,
    alphabet: Sequence[str],
    max_components: int,
    deadline: Deadline | None,
) -> list[_Component]:
    dim = len(alphabet)
    pos = {a: i for i, a in enumerate(alphabet)}
    scope = {axiom}
    stack = [axiom]
    while stack:
        a = stack.pop()
        for p in g.productions:
            if p.lhs.get(a, 0) and p.lhs.length == 1:
                for s in p.rhs:
                    if g.is_nonterminal(s) and s not in scope:
                        scope.add(s)
                        stack.append(s)
    moves: dict[tuple[str, str], list[tuple[Form, int]]] = {}
    stops: dict[str, list[tuple[Form, int]]] = {}
    for k, p in enumerate(g.productions):
        if not any(s in scope for s in p.lhs):
            continue
        nts = [s for s in p.rhs if g.is_nonterminal(s)]
        if p.lhs.length != 1 or len(nts) > 1 or (nts and p.rhs.get(nts[0]) != 1):
            raise GrammarError(f"{p} is not a regular production")
        if any(g.is_terminal(s) and s not in pos for s in p.rhs):
            continue  # words using terminals outside the alphabet are dropped
        eff = [0] * dim
        for s, n in p.rhs.items():
            if s in pos:
                eff[pos[s]] += n
        (src,) = p.lhs.keys()
        if nts:
            moves.setdefault((src, nts[0]), []).append((tuple(eff), k))
        else:
            stops.setdefault(src, []).append((tuple(eff), k))

    # trim to states reachable from the axiom that can still terminate
    G = nx.DiGraph()
    G.add_nodes_from(sorted(scope))
    G.add_edges_from(sorted(moves))
    reach = nx.descendants(G, axiom) | {axiom}
    coreach = set()
    for f in stops:
        coreach |= nx.ancestors(G, f) | {f}
    live = reach & coreach
    if axiom not in live:
        return []
    D = G.subgraph(sorted(live)).copy()

    found: dict[tuple[frozenset, Form], tuple[Step, ...]] = {}
    for nodes in nx.simple_cycles(D):
        pairs = [(nodes[i], nodes[(i + 1) % len(nodes)]) for i in range(len(nodes))]
        for choice in cartesian(*(moves[p] for p in pairs)):
            tick(deadline)
            key = (frozenset(nodes), _vsum((e for e, _ in choice), dim))
            cyc = tuple((a, k) for (a, _), (_, k) in zip(pairs, choice))
            found[key] = min(found.get(key, cyc), cyc)
    cycles = sorted(found.items(), key=lambda c: (sorted(c[0][0]), c[0][1], c[1]))

    comps: dict[LinearSet, _Component] = {}

    def emit(states: frozenset, base: Form, path, growth) -> None:
        per: dict[Form, tuple[Step, ...]] = {}
        for (st, eff), cyc in cycles:
            if st & states and any(eff):
                per.setdefault(eff, cyc)
        L = LinearSet(base, tuple(per))
        if L not in comps:
            comps[L] = _Component(base, tuple(per), path, growth, tuple(per.values()))
            if len(comps) > max_components:
                raise _TooManyComponents(f"Parikh image exceeded {max_components} components")

    def grow(states: frozenset, base: Form, path, growth, used: frozenset, seen: set) -> None:
        key = (states, base)
        if key in seen:
            return
        seen.add(key)
        emit(states, base, path, growth)
        for idx, ((st, eff), cyc) in enumerate(cycles):
            if idx in used or not (st & states) or st <= states:
                continue
            tick(deadline)
            grow(states | st, _add(base, eff), path, growth + (cyc,), used | {idx}, seen)

    def paths(node: str, visited: list[str], eff: Form, steps: tuple[Step, ...]):
        for stop, k in stops.get(node, []):
            yield frozenset(visited), _add(eff, stop), steps + ((node, k),)
        for nb in D.successors(node):
            if nb in visited:
                continue
            for e, k in moves[(node, nb)]:
                yield from paths(nb, visited + [nb], _add(eff, e), steps + ((node, k),))

    for states, base, path in sorted(paths(axiom, [axiom], (0,) * dim, ()), key=lambda t: (sorted(t[0]), t[1], t[2])):
        grow(states, base, path, (), frozenset(), set())
    return list(comps.values())


class _RegularImages:
    """Per-nonterminal Parikh images for the nonterminals that are regular below."""

    MAX_COMPONENTS = 4096
    MAX_COMBOS = 4096

    def __init__(self, cg: _Compiled, deadline: Deadline | None):
        self.cg = cg
        self.deadline = deadline
        self.terms = cg.symbols[cg.nN :]
        self._comps: dict[int, list[_Component] | None] = {}
        self.regular = self._regular_below()

    def _regular_below(self) -> list[bool]:
        cg = self.cg
        g = cg.g
        succ: list[set[int]] = [set() for _ in range(cg.nN)]
        local = [True] * cg.nN
        for k, lhs, _ in cg.prods:
            i = lhs[0][0]
            rhs = g.productions[k].rhs
            nts = [cg.index[s] for s in rhs if g.is_nonterminal(s)]
            succ[i].update(nts)
            if len(nts) > 1 or (nts and rhs.get(cg.symbols[nts[0]]) != 1):
                local[i] = False
        out = []
        for i in range(cg.nN):
            seen, stack = {i}, [i]
            ok = True
            while stack and ok:
                a = stack.pop()
                ok = local[a]
                for b in succ[a]:
                    if b not in seen:
                        seen.add(b)
                        stack.append(b)
            out.append(ok)
        return out

    def components(self, i: int) -> list[_Component] | None:
        if i not in self._comps:
            try:
                self._comps[i] = _regular_components(
                    self.cg.g, self.cg.symbols[i], self.terms, self.MAX_COMPONENTS, self.deadline
                )
            except _TooManyComponents:
                self._comps[i] = None
        return self._comps[i]

    def skeleton_choice(self, f: Form) -> int | None:
        """The nonterminal to expand next, or None when ``f`` is solved directly."""
        first = None
        combos = 1
        for i in range(self.cg.nN):
            if not f[i]:
                continue
            if first is None:
                first = i
            if not self.regular[i] or self.components(i) is None:
                return i
            combos *= len(self.components(i)) ** f[i]
        return first if combos > self.MAX_COMBOS else None

    def solve(self, f: Form, target: Sequence[int]) -> list[int] | None:
        nN = self.cg.nN
        rest = tuple(t - x for t, x in zip(target, f[nN:]))
        occ = [i for i in range(nN) for _ in range(f[i])]
        for combo in cartesian(*(self.components(i) for i in occ)):
            tick(self.deadline)
            base = _vsum((c.base for c in combo), len(rest))
            if any(b > r for b, r in zip(base, rest)):
                continue
            periods = [p for c in combo for p in c.periods]
            lam = cone_coefficients(tuple(r - b for r, b in zip(rest, base)), periods, self.deadline)
            if lam is None:
                continue
            tail: list[int] = []
            at = 0
            for c in combo:
                tail += c.walk(lam[at : at + len(c.periods)])
                at += len(c.periods)
            return tail
        return None


def _vsum(vs: Iterable[Form], dim: int) -> Form:
    acc = [0] * dim
    for v in vs:
        for i, x in enumerate(v):
            acc[i] += x
    return tuple(acc)


def parikh_regular(
    g: Grammar,
    alphabet: Sequence[str] | None = None,
    verify: bool = True,
    verify_length: int | None = None,
    max_components: int = 200_000,
    deadline: Deadline | None = None,
) -> SemiLinearSet:
    """Exact Parikh image of a regular grammar as a semilinear set.

    Nonterminals are automaton states.  Every accepting walk decomposes into
    a simple path ending in a terminating production plus simple cycles
    that, together with the path, form a connected set of states.  For each
    simple path and each way of growing its state set by cycles that touch
    it, the component is: path effect + the growing cycles' effects as base,
    and the effects of all cycles touching the final state set as periods.

    With ``verify``, the result is compared against ``language_bounded`` for
    all words up to ``verify_length`` (default: longest base + twice the
    longest period + 2).
    """
    if not classify(g).is_regular:
        raise GrammarError("parikh_regular requires a regular grammar")
    alphabet = tuple(alphabet) if alphabet is not None else g.terminals
    comps = _regular_components(g, g.axiom, alphabet, max_components, deadline)
    result = SemiLinearSet(len(alphabet), tuple(dict.fromkeys(LinearSet(c.base, c.periods) for c in comps)))
    if verify:
        _verify_parikh(g, alphabet, result, verify_length, deadline)
    return result


def _add(u: Form, v: Form) -> Form:
    return tuple(a + b for a, b in zip(u, v))


def default_verify_length(M: SemiLinearSet) -> int:
    base = max((sum(c.base) for c in M.components), default=0)
    per = max((sum(p) for c in M.components for p in c.periods), default=0)
    return base + 2 * per + 2


def _verify_parikh(g: Grammar, alphabet, M: SemiLinearSet, length: int | None, deadline) -> None:
    L = default_verify_length(M) if length is None else length
    lang = language_bounded(g, budget=EnumerationBudget(max_total_count=L, max_forms=None), deadline=deadline)
    words = {w.to_vector(alphabet) for w in lang if set(w) <= set(alphabet)}
    points = M.points_up_to_length(L)
    if words != points:
        diff = sorted(words ^ points)[:5]
        raise VerificationError(f"Parikh image disagrees with enumeration up to length {L}: {diff}")


# --- inclusion deciders ---------------------------------------------------


@dataclass(frozen=True)
class InclusionVerdict:
    """Result of a bounded inclusion check ``lan(g) <= lan(h)``.

    ``included`` without ``exhaustive`` is relative to the bounds used.
    ``undecided`` counts words of ``lan(g)`` whose membership in ``h`` could
    not be settled within budget.
    """

    included: bool
    exhaustive: bool
    method: str
    counterexample: CommutativeWord | None = None
    trace: tuple[TraceStep, ...] | None = None
    undecided: tuple[CommutativeWord, ...] = ()
    checked: int = 0
    details: dict = field(default_factory=dict)

    @property
    def inconclusive(self) -> bool:
        return self.counterexample is None and bool(self.undecided)


def decide_inclusion_bruteforce(
    g: Grammar,
    h: Grammar,
    budget: EnumerationBudget | None = None,
    membership_forms: int = 200_000,
    deadline: Deadline | None = None,
) -> InclusionVerdict:
    """Enumerate ``lan(g)`` within ``budget`` and check every word against ``h``, shortest first."""
    budget = budget or EnumerationBudget(max_total_count=12)
    lang = language_bounded(g, budget=budget, deadline=deadline)
    undecided = []
    checked = 0
    for w in lang.sorted():
        checked += 1
        r = word_problem(h, w, max_forms=membership_forms, deadline=deadline)
        if r.member:
            continue
        if not r.exhaustive:
            undecided.append(w)
            continue
        witness = word_problem(g, w, max_forms=membership_forms, deadline=deadline)
        return InclusionVerdict(False, True, "brute", w, witness.trace, tuple(undecided), checked)
    return InclusionVerdict(
        True, lang.exhaustive and not undecided, "brute", None, None, tuple(undecided), checked,
        {"complete_in_box": lang.complete_in_box, "words": len(lang)},
    )


def decide_inclusion_semilinear(
    g: Grammar,
    h: Grammar,
    witness_bit_bound: int = 8,
    parikh_g: SemiLinearSet | None = None,
    parikh_h: SemiLinearSet | None = None,
    verify: bool = True,
    deadline: Deadline | None = None,
) -> InclusionVerdict:
    """Inclusion of Parikh images through Huynh form and bit-bounded witness search.

    Both grammars must be regular unless their semilinear images (over the
    union of the two terminal alphabets, ``g``'s terminals first) are given.
    """
    alphabet = tuple(dict.fromkeys(g.terminals + h.terminals))
    M = parikh_g if parikh_g is not None else _parikh_or_fail(g, alphabet, verify, deadline)
    N = parikh_h if parikh_h is not None else _parikh_or_fail(h, alphabet, verify, deadline)
    M_h = huynh_form(M, verify=verify, deadline=deadline)
    N_h = huynh_form(N, verify=verify, deadline=deadline)
    res = semilinear_inclusion(M_h, N_h, witness_bit_bound, deadline)
    details = {"bound": witness_bit_bound, "size_M": M.size, "size_N": N.size, "candidates": res.candidates}
    if res.included:
        return InclusionVerdict(True, res.exhaustive, "semilinear", checked=res.candidates, details=details)
    w = CommutativeWord.from_vector(alphabet, res.witness)
    trace = word_problem(g, w, deadline=deadline).trace if classify(g).is_context_free else None
    details["witness_bits"] = vector_size(res.witness)
    return InclusionVerdict(False, True, "semilinear", w, trace, (), res.candidates, details)


def _parikh_or_fail(g: Grammar, alphabet, verify, deadline) -> SemiLinearSet:
    if not classify(g).is_regular:
        raise GrammarError("semilinear inclusion needs regular grammars or precomputed Parikh images")
    return parikh_regular(g, alphabet=alphabet, verify=verify, deadline=deadline)


@dataclass(frozen=True)
class EquivalenceVerdict:
    forward: InclusionVerdict
    backward: InclusionVerdict

    @property
    def equivalent(self) -> bool:
        return self.forward.included and self.backward.included

    @property
    def exhaustive(self) -> bool:
        if not self.equivalent:
            return True
        return self.forward.exhaustive and self.backward.exhaustive

    @property
    def inconclusive(self) -> bool:
        return self.equivalent and (self.forward.inconclusive or self.backward.inconclusive)


def decide_equivalence(g: Grammar, h: Grammar, method: str = "brute", **kw) -> EquivalenceVerdict:
    decide = {"brute": decide_inclusion_bruteforce, "semilinear": decide_inclusion_semilinear}[method]
    fwd = decide(g, h, **kw)
    if not fwd.included:
        return EquivalenceVerdict(fwd, fwd.__class__(True, False, method, details={"skipped": True}))
    return EquivalenceVerdict(fwd, decide(h, g, **kw))
