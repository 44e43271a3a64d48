import itertools
import random

import pytest
from gen import random_sentence
from hypothesis import given, settings
from oracles import c_for_length, refute_on_box, skeleton_holds
from strategies import sentences

from comgram import CommutativeWord, GrammarKind, classify
from comgram.core.petri import reachable_markings, to_petri_net
from comgram.engine import (
    EnumerationBudget,
    decide_inclusion_bruteforce,
    language_bounded,
    reach_bounded,
    replay,
    word_problem,
)
from comgram.errors import FormulaError, GrammarError
from comgram.reduction import (
    And,
    Leaf,
    Or,
    build_C_l,
    build_C_r,
    build_equiv_pair,
    build_G,
    build_H,
    build_regular_pair,
    compile_sentence,
    compute_c,
    dnf,
    eval_matrix,
    format_formula,
    formula_length,
    gamma_alphabet,
    parse_formula,
    regular_F_grammar,
    subst_bool,
    universal_values,
    validity_bounded,
)

W = CommutativeWord


def sentence(body, xs="x", ys="y"):
    return parse_formula(f"(forall ({xs}) (exists ({ys}) {body}))")


def g_word(phi, c, x):
    """The word of L(G) that encodes the universal values ``x``."""
    d = {}
    for t in phi.atoms:
        d[t.plus] = c * (1 + sum(x)) + t.z_pos + sum(a * v for a, v in zip(t.a_pos, x))
        d[t.minus] = c * (1 + sum(x)) + t.z_neg + sum(a * v for a, v in zip(t.a_neg, x))
    return W(d)


def h_member(phi, w, y_box):
    """w in L(H) iff some y leaves a nonnegative rest r whose atoms with r+ >= r- satisfy psi."""
    for y in itertools.product(range(y_box + 1), repeat=phi.n):
        r = {}
        for t in phi.atoms:
            r[t.index] = (
                w[t.plus] - sum(b * v for b, v in zip(t.b_pos, y)),
                w[t.minus] - sum(b * v for b, v in zip(t.b_neg, y)),
            )
        if any(p < 0 or q < 0 for p, q in r.values()):
            continue
        if subst_bool(phi.matrix, {i: int(p >= q) for i, (p, q) in r.items()}):
            return True
    return False


def existential_values(phi, H, trace):
    loops = {p: j for j, p in enumerate(H.productions[1 : 1 + phi.n])}
    y = [0] * phi.n
    for st in trace:
        if st.production in loops:
            y[loops[st.production]] += 1
    return tuple(y)


# --- parsing and evaluation -----------------------------------------------------


def test_parse_running_example(evenodd):
    phi = evenodd
    assert (phi.m, phi.n, phi.k) == (1, 1, 4)
    got = [(t.a, t.b, t.z) for t in phi.atoms]
    assert got == [((1,), (2,), 0), ((-1,), (-2,), 0), ((1,), (2,), 1), ((-1,), (-2,), -1)]
    assert phi.matrix == Or(And(Leaf(1), Leaf(2)), And(Leaf(3), Leaf(4)))
    assert phi.leaves_distinct


def test_parse_normalizes_sides():
    (t,) = sentence("(>= (+ x (* -2 y) 3) 0)").atoms
    assert (t.z_pos, t.a_pos, t.b_pos) == (3, (1,), (2,))
    (t,) = sentence("(<= (* 3 y) (- x 2))").atoms
    assert (t.a, t.b, t.z) == ((1,), (3,), -2)


def test_parse_equality_and_variadic():
    phi = sentence("(and (= x (* 2 y)) (>= x 0) (>= y 0))")
    assert phi.k == 4 and dnf(phi.matrix) == [frozenset({1, 2, 3, 4})]


@pytest.mark.parametrize(
    "text",
    [
        "(forall (x) (exists (y) (not (>= x y))))",
        "(exists (y) (forall (x) (>= x y)))",
        "(forall (x) (exists (y) (>= z y)))",
        "(forall (x) (exists (y) (>= (* x y) 0)))",
        "(forall (x x) (exists (y) (>= x y)))",
        "(forall (x) (exists (y) (>= x y))",
        "(forall (x) (exists (y) (and (>= x y))))",
    ],
)
def test_parse_errors(text):
    with pytest.raises(FormulaError):
        parse_formula(text)


@given(sentences())
def test_format_round_trip(text):
    phi = parse_formula(text)
    assert parse_formula(format_formula(phi)) == phi


def test_eval_and_subst(evenodd):
    assert eval_matrix(evenodd, (4,), (2,)) and not eval_matrix(evenodd, (4,), (1,))
    assert eval_matrix(evenodd, (5,), (3,))
    assert subst_bool(evenodd.matrix, (0, 0, 1, 1)) and not subst_bool(evenodd.matrix, (1, 0, 0, 1))
    with pytest.raises(FormulaError):
        eval_matrix(evenodd, (1, 2), (0,))


@given(sentences(max_atoms=5))
def test_skeleton_matches_oracle(text):
    phi = parse_formula(text)
    for xi in itertools.product((0, 1), repeat=phi.k):
        assert subst_bool(phi.matrix, xi) == skeleton_holds(text, xi)


def test_validity_examples(evenodd):
    assert validity_bounded(evenodd, 8, 8)
    res = validity_bounded(sentence("(= x (* 2 y))"), 5, 5)
    assert res.refuted == (1,) and res.certified
    # x = 0 needs y = 3, outside a box of 2; certification skips it
    assert validity_bounded(sentence("(>= y (+ x 3))"), 0, 2)
    assert not validity_bounded(sentence("(>= y (+ x 3))"), 0, 2, certify=False)


@settings(max_examples=30)
@given(sentences(coeff=2, const=2))
def test_validity_matches_oracle(text):
    phi = parse_formula(text)
    res = validity_bounded(phi, 4, 8, certify=False)
    assert res.refuted == refute_on_box(text, 4, 8)


# --- |phi| and c ---------------------------------------------------------------


def test_compute_c():
    assert compute_c(1) == 2
    assert compute_c(2) == 1024
    assert compute_c(3) == c_for_length(3)


def test_running_example_length(evenodd):
    L = formula_length(evenodd)
    assert (L.nodes, L.constants, L.occurrences, L.declarations) == (7, 14, 8, 2)
    assert L.raw == L.value == 31
    assert compute_c(evenodd) == c_for_length(31) == 2**502


def test_length_padding():
    L = formula_length(sentence("(>= 9 y)"))
    # the coefficient of y counts as a unary constant too
    assert L.constants == 10 and L.raw == L.value == 14
    L = formula_length(parse_formula("(forall () (exists () (>= 0 0)))"))
    assert L.raw == 1 and L.value == 3


# --- G and H -------------------------------------------------------------------


def test_G_language(evenodd):
    g = build_G(evenodd, 2)
    words = language_bounded(g, budget=EnumerationBudget(max_total_count=80))
    assert set(words) == {g_word(evenodd, 2, (x,)) for x in range(4)}


@given(sentences(m=2, n=1, max_atoms=2))
def test_G_words_encode_universal_values(text):
    art = compile_sentence(parse_formula(text), c_override=2)
    words = language_bounded(art.G, budget=EnumerationBudget(max_total_count=14))
    for w in words:
        x = universal_values(art, word_problem(art.G, w).trace)
        assert g_word(art.sentence, 2, x) == w


def test_universal_values_rejects_binary(evenodd):
    art = compile_sentence(evenodd, c_override=4, binary=True)
    with pytest.raises(ValueError):
        universal_values(art, ())
    assert language_bounded(art.G, budget=EnumerationBudget(max_total_count=80)).items == {
        g_word(evenodd, 4, (x,)) for x in range(2)
    }


def test_H_single_atom():
    phi = sentence("(>= 0 y)")
    H = build_H(phi)
    assert language_bounded(H, start="h.F@/").items == {W()}
    words = language_bounded(H, budget=EnumerationBudget(max_total_count=3))
    assert set(words) == {W({"t1+": p, "t1-": q}) for p in range(4) for q in range(4) if p + q <= 3 and p >= q}


def test_H_I_gadget():
    H = build_H(parse_formula("(forall (x) (exists (y) (and (>= x y) (or (>= 0 y) (>= 1 x)))))"))
    words = language_bounded(H, start="h.I", budget=EnumerationBudget(max_total_count=3))
    assert words.complete_in_box
    expect = {
        W({s: v for s, v in zip(H.terminals, vec)})
        for vec in itertools.product(range(4), repeat=6)
        if sum(vec) <= 3 and all(vec[2 * i] >= vec[2 * i + 1] for i in range(3))
    }
    assert set(words) == expect


@given(sentences(max_atoms=3))
def test_F_gadget_characterization(text):
    phi = parse_formula(text)
    H = build_H(phi)
    words = language_bounded(H, start="h.F@/", budget=EnumerationBudget(max_total_count=2))
    expect = {
        W(dict(zip(H.terminals, vec)))
        for vec in itertools.product(range(3), repeat=2 * phi.k)
        if sum(vec) <= 2 and skeleton_holds(text, [int(vec[2 * i] == vec[2 * i + 1] == 0) for i in range(phi.k)])
    }
    assert set(words) == expect


def test_F_productions_of_running_example(evenodd):
    H = build_H(evenodd)
    rhs = {str(p.rhs) for p in H.productions if str(p.lhs) == "h.F@/"}
    assert rhs == {"h.F@/0 h.F@/1", "h.F@/0 h.R@/1", "h.F@/1 h.R@/0"}
    assert classify(H).primary == GrammarKind.CONTEXT_FREE


@settings(max_examples=25)
@given(sentences(max_atoms=3, coeff=1, const=1))
def test_H_membership_characterization(text):
    phi = parse_formula(text)
    H = build_H(phi)
    for vec in itertools.product(range(3), repeat=2 * phi.k):
        if sum(vec) > 4:
            continue
        w = W(dict(zip(H.terminals, vec)))
        assert word_problem(H, w).member == h_member(phi, w, 4)


@settings(max_examples=25)
@given(sentences(max_atoms=3, coeff=1, const=1))
def test_membership_of_G_words_yields_witnesses(text):
    phi = parse_formula(text)
    art = compile_sentence(phi, c_override=2)
    for x in range(4):
        w = g_word(phi, 2, (x,))
        r = word_problem(art.H, w)
        assert r.member == h_member(phi, w, 2 * (2 + x) + 4)
        if r.member:
            y = existential_values(phi, art.H, r.trace)
            assert replay(art.H, r.start, r.trace) == w
            # the y read off the trace already suffices
            assert h_member(phi, w, max(y, default=0))


def test_inclusion_implies_validity_on_witness(evenodd):
    art = compile_sentence(evenodd, c_override=2)
    for x in range(6):
        r = word_problem(art.H, g_word(evenodd, 2, (x,)))
        y = existential_values(evenodd, art.H, r.trace)
        assert r.member and eval_matrix(evenodd, (x,), y)


# --- equivalence pair and Petri nets --------------------------------------------


def test_equiv_pair(evenodd):
    art = compile_sentence(sentence("(>= (+ x 1) (* 2 y))"), c_override=2)
    b = EnumerationBudget(max_total_count=24)
    lg = language_bounded(art.G, budget=b).items
    lh = language_bounded(art.H, budget=b).items
    assert language_bounded(art.G_e, budget=b).items == lg | lh
    assert language_bounded(art.H_e, budget=b).items == lh
    with pytest.raises(GrammarError):
        build_equiv_pair(art.G, art.G)
    art = compile_sentence(evenodd, c_override=2)
    w = g_word(evenodd, 2, (1,))
    assert word_problem(art.G_e, w).member and word_problem(art.H_e, w).member


def test_equiv_pair_petri_nets(evenodd):
    art = compile_sentence(evenodd, c_override=2)
    for g in (art.G_e, art.H_e):
        net = to_petri_net(g)
        m = reachable_markings(net, max_tokens=6)
        r = reach_bounded(g, budget=EnumerationBudget(max_form_size=6))
        assert {w.to_vector(net.places) for w in r} == set(m.markings)


# --- regular pair --------------------------------------------------------------


def test_gamma_alphabet():
    assert gamma_alphabet(2) == ("p0", "pbar1", "p1", "pbar2", "p2")


def test_C_gadget_examples():
    cl, cr = build_C_l(1), build_C_r(1)
    inside = W({"p0": 1, "pbar1": 1, "p1": 2})
    assert word_problem(cl, inside).member and not word_problem(cr, inside).member
    assert word_problem(cr, W({"p0": 1})).member and not word_problem(cl, W({"p1": 1})).member
    with pytest.raises(ValueError):
        build_C_l(0)


def test_C_l_predicate():
    g = build_C_l(2)
    for vec in itertools.product(range(3), repeat=5):
        w = W(dict(zip(gamma_alphabet(2), vec)))
        want = vec[2] == 2 * vec[1] and vec[4] == 2 * vec[3]
        assert word_problem(g, w).member == want


def test_C_with_sigma():
    cl = build_C_l(2, ("a",))
    w = W({"p0": 1, "pbar1": 1, "p1": 2, "pbar2": 2, "p2": 4, "a": 4})
    assert word_problem(cl, w).member
    assert not word_problem(cl, W({"p0": 1, "pbar1": 1, "p1": 2, "pbar2": 2, "p2": 4, "a": 2})).member
    assert word_problem(build_C_r(1, ("a",)), W({"p0": 1, "a": 3})).member


def test_regularized_F_equals_F(evenodd):
    H = build_H(evenodd)
    b = EnumerationBudget(max_total_count=3)
    assert language_bounded(regular_F_grammar(evenodd), budget=b).items == language_bounded(H, start="h.F@/", budget=b).items


def test_regular_pair(evenodd):
    pair = build_regular_pair(evenodd, 4)
    assert pair.j == 2
    for g in (pair.G_r, pair.H_r, pair.H_reg):
        assert classify(g).primary == GrammarKind.REGULAR
    with pytest.raises(GrammarError):
        build_regular_pair(evenodd, 6)


def test_regular_pair_projects_to_G(evenodd):
    """Words of G^r outside H^r's doubling part carry exactly the G words on Sigma."""
    pair = build_regular_pair(evenodd, 2)
    sigma = evenodd.terminals
    # x = 0: one p0, doubling chain p0 -> pbar1 -> p1 with copies of Sigma
    w = g_word(evenodd, 2, (0,)) + W({"p0": 1, "pbar1": 1, "p1": 2})
    r = word_problem(pair.G_r, w)
    assert r.member
    assert word_problem(pair.H_r, w).member
    bad = W({s: 1 for s in sigma}) + W({"p0": 1})
    assert not word_problem(pair.G_r, bad).member


# --- compile -------------------------------------------------------------------


def test_compile_certified_flag(evenodd):
    assert not compile_sentence(evenodd, c_override=2).certified
    art = compile_sentence(parse_formula("(forall () (exists () (>= 1 0)))"))
    assert art.certified and art.c == compute_c(3) and art.sentence.m == art.sentence.n == 0
    assert decide_inclusion_bruteforce(art.G, art.H).included
    m = art.manifest()
    assert m["formula_length"]["padded"] and m["classes"]["G"] == "regular"


def test_compile_rejects_bad_c(evenodd):
    with pytest.raises(ValueError):
        compile_sentence(evenodd, c_override=0)


def test_structural_direction_examples():
    rng = random.Random(7)
    for _ in range(5):
        text = random_sentence(rng, max_atoms=2, coeff=1, const=1)
        art = compile_sentence(parse_formula(text), c_override=2)
        v = decide_inclusion_bruteforce(art.G, art.H, budget=EnumerationBudget(max_total_count=40))
        if v.included:
            continue
        x = universal_values(art, v.trace)
        assert refute_on_box(text, x[0], 2 * (2 + x[0]) + 4) == x
