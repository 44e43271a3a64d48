"""The acceptance criteria, each at its stated tolerance and time limit.

Every test records one PASS/FAIL line, printed in the terminal summary.
Random instances come from fixed seeds, so runs are reproducible.
"""

import itertools
import random
import time

import numpy as np
import pytest
from conftest import ACCEPTANCE
from gen import random_grammar, random_sentence
from oracles import dioph_box, linear_box, skeleton_holds

from comgram import CommutativeWord, GrammarKind, classify
from comgram.core.petri import reachable_markings, to_petri_net
from comgram.engine import (
    EnumerationBudget,
    decide_inclusion_bruteforce,
    decide_inclusion_semilinear,
    language_bounded,
    parikh_regular,
    reach_bounded,
    word_problem,
)
from comgram.reduction import (
    build_C_l,
    build_C_r,
    build_H,
    build_regular_pair,
    compile_sentence,
    gamma_alphabet,
    parse_formula,
    regular_F_grammar,
    universal_values,
    validity_bounded,
)
from comgram.semilinear import DiophantineSystem, minimal_solutions, norm_inf


def record(n, ok, detail, elapsed, limit):
    ok = ok and elapsed < limit
    ACCEPTANCE[n] = (ok, f"{detail} [{elapsed:.1f}s, limit {limit}s]")
    return ok


def box_words(alphabet, hi, keep):
    return {
        CommutativeWord(dict(zip(alphabet, vec)))
        for vec in itertools.product(range(hi + 1), repeat=len(alphabet))
        if keep(vec)
    }


def vec_add(a, b, k=1):
    return tuple(x + k * y for x, y in zip(a, b))


# --- 1 -------------------------------------------------------------------------

BASE = (2, 2, 2, 2, 3, 2, 2, 3)
PERIOD = (3, 2, 2, 3, 3, 2, 2, 3)


def running_example_words(evenodd, max_length):
    art = compile_sentence(evenodd, c_override=2)
    words = language_bounded(art.G, budget=EnumerationBudget(max_total_count=max_length))
    return words, {w.to_vector(art.alphabet) for w in words}


@pytest.mark.xfail(
    strict=True,
    reason="the four listed words have lengths 18, 38, 58 and 78; a length bound of 40 admits only the first two",
)
def test_criterion_1_running_example_language(evenodd):
    t0 = time.perf_counter()
    words, got = running_example_words(evenodd, 40)
    want = {vec_add(BASE, PERIOD, i) for i in range(4)}
    ok = got == want
    lengths = sorted(sum(v) for v in want)
    record(
        1,
        ok,
        f"|w| <= 40 gives {len(got)} words (i <= {len(got) - 1}), expected 4; the listed words have lengths "
        f"{lengths}, and with |w| <= 78 the set is exact (checked separately)",
        time.perf_counter() - t0,
        5,
    )
    assert ok


def test_criterion_1_at_the_length_of_the_listed_words(evenodd):
    # the same progression, with the bound raised to the longest listed word
    t0 = time.perf_counter()
    words, got = running_example_words(evenodd, 78)
    assert words.complete_in_box
    assert got == {vec_add(BASE, PERIOD, i) for i in range(4)}
    _, short = running_example_words(evenodd, 40)
    assert short == {vec_add(BASE, PERIOD, i) for i in range(2)}
    assert time.perf_counter() - t0 < 5


# --- 2 -------------------------------------------------------------------------


def test_criterion_2_gadget_exactness():
    t0 = time.perf_counter()
    rng = random.Random(2)
    ok = True
    for k in (1, 2, 3):
        phi = parse_formula(random_sentence(rng, k=k))
        H = build_H(phi)
        got = language_bounded(H, start="h.I", budget=EnumerationBudget(max_symbol_count=3, max_forms=None))
        want = box_words(H.terminals, 3, lambda v: all(v[2 * i] >= v[2 * i + 1] for i in range(k)))
        ok &= got.complete_in_box and set(got) == want
    sizes = []
    for _ in range(20):
        text = random_sentence(rng, max_atoms=4)
        phi = parse_formula(text)
        H = build_H(phi)
        got = language_bounded(H, start="h.F@/", budget=EnumerationBudget(max_symbol_count=3, max_forms=None))
        want = box_words(
            H.terminals, 3, lambda v: skeleton_holds(text, [int(v[2 * i] == v[2 * i + 1] == 0) for i in range(phi.k)])
        )
        ok &= got.complete_in_box and set(got) == want
        sizes.append(phi.k)
    assert record(
        2, ok, f"I for k = 1..3 and F_psi for 20 sentences with {min(sizes)}..{max(sizes)} atoms, counts <= 3",
        time.perf_counter() - t0, 30,
    )


# --- 3 -------------------------------------------------------------------------


def test_criterion_3_doubling_gadget():
    t0 = time.perf_counter()
    ok = True
    notes = []
    for i in (1, 2, 3, 4):
        A = gamma_alphabet(i)
        Ml = parikh_regular(build_C_l(i), alphabet=A)
        Mr = parikh_regular(build_C_r(i), alphabet=A)
        p0, pi = A.index("p0"), A.index(f"p{i}")
        bad = witnesses = total = 0
        for comp in Ml.components:
            for X in comp.iter_point_arrays(10 * 2**i):
                total += len(X)
                diff = X[~Mr.contains_array(X)]
                bad += int((diff[:, pi] != (2**i) * diff[:, p0]).sum())
                witnesses += int((diff[:, p0] == 1).sum())
        ok &= bad == 0 and witnesses >= 1
        notes.append(f"i={i}: {total} points, {witnesses} with v(p0)=1")
    # the images themselves against direct membership on short words
    for i in (1, 2):
        A = gamma_alphabet(i)
        Cl, Cr = build_C_l(i), build_C_r(i)
        Ml, Mr = parikh_regular(Cl, alphabet=A), parikh_regular(Cr, alphabet=A)
        for vec in itertools.product(range(3), repeat=len(A)):
            w = CommutativeWord(dict(zip(A, vec)))
            ok &= (vec in Ml) == word_problem(Cl, w).member and (vec in Mr) == word_problem(Cr, w).member
    assert record(3, ok, "; ".join(notes), time.perf_counter() - t0, 60)


# --- 4 -------------------------------------------------------------------------


def test_criterion_4_regularization():
    t0 = time.perf_counter()
    rng = random.Random(4)
    ok = True
    for _ in range(20):
        phi = parse_formula(random_sentence(rng, max_atoms=4))
        b = EnumerationBudget(max_symbol_count=2, max_forms=None)
        cf = language_bounded(build_H(phi), start="h.F@/", budget=b)
        reg = language_bounded(regular_F_grammar(phi), budget=b)
        ok &= cf.complete_in_box and reg.complete_in_box and set(cf) == set(reg)
        for c in (2, 4):
            pair = build_regular_pair(phi, c)
            ok &= classify(pair.G_r).primary == classify(pair.H_r).primary == GrammarKind.REGULAR
    assert record(4, ok, "20 sentences, counts <= 2, regular pair at c = 2 and 4", time.perf_counter() - t0, 60)


# --- 5 -------------------------------------------------------------------------


def test_criterion_5_pottier_bounds():
    t0 = time.perf_counter()
    rng = random.Random(5)
    ok = True
    sizes = []
    for _ in range(100):
        m = rng.randint(1, 4)
        n = rng.randint(1, 5 - m)
        A = tuple(tuple(rng.randint(-3, 3) for _ in range(n)) for _ in range(m))
        c = tuple(rng.randint(-3, 3) for _ in range(m))
        D = DiophantineSystem(A, c)
        hd = minimal_solutions(D)
        bound = (D.norm_1_inf + norm_inf(c) + 2) ** (m + n)
        ok &= all(norm_inf(v) <= bound for v in hd.bases + hd.periods)
        got = set()
        for base in hd.bases:
            got |= linear_box(base, hd.periods, 6)
        ok &= got == dioph_box(A, c, 6)
        sizes.append(len(hd.bases) + len(hd.periods))
    assert record(5, ok, f"100 systems, up to {max(sizes)} basis vectors, box [0,6]^n", time.perf_counter() - t0, 120)


# --- 6 -------------------------------------------------------------------------


def test_criterion_6_pipeline_agreement():
    t0 = time.perf_counter()
    rng = random.Random(6)
    ok = True
    exhaustive = counter = empty = 0
    for _ in range(100):
        g, h = random_grammar(rng, live=True), random_grammar(rng, live=True)
        brute = decide_inclusion_bruteforce(g, h, budget=EnumerationBudget(max_total_count=12))
        sl = decide_inclusion_semilinear(g, h, witness_bit_bound=8)
        for v in (brute, sl):
            if not v.included:
                w = v.counterexample
                ok &= word_problem(g, w).member and not word_problem(h, w).member
        if not brute.included:
            # a counterexample of length <= 12 has at most 4 bits per letter
            ok &= not sl.included
        if brute.exhaustive:
            exhaustive += 1
            ok &= brute.included == sl.included
        counter += not brute.included
        empty += not language_bounded(g, budget=EnumerationBudget(max_total_count=12))
    assert record(
        6, ok, f"100 pairs ({empty} with empty L(g)), {exhaustive} decided exhaustively by brute force, "
        f"{counter} with counterexamples",
        time.perf_counter() - t0, 300,
    )


# --- 7 -------------------------------------------------------------------------


def _s(body, xs="x"):
    return f"(forall ({xs}) (exists (y) {body}))"


INVALID = [
    _s("(= x (* 2 y))"),
    _s("(>= 2 x)"),
    _s("(>= 0 (+ x y))"),
    _s("(= x (* 3 y))"),
    _s("(and (>= y x) (>= 4 y))"),
    _s("(or (= x 0) (= x 2))"),
    _s("(= (+ x 1) (* 2 y))"),
    _s("(= (+ x1 x2) (* 2 y))", "x1 x2"),
    _s("(and (>= y 1) (>= x y))"),
    _s("(or (>= x 4) (= x (* 2 y)))"),
]
VALID = [
    _s("(>= x y)"),
    _s("(>= y x)"),
    _s("(or (and (>= x (* 2 y)) (>= (* 2 y) x)) (and (>= (+ x 1) (* 2 y)) (>= (* 2 y) (+ x 1))))"),
    _s("(or (>= x 1) (>= y 1))"),
    _s("(and (>= (* 2 y) x) (>= (+ x 1) (* 2 y)))"),
    _s("(= y (+ x 1))"),
    _s("(or (>= x 3) (>= 2 x))"),
    _s("(= y (+ x1 x2))", "x1 x2"),
    _s("(and (>= y x) (>= (* 3 x) y))"),
    _s("(or (= x (* 3 y)) (or (= x (+ (* 3 y) 1)) (= x (+ (* 3 y) 2))))"),
]


def test_criterion_7_structural_direction():
    t0 = time.perf_counter()
    ok = True
    for text in INVALID + VALID:
        phi = parse_formula(text)
        invalid = text in INVALID
        res = validity_bounded(phi, 5, 12)
        ok &= (not res.valid_on_box and res.certified) if invalid else res.valid_on_box
        for c in (2, 4):
            art = compile_sentence(phi, c_override=c)
            budget = EnumerationBudget(max_total_count=2 * phi.k * (c + (c + 3) * 6))
            v = decide_inclusion_bruteforce(art.G, art.H, budget=budget)
            if invalid:
                ok &= not v.included
                if not v.included:
                    # the counterexample encodes a universal assignment without any witness
                    x = universal_values(art, v.trace)
                    ok &= not any(phi.holds(x, (y,)) for y in range(61))
            else:
                ok &= v.included and not v.undecided
    assert record(7, ok, "10 invalid and 10 valid sentences at c = 2 and 4", time.perf_counter() - t0, 300)


# --- 8 -------------------------------------------------------------------------


def test_criterion_8_petri_round_trip():
    t0 = time.perf_counter()
    rng = random.Random(8)
    ok = True
    sizes = []
    for _ in range(20):
        g = random_grammar(rng, max_prods=5, regular=False, live=True)
        net = to_petri_net(g)
        ok &= net.places == g.symbols
        marks = reachable_markings(net, max_tokens=8)
        forms = reach_bounded(g, budget=EnumerationBudget(max_form_size=8, max_forms=None))
        ok &= {w.to_vector(net.places) for w in forms} == set(marks.markings)
        sizes.append(len(marks.markings))
    assert record(8, ok, f"20 grammars, up to {max(sizes)} markings with <= 8 tokens", time.perf_counter() - t0, 60)
