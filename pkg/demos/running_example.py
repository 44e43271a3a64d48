"""
The even/odd sentence as a grammar inclusion problem
=====================================================

Every natural number is even or odd.  Compiling that sentence yields two
context-free commutative grammars G and H with lan(G) <= lan(H) exactly
when the sentence is valid (for the certified c).  Here c is overridden
to 2 so everything stays small.
"""

# %%
# Parse the sentence and look at its normalized atoms.
from pathlib import Path

from comgram import classify
from comgram.engine import EnumerationBudget, decide_inclusion_bruteforce, language_bounded, word_problem
from comgram.reduction import compile_sentence, compute_c, formula_length, parse_formula, universal_values

text = (Path(__file__).parent.parent / "tests" / "data" / "evenodd.sexp").read_text()
phi = parse_formula(text)
for t in phi.atoms:
    print(f"t{t.index}: {t.a} . x + {t.z} >= {t.b} . y")

L = formula_length(phi)
print("|phi| =", L.value, " certified c = 2 **", compute_c(phi).bit_length() - 1)

# %%
# Compile with a small c.  G writes one word per universal value x.
art = compile_sentence(phi, c_override=2)
print("G is", classify(art.G).primary.label, "; H is", classify(art.H).primary.label)
words = language_bounded(art.G, budget=EnumerationBudget(max_total_count=80)).sorted()
for w in words:
    x = universal_values(art, word_problem(art.G, w).trace)
    print(f"x = {x}: {w}")

# %%
# Each of these words is in H; the derivation picks y and floods the
# atoms the chosen disjunct does not need.
r = word_problem(art.H, words[1])
for st in r.trace:
    print(f"  {st.production}")

# %%
# Bounded inclusion check: no counterexample among the words of G up to length 80.
v = decide_inclusion_bruteforce(art.G, art.H, budget=EnumerationBudget(max_total_count=80))
print("included:", v.included, " words checked:", v.checked, " exhaustive:", v.exhaustive)

# %%
# Breaking the sentence (dropping the odd case) gives a counterexample at x = 1.
bad = parse_formula("(forall (x) (exists (y) (and (>= x (* 2 y)) (>= (* 2 y) x))))")
art = compile_sentence(bad, c_override=2)
v = decide_inclusion_bruteforce(art.G, art.H, budget=EnumerationBudget(max_total_count=80))
print("counterexample:", v.counterexample, " x =", universal_values(art, v.trace))
