"""
Forcing exponential counts with regular grammars
=================================================

No regular commutative grammar of polynomial size can emit exactly 2^i
copies of a letter.  Two of them can do it together: C_l doubles along a
chain of letters p0, p1, ..., p_i, C_r accepts every word that breaks the
chain somewhere, and the difference lan(C_l) - lan(C_r) is left with
v(p_i) = 2^i v(p0).
"""

# %%
from comgram import CommutativeWord
from comgram.engine import parikh_regular, word_problem
from comgram.reduction import build_C_l, build_C_r, build_regular_pair, gamma_alphabet, parse_formula

i = 3
Cl, Cr = build_C_l(i), build_C_r(i)
print(Cl)

# %%
# The unique chain with one p0.
chain = CommutativeWord({"p0": 1, "pbar1": 1, "p1": 2, "pbar2": 2, "p2": 4, "pbar3": 4, "p3": 8})
print("in C_l:", word_problem(Cl, chain).member, " in C_r:", word_problem(Cr, chain).member)
broken = chain + CommutativeWord({"pbar2": 1, "p2": 2})
print("broken chain in C_l:", word_problem(Cl, broken).member, " in C_r:", word_problem(Cr, broken).member)

# %%
# Enumerate the difference through the Parikh images.
A = gamma_alphabet(i)
Ml, Mr = parikh_regular(Cl, alphabet=A), parikh_regular(Cr, alphabet=A)
diff = sorted(v for v in Ml.points_up_to_length(40) if v not in Mr)
for v in diff:
    print(dict(zip(A, v)))

# %%
# The regular pair for a sentence replaces the constant c by this gadget.
phi = parse_formula("(forall (x) (exists (y) (>= x y)))")
pair = build_regular_pair(phi, 8)
print("j =", pair.j, "; G_r has", len(pair.G_r.productions), "productions; H_r has", len(pair.H_r.productions))
