"""
Deciding inclusion of regular commutative grammars through semilinear sets
===========================================================================

Regular grammars have semilinear Parikh images.  Splitting each linear
set into pieces with linearly independent periods makes membership a
matter of exact elimination, and inclusion is then searched for a witness
of bounded bit size.
"""

# %%
from comgram import Grammar
from comgram.engine import decide_inclusion_semilinear, parikh_regular
from comgram.semilinear import DiophantineSystem, LinearSet, SemiLinearSet, huynh_form, minimal_solutions

g = Grammar.build([("S", "S a b"), ("S", "S a^2 b^2"), ("S", "A"), ("A", "A a^3 b^3"), ("A", "eps")], "S")
h = Grammar.build([("S", "S a b"), ("S", "a^2 b^2")], "S")
M = parikh_regular(g)
print("image of g:", M.dumps(alphabet=["a", "b"]))

# %%
# The periods (1,1), (2,2), (3,3) are dependent; the decomposition keeps one
# independent period per piece and enumerates the small offsets.
for c in huynh_form(M).components:
    print("  ", c.base, "+ cone", c.periods)

# %%
# g contains the empty word, h does not.
v = decide_inclusion_semilinear(g, h)
print("included:", v.included, " counterexample:", repr(str(v.counterexample)))
v = decide_inclusion_semilinear(h, g)
print("h <= g:", v.included, " candidates tried:", v.checked)

# %%
# The same machinery solves linear Diophantine inequalities over the naturals.
D = DiophantineSystem(((2, -1), (-1, 2)), (0, 0))
hd = minimal_solutions(D)
print("2x >= y and 2y >= x: periods", hd.periods)
print("three periods in dimension two, so |P| <= C(n, m) fails here:", not hd.cardinality_bound_holds)

# %%
# Membership in a union of linear sets.
S = SemiLinearSet(2, (LinearSet((1, 0), ((2, 1),)), LinearSet((0, 0), ((1, 1),))))
print((5, 2) in S, (4, 2) in S, (4, 4) in S)
