"""
Context-free commutative grammars as Petri nets
================================================

Each symbol becomes a place and each production a transition that consumes
its left-hand side; one token sits on the axiom.  Reachable markings are
exactly the reachable sentential forms.
"""

# %%
from comgram import Grammar
from comgram.core.petri import reachable_markings, to_petri_net
from comgram.engine import EnumerationBudget, reach_bounded

g = Grammar.build([("S", "S S"), ("S", "a"), ("S", "eps")], "S")
net = to_petri_net(g)
print(net.dumps())

# %%
marks = reachable_markings(net, max_tokens=3)
forms = reach_bounded(g, budget=EnumerationBudget(max_form_size=3))
print(sorted(marks.markings))
print(sorted({w.to_vector(net.places) for w in forms}) == sorted(marks.markings))

# %%
print(net.to_pnml(net_id="doubling")[:300], "...")
