"""Communication-free Petri nets obtained from context-free grammars."""

from __future__ import annotations

import json
from dataclasses import dataclass
from xml.etree import ElementTree as ET

from ..budget import Deadline, tick
from .grammar import Grammar, require_context_free


@dataclass(frozen=True)
class Transition:
    name: str
    inputs: tuple[tuple[str, int], ...]
    outputs: tuple[tuple[str, int], ...]


@dataclass(frozen=True)
class PetriNet:
    places: tuple[str, ...]
    transitions: tuple[Transition, ...]
    initial: tuple[int, ...]

    def index(self) -> dict[str, int]:
        return {p: i for i, p in enumerate(self.places)}

    def to_json(self) -> dict:
        return {
            "places": list(self.places),
            "transitions": [
                {"name": t.name, "in": dict(t.inputs), "out": dict(t.outputs)} for t in self.transitions
            ],
            "initial": {p: n for p, n in zip(self.places, self.initial) if n},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    def to_pnml(self, net_id: str = "net") -> str:
        """PNML (place/transition net) serialization."""
        root = ET.Element("pnml", xmlns="http://www.pnml.org/version-2009/grammar/pnml")
        net = ET.SubElement(root, "net", id=net_id, type="http://www.pnml.org/version-2009/grammar/ptnet")
        page = ET.SubElement(net, "page", id="page0")
        ids = {p: f"p{i}" for i, p in enumerate(self.places)}
        for p, n in zip(self.places, self.initial):
            el = ET.SubElement(page, "place", id=ids[p])
            ET.SubElement(ET.SubElement(el, "name"), "text").text = p
            if n:
                ET.SubElement(ET.SubElement(el, "initialMarking"), "text").text = str(n)
        arc = 0
        for k, t in enumerate(self.transitions):
            tid = f"t{k}"
            el = ET.SubElement(page, "transition", id=tid)
            ET.SubElement(ET.SubElement(el, "name"), "text").text = t.name
            for src, dst, items in ((None, tid, t.inputs), (tid, None, t.outputs)):
                for p, n in items:
                    a = ET.SubElement(
                        page, "arc", id=f"a{arc}", source=src or ids[p], target=dst or ids[p]
                    )
                    ET.SubElement(ET.SubElement(a, "inscription"), "text").text = str(n)
                    arc += 1
        ET.indent(root)
        return ET.tostring(root, encoding="unicode", xml_declaration=True) + "\n"


def to_petri_net(g: Grammar) -> PetriNet:
    """One place per symbol, one transition per production, one token on the axiom."""
    require_context_free(g, "to_petri_net")
    places = g.symbols
    transitions = []
    for k, p in enumerate(g.productions):
        transitions.append(Transition(f"t{k + 1}: {p}", tuple(p.lhs.items()), tuple(p.rhs.items())))
    initial = tuple(1 if s == g.axiom else 0 for s in places)
    return PetriNet(places, tuple(transitions), initial)


@dataclass(frozen=True)
class MarkingExploration:
    markings: frozenset
    exhaustive: bool


def reachable_markings(
    net: PetriNet,
    max_tokens: int,
    max_markings: int = 1_000_000,
    deadline: Deadline | None = None,
) -> MarkingExploration:
    """Markings reachable from the initial marking with at most ``max_tokens`` tokens in total.

    Markings over the cap are dropped without being expanded; the result is
    flagged non-exhaustive whenever that happened.
    """
    idx = net.index()
    effects = []
    for t in net.transitions:
        pre = [(idx[p], n) for p, n in t.inputs]
        delta = [0] * len(net.places)
        for p, n in t.inputs:
            delta[idx[p]] -= n
        for p, n in t.outputs:
            delta[idx[p]] += n
        effects.append((pre, tuple(delta)))
    seen = {net.initial}
    frontier = [net.initial]
    exhaustive = True
    while frontier:
        nxt = []
        for m in sorted(frontier):
            for pre, delta in effects:
                if any(m[i] < n for i, n in pre):
                    continue
                tick(deadline)
                m2 = tuple(a + b for a, b in zip(m, delta))
                if sum(m2) > max_tokens:
                    exhaustive = False
                    continue
                if m2 not in seen:
                    if len(seen) >= max_markings:
                        exhaustive = False
                        continue
                    seen.add(m2)
                    nxt.append(m2)
        frontier = nxt
    return MarkingExploration(frozenset(seen), exhaustive)
