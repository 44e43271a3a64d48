"""Commutative words, grammars, class detection and the Petri-net view."""

from .grammar import (
    Grammar,
    GrammarClass,
    GrammarKind,
    Production,
    binary_expand,
    binary_size,
    classify,
    size,
)
from .petri import PetriNet, Transition, reachable_markings, to_petri_net
from .textformat import dump_grammar, load_grammar, parse_grammar
from .words import EMPTY, CommutativeWord, Word, bit_size, project

__all__ = [
    "CommutativeWord",
    "EMPTY",
    "Grammar",
    "GrammarClass",
    "GrammarKind",
    "PetriNet",
    "Production",
    "Transition",
    "Word",
    "binary_expand",
    "binary_size",
    "bit_size",
    "classify",
    "dump_grammar",
    "load_grammar",
    "parse_grammar",
    "project",
    "reachable_markings",
    "size",
    "to_petri_net",
]
