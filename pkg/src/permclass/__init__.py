"""Permutation classes: substitution decomposition, geometric grid classes,
automata over cell alphabets, and generating functions."""

from .perm import Perm, contains, embeddings, inflate, is_simple, simples, substitution_decompose
from .classes import parse_spec, member, enumerate_class

__all__ = [
    "Perm",
    "contains",
    "embeddings",
    "inflate",
    "is_simple",
    "simples",
    "substitution_decompose",
    "parse_spec",
    "member",
    "enumerate_class",
]
