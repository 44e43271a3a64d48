"""Commutative words: finite multisets of symbols."""

from __future__ import annotations

import re
from collections.abc import Iterable, Mapping
from typing import Iterator

EPSILON_TOKEN = "eps"
_TOKEN = re.compile(r"^([^\s^|#]+?)(?:\^(\d+))?$")


def bit_size(n: int) -> int:
    """ceil(log2 n) for n >= 1, and 0 for n == 0 (absent symbols cost nothing)."""
    if n < 0:
        raise ValueError("counts are natural numbers")
    return (n - 1).bit_length() if n > 1 else 0


class CommutativeWord(Mapping):
    """Immutable multiset over symbol names, i.e. an element of Sigma^⊙.

    Counts are arbitrary-precision Python ints; absent symbols count 0.
    Equality and hashing are multiset equality.
    """

    __slots__ = ("_items", "_d", "_hash")

    def __init__(self, counts: Mapping[str, int] | Iterable[str] | None = None):
        acc: dict[str, int] = {}
        if counts is None:
            pass
        elif isinstance(counts, Mapping):
            for sym, n in counts.items():
                n = int(n)
                if n < 0:
                    raise ValueError(f"negative count {n} for {sym!r}")
                if n:
                    acc[sym] = acc.get(sym, 0) + n
        else:
            for sym in counts:
                acc[sym] = acc.get(sym, 0) + 1
        self._items = tuple(sorted(acc.items()))
        self._d = dict(self._items)
        self._hash = hash(self._items)

    @classmethod
    def parse(cls, text: str) -> "CommutativeWord":
        """Parse ``"a^3 b eps c"``; ``eps`` (or an empty string) is the empty word."""
        acc: dict[str, int] = {}
        for tok in text.split():
            if tok == EPSILON_TOKEN:
                continue
            m = _TOKEN.match(tok)
            if not m:
                raise ValueError(f"bad symbol token {tok!r}")
            k = int(m.group(2)) if m.group(2) else 1
            if k < 1:
                raise ValueError(f"exponent must be >= 1 in {tok!r}")
            acc[m.group(1)] = acc.get(m.group(1), 0) + k
        return cls(acc)

    @classmethod
    def from_vector(cls, alphabet: Iterable[str], vector: Iterable[int]) -> "CommutativeWord":
        return cls(dict(zip(alphabet, vector)))

    # Mapping protocol; missing symbols read as 0 rather than raising.
    def __getitem__(self, sym: str) -> int:
        return self._d.get(sym, 0)

    def get(self, sym, default=0):
        n = self[sym]
        return n if n else default

    def __contains__(self, sym) -> bool:
        return sym in self._d

    def __iter__(self) -> Iterator[str]:
        return (s for s, _ in self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if isinstance(other, CommutativeWord):
            return self._items == other._items
        if isinstance(other, Mapping):
            return self == CommutativeWord(other)
        return NotImplemented

    def items(self):
        return self._items

    @property
    def length(self) -> int:
        """|w|: total number of symbol occurrences."""
        return sum(n for _, n in self._items)

    @property
    def size(self) -> int:
        """#w: binary representation size."""
        return sum(bit_size(n) for _, n in self._items)

    @property
    def support(self) -> frozenset[str]:
        return frozenset(s for s, _ in self._items)

    def is_empty(self) -> bool:
        return not self._items

    def __add__(self, other: "CommutativeWord") -> "CommutativeWord":
        acc = dict(self._items)
        for s, n in other.items():
            acc[s] = acc.get(s, 0) + n
        return CommutativeWord(acc)

    def __sub__(self, other: "CommutativeWord") -> "CommutativeWord":
        acc = dict(self._items)
        for s, n in other.items():
            left = acc.get(s, 0) - n
            if left < 0:
                raise ValueError(f"cannot remove {n} x {s!r} from {self}")
            acc[s] = left
        return CommutativeWord(acc)

    def __mul__(self, k: int) -> "CommutativeWord":
        return CommutativeWord({s: n * k for s, n in self._items})

    __rmul__ = __mul__

    def __le__(self, other: "CommutativeWord") -> bool:
        """Pointwise order: every count here is at most the count in ``other``."""
        return all(other[s] >= n for s, n in self._items)

    def __ge__(self, other: "CommutativeWord") -> bool:
        return other <= self

    def project(self, alphabet: Iterable[str]) -> "CommutativeWord":
        keep = set(alphabet)
        return CommutativeWord({s: n for s, n in self._items if s in keep})

    def to_vector(self, alphabet: Iterable[str]) -> tuple[int, ...]:
        d = self._d
        return tuple(d.get(s, 0) for s in alphabet)

    def __str__(self) -> str:
        if not self._items:
            return EPSILON_TOKEN
        return " ".join(s if n == 1 else f"{s}^{n}" for s, n in self._items)

    def format(self, order: Iterable[str]) -> str:
        """Render in a given symbol order (symbols not listed go last, sorted)."""
        d = dict(self._items)
        parts = []
        for s in order:
            n = d.pop(s, 0)
            if n:
                parts.append(s if n == 1 else f"{s}^{n}")
        for s, n in sorted(d.items()):
            parts.append(s if n == 1 else f"{s}^{n}")
        return " ".join(parts) or EPSILON_TOKEN

    def __repr__(self) -> str:
        return f"CommutativeWord({str(self)!r})"


Word = CommutativeWord
EMPTY = CommutativeWord()


def project(w: CommutativeWord, alphabet: Iterable[str]) -> CommutativeWord:
    """pi_Gamma(w): keep only the symbols of ``alphabet``."""
    return w.project(alphabet)
