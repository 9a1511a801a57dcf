"""Reduced words in the free group on a1, ..., ar.

Letters are nonzero integers: ``i`` stands for a_i and ``-i`` for its inverse.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import MalformedInputError


def letter(generator: int, sign: int = 1) -> int:
    if generator < 1 or sign not in (1, -1):
        raise MalformedInputError(f"bad letter ({generator}, {sign})")
    return generator * sign


def generator(d: int) -> int:
    return abs(d)


def sign(d: int) -> int:
    return 1 if d > 0 else -1


def directions(rank: int) -> list[int]:
    """All 2r letters in the order a1, A1, a2, A2, ..."""
    out = []
    for i in range(1, rank + 1):
        out += [i, -i]
    return out


def direction_key(d: int) -> tuple[int, bool]:
    return (abs(d), d < 0)


def format_letter(d: int) -> str:
    return f"a{d}" if d > 0 else f"A{-d}"


def parse_letter(token: str) -> int:
    if len(token) < 2 or token[0] not in "aA" or not token[1:].isdigit():
        raise MalformedInputError(f"bad letter token {token!r}")
    i = int(token[1:])
    if i < 1:
        raise MalformedInputError(f"bad letter token {token!r}")
    return i if token[0] == "a" else -i


def split_letters(text: str) -> list[int]:
    """Parse ``a1 A2`` or ``a1A2`` into letters; ``1`` alone is the empty word."""
    text = text.strip()
    if text in ("", "1"):
        return []
    out = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        end = pos + 1
        while end < n and text[end].isdigit():
            end += 1
        out.append(parse_letter(text[pos:end]))
        pos = end
    return out


def _check_rank(letters: Iterable[int], rank: int) -> None:
    for d in letters:
        if not isinstance(d, int) or d == 0 or abs(d) > rank:
            raise MalformedInputError(f"letter {d!r} outside rank {rank}")


def reduce_letters(raw: Iterable[int]) -> tuple[int, ...]:
    stack: list[int] = []
    for d in raw:
        if stack and stack[-1] == -d:
            stack.pop()
        else:
            stack.append(d)
    return tuple(stack)


def invert_letters(letters: Sequence[int]) -> tuple[int, ...]:
    return tuple(-d for d in reversed(letters))


@dataclass(frozen=True)
class Word:
    letters: tuple[int, ...]
    rank: int

    def __post_init__(self):
        if self.rank < 1:
            raise MalformedInputError(f"bad rank {self.rank}")
        object.__setattr__(self, "letters", tuple(self.letters))

    @classmethod
    def parse(cls, text: str, rank: int) -> "Word":
        return reduce(split_letters(text), rank)

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __getitem__(self, k):
        return self.letters[k]

    def __mul__(self, other: "Word") -> "Word":
        if other.rank != self.rank:
            raise MalformedInputError("rank mismatch")
        return Word(reduce_letters(self.letters + other.letters), self.rank)

    def inverse(self) -> "Word":
        return Word(invert_letters(self.letters), self.rank)

    def is_reduced(self) -> bool:
        return all(a != -b for a, b in zip(self.letters, self.letters[1:]))

    def __str__(self) -> str:
        return " ".join(map(format_letter, self.letters)) if self.letters else "1"


def reduce(raw: Iterable[int], rank: int) -> Word:
    raw = list(raw)
    _check_rank(raw, rank)
    return Word(reduce_letters(raw), rank)


def cyclic_reduce(w: Word) -> Word:
    lo, hi = 0, len(w.letters)
    while hi - lo > 1 and w.letters[lo] == -w.letters[hi - 1]:
        lo += 1
        hi -= 1
    return Word(w.letters[lo:hi], w.rank)


def apply_nielsen(theta, w: Word) -> Word:
    """Substitute x -> yx letterwise and reduce."""
    if theta.rank != w.rank:
        raise MalformedInputError("rank mismatch")
    out: list[int] = []
    for d in w.letters:
        out.extend(theta.apply_letter(d))
    return Word(reduce_letters(out), w.rank)
