"""Elementary Nielsen automorphisms [x -> yx], admissibility, and prevention blocks."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Iterable, Sequence

from .errors import InvalidRankError, MalformedInputError, SearchFailure
from .free_group import (
    Word,
    apply_nielsen,
    direction_key,
    directions,
    format_letter,
    split_letters,
)


@dataclass(frozen=True, order=False)
class NielsenAuto:
    """The automorphism fixing every basis letter except ``x``, which goes to ``y x``."""

    x: int
    y: int
    rank: int

    def __post_init__(self):
        for d in (self.x, self.y):
            if d == 0 or abs(d) > self.rank:
                raise MalformedInputError(f"letter {d} outside rank {self.rank}")
        if abs(self.x) == abs(self.y):
            raise MalformedInputError("y must differ from x and its inverse")

    def apply_letter(self, d: int) -> tuple[int, ...]:
        if d == self.x:
            return (self.y, self.x)
        if d == -self.x:
            return (-self.x, -self.y)
        return (d,)

    def __call__(self, w: Word) -> Word:
        return apply_nielsen(self, w)

    def sort_key(self):
        return (direction_key(self.x), direction_key(self.y))

    def __str__(self) -> str:
        return f"[{format_letter(self.x)}->{format_letter(self.y)}{format_letter(self.x)}]"

    @classmethod
    def parse(cls, text: str, rank: int) -> "NielsenAuto":
        text = text.strip()
        if not (text.startswith("[") and text.endswith("]")) or "->" not in text:
            raise MalformedInputError(f"bad automorphism {text!r}")
        lhs, rhs = text[1:-1].split("->", 1)
        src = split_letters(lhs)
        dst = split_letters(rhs)
        if len(src) != 1 or len(dst) != 2 or dst[1] != src[0]:
            raise MalformedInputError(f"not of the form [x->yx]: {text!r}")
        return cls(src[0], dst[0], rank)


@dataclass(frozen=True)
class NielsenSequence:
    """theta_1, ..., theta_n; the composite map is theta_n o ... o theta_1."""

    items: tuple[NielsenAuto, ...]
    rank: int

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        for t in self.items:
            if t.rank != self.rank:
                raise MalformedInputError("mixed ranks in sequence")

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __getitem__(self, k):
        if isinstance(k, slice):
            return NielsenSequence(self.items[k], self.rank)
        return self.items[k]

    def __add__(self, other: "NielsenSequence") -> "NielsenSequence":
        if other.rank != self.rank:
            raise MalformedInputError("rank mismatch")
        return NielsenSequence(self.items + other.items, self.rank)

    def rotate(self, k: int) -> "NielsenSequence":
        k %= max(len(self.items), 1)
        return NielsenSequence(self.items[k:] + self.items[:k], self.rank)

    def power(self, k: int) -> "NielsenSequence":
        return NielsenSequence(self.items * k, self.rank)

    def __str__(self) -> str:
        return " ".join(map(str, self.items))

    @classmethod
    def parse(cls, text: str, rank: int) -> "NielsenSequence":
        tokens = text.replace("]", "] ").split()
        items = []
        buf = ""
        for tok in tokens:
            buf += tok
            if buf.endswith("]"):
                items.append(NielsenAuto.parse(buf, rank))
                buf = ""
        if buf:
            raise MalformedInputError(f"trailing text {buf!r}")
        return cls(tuple(items), rank)


def as_sequence(seq, rank: int | None = None) -> NielsenSequence:
    if isinstance(seq, NielsenSequence):
        return seq
    items = tuple(seq)
    if not items:
        raise MalformedInputError("empty sequence")
    return NielsenSequence(items, rank if rank is not None else items[0].rank)


@lru_cache(maxsize=None)
def _enumerate(r: int) -> tuple[NielsenAuto, ...]:
    dirs = sorted(directions(r), key=direction_key)
    return tuple(NielsenAuto(x, y, r) for x in dirs for y in dirs if abs(x) != abs(y))


def enumerate_S(r: int) -> list[NielsenAuto]:
    if r < 2:
        raise InvalidRankError(f"rank must be at least 2, got {r}")
    return list(_enumerate(r))


def _same_rank(a: NielsenAuto, b: NielsenAuto) -> None:
    if a.rank != b.rank:
        raise MalformedInputError("rank mismatch")


def is_admissible_pair(t: NielsenAuto, u: NielsenAuto) -> bool:
    _same_rank(t, u)
    return (u.x == t.x and u.y != -t.y) or (u.y == t.x and u.x != -t.y)


def successors(t: NielsenAuto) -> set[NielsenAuto]:
    return {u for u in _enumerate(t.rank) if is_admissible_pair(t, u)}


def predecessors(t: NielsenAuto) -> set[NielsenAuto]:
    return {u for u in _enumerate(t.rank) if is_admissible_pair(u, t)}


def _nonempty(seq) -> Sequence[NielsenAuto]:
    items = seq.items if isinstance(seq, NielsenSequence) else tuple(seq)
    if not items:
        raise MalformedInputError("empty sequence")
    return items


def is_admissible(seq) -> bool:
    items = _nonempty(seq)
    return all(is_admissible_pair(a, b) for a, b in zip(items, items[1:]))


def is_cyclically_admissible(seq) -> bool:
    items = _nonempty(seq)
    return is_admissible(items) and is_admissible_pair(items[-1], items[0])


def inverse(t: NielsenAuto) -> NielsenAuto:
    return NielsenAuto(t.x, -t.y, t.rank)


def inverse_sequence(seq) -> NielsenSequence:
    """Elementwise inverses; the right-walk counterpart of a left-walk sequence."""
    items = _nonempty(seq)
    return NielsenSequence(tuple(inverse(t) for t in items), items[0].rank)


def _check_letters(letters: Sequence[int], count: int, r: int) -> None:
    if len(letters) != count:
        raise MalformedInputError(f"need {count} letters, got {len(letters)}")
    if any(d == 0 or abs(d) > r for d in letters):
        raise MalformedInputError("letter outside rank")
    if len({abs(d) for d in letters}) != count:
        raise MalformedInputError("letters must be distinct and pairwise non-inverse")


def prevention_block(r: int, letters: Sequence[int] | None = None) -> NielsenSequence:
    """The admissible block whose presence as a prefix rules out periodic Nielsen paths."""
    if r < 3:
        raise InvalidRankError("prevention blocks need rank at least 3")
    if r == 3:
        a, b, c = letters if letters is not None else (1, 2, 3)
        _check_letters((a, b, c), 3, r)
        pairs = [(a, c), (-b, a), (-b, -c), (a, -b), (a, c), (a, b), (a, c), (a, c)]
    else:
        x, w, y, z = letters if letters is not None else (1, 2, 3, 4)
        _check_letters((x, w, y, z), 4, r)
        # y -> y w^-1 is the left form y^-1 -> w y^-1
        pairs = [(z, x), (w, z), (-y, w), (-y, x), (-y, w), (-y, x)]
    return NielsenSequence(tuple(NielsenAuto(p, q, r) for p, q in pairs), r)


def _turn(a: int, b: int) -> frozenset:
    return frozenset((a, b))


def upsilon_edges(r: int, x: int, y: int) -> frozenset:
    rest = [d for d in directions(r) if d != x]
    edges = {_turn(a, b) for i, a in enumerate(rest) for b in rest[i + 1:]}
    edges.add(_turn(x, -y))
    return frozenset(edges)


def _step_turns(t: NielsenAuto, turns: frozenset) -> frozenset:
    def d(e):
        return t.y if e == t.x else e

    return frozenset({_turn(-t.y, t.x)} | {_turn(d(a), d(b)) for a, b in map(tuple, turns)})


def _step_pattern(t: NielsenAuto, rows: tuple[int, ...]) -> tuple[int, ...]:
    # rows are bitmasks of the positivity pattern; M <- E * M adds row |x| to row |y|
    out = list(rows)
    out[abs(t.y) - 1] |= rows[abs(t.x) - 1]
    return tuple(out)


def _reach_upsilon(p: NielsenSequence, budget: int, width: int):
    r = p.rank
    turns: frozenset = frozenset()
    for t in p.items:
        turns = _step_turns(t, turns)
    last = p.items[-1]
    if turns == upsilon_edges(r, last.x, last.y):
        return ()
    beam = [(last, turns, ())]
    seen = set()
    explored = 0
    while beam and explored < budget:
        cand = []
        for last, turns, path in beam:
            for t in sorted(successors(last), key=NielsenAuto.sort_key):
                explored += 1
                nt = _step_turns(t, turns)
                if (t, nt) in seen:
                    continue
                seen.add((t, nt))
                target = upsilon_edges(r, t.x, t.y)
                miss = len(target ^ nt)
                if miss == 0:
                    return path + (t,)
                cand.append((miss, len(cand), t, nt, path + (t,)))
        cand.sort(key=lambda c: c[:2])
        beam = [c[2:] for c in cand[:width]]
    return None


def _close_positive(p: NielsenSequence, first: NielsenAuto, budget: int):
    r = p.rank
    rows = tuple(1 << i for i in range(r))
    for t in p.items:
        rows = _step_pattern(t, rows)
    full = (1 << r) - 1

    def done(t, rows):
        return all(row == full for row in rows) and is_admissible_pair(t, first)

    start = (p.items[-1], rows)
    if done(*start):
        return ()
    parent = {start: None}
    queue = deque([start])
    while queue and len(parent) < budget:
        state = queue.popleft()
        last, rows = state
        for t in sorted(successors(last), key=NielsenAuto.sort_key):
            nxt = (t, _step_pattern(t, rows))
            if nxt in parent:
                continue
            parent[nxt] = state
            if done(*nxt):
                tail = []
                while nxt != start:
                    tail.append(nxt[0])
                    nxt = parent[nxt]
                return tuple(reversed(tail))
            queue.append(nxt)
    return None


def find_seed_sequence(
    r: int,
    search_budget: int = 2_000_000,
    prefix: NielsenSequence | None = None,
    beam_width: int = 500,
) -> NielsenSequence:
    """An admissible extension of a prevention block meeting the seed certificates.

    The certificates are: positive transition matrix, limited Whitehead graph equal to
    the Upsilon graph of the last term, and cyclic admissibility. The Upsilon shape
    survives any admissible extension, so the search runs in two stages: a beam search
    over (last term, taken turns) until the shape appears, then a breadth-first search
    over (last term, positivity pattern) for positivity and closure. Deterministic.
    """
    if r < 3:
        raise InvalidRankError("seed sequences need rank at least 3")
    p = prefix if prefix is not None else prevention_block(r)
    grow = _reach_upsilon(p, search_budget, beam_width)
    if grow is None:
        raise SearchFailure(f"Upsilon shape not reached for rank {r} within budget {search_budget}")
    p = p + NielsenSequence(grow, r)
    close = _close_positive(p, p.items[0], search_budget)
    if close is None:
        raise SearchFailure(f"no positive closure for rank {r} within budget {search_budget}")
    return p + NielsenSequence(close, r)


def _load_fixture() -> dict[int, NielsenSequence]:
    text = resources.files(__package__).joinpath("data/seed_sequences.txt").read_text()
    return parse_seed_file(text)


def parse_seed_file(text: str) -> dict[int, NielsenSequence]:
    out = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        head, body = line.split(":", 1)
        r = int(head.strip().removeprefix("rank").strip())
        out[r] = NielsenSequence.parse(body, r)
    return out


def format_seed_file(seeds: dict[int, NielsenSequence]) -> str:
    lines = ["# rank: seed sequence (prevention block first), one per line"]
    for r in sorted(seeds):
        lines.append(f"rank {r}: {seeds[r]}")
    return "\n".join(lines) + "\n"


@lru_cache(maxsize=None)
def seed_sequence(r: int) -> NielsenSequence:
    """The cached seed sequence for rank ``r``, computed on demand if not in the fixture."""
    cached = _load_fixture()
    if r in cached:
        return cached[r]
    return find_seed_sequence(r)


def find_block(items: Sequence[NielsenAuto], block: Sequence[NielsenAuto], cyclic: bool = True) -> int | None:
    """Index of the first (cyclic) occurrence of ``block`` in ``items``."""
    n, q = len(items), len(block)
    if q == 0 or q > n:
        return None
    block = tuple(block)
    stop = n if cyclic else n - q + 1
    for i in range(stop):
        if all(items[(i + j) % n] == block[j] for j in range(q)):
            return i
    return None


def sequence_from_indices(indices: Iterable[int], r: int) -> NielsenSequence:
    S = _enumerate(r)
    return NielsenSequence(tuple(S[int(i)] for i in indices), r)
