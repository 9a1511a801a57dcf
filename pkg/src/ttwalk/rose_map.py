"""Graph maps of the rose: derivatives, turns, gates, Whitehead graphs, transition matrices.

A ``RoseMap`` stores the edge images explicitly, a factorization into elementary
maps (Nielsen automorphisms and signed permutations, applied innermost first), or
both. Images of long compositions grow exponentially, so everything except the
images themselves is computed from the factorization when one is present.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .errors import CapExceededError, MalformedInputError, PreconditionError
from .free_group import (
    Word,
    direction_key,
    directions,
    format_letter,
    invert_letters,
    reduce_letters,
    split_letters,
)
from .nielsen import NielsenAuto, NielsenSequence, as_sequence, upsilon_edges

MAX_EXPLICIT_LETTERS = 2_000_000


class ImageTooLarge(CapExceededError):
    pass


def turn(a: int, b: int) -> frozenset:
    """Unordered pair of directions; a degenerate turn is a one-element set."""
    return frozenset((a, b))


def turn_pair(t: frozenset) -> tuple[int, int]:
    items = sorted(t, key=direction_key)
    return (items[0], items[-1])


def is_degenerate(t: frozenset) -> bool:
    return len(t) == 1


def format_turn(t: frozenset) -> str:
    a, b = turn_pair(t)
    return "{" + format_letter(a) + "," + format_letter(b) + "}"


def path_turns(letters: Sequence[int]) -> set[frozenset]:
    return {turn(-a, b) for a, b in zip(letters, letters[1:])}


def map_turns(D: dict, turns: Iterable[frozenset]) -> set[frozenset]:
    return {turn(D[a], D[b]) for a, b in map(turn_pair, turns)}


def _factor_images(phi, r: int) -> list[tuple[int, ...]]:
    return [tuple(phi.apply_letter(i)) for i in range(1, r + 1)]


def _factor_derivative(phi, r: int) -> dict[int, int]:
    return {d: phi.apply_letter(d)[0] for d in directions(r)}


def _factor_turns(phi, r: int) -> set[frozenset]:
    out = set()
    for img in _factor_images(phi, r):
        out |= path_turns(img)
    return out


def _factor_matrix_apply(phi, r: int, M: list[list[int]]) -> list[list[int]]:
    """Return M(phi) @ M."""
    if isinstance(phi, NielsenAuto):
        out = [row[:] for row in M]
        ry, rx = abs(phi.y) - 1, abs(phi.x) - 1
        out[ry] = [a + b for a, b in zip(M[ry], M[rx])]
        return out
    P = [[0] * r for _ in range(r)]
    for j, img in enumerate(_factor_images(phi, r)):
        for d in img:
            P[abs(d) - 1][j] += 1
    return [[sum(P[i][k] * M[k][j] for k in range(r)) for j in range(r)] for i in range(r)]


@dataclass(frozen=True, eq=False)
class RoseMap:
    rank: int
    _images: tuple[tuple[int, ...], ...] | None = field(default=None, repr=False)
    factors: tuple | None = field(default=None, repr=False)
    regular: bool = True

    def __post_init__(self):
        if self._images is None and self.factors is None:
            raise MalformedInputError("a rose map needs images or factors")
        if self._images is not None:
            if len(self._images) != self.rank:
                raise MalformedInputError(f"need {self.rank} images, got {len(self._images)}")
            for img in self._images:
                if not img:
                    raise MalformedInputError("edge images must be nonempty")
                for d in img:
                    if d == 0 or abs(d) > self.rank:
                        raise MalformedInputError(f"letter {d} outside rank {self.rank}")

    @classmethod
    def from_images(cls, images: Sequence, rank: int | None = None) -> "RoseMap":
        imgs = []
        for w in images:
            letters = w.letters if isinstance(w, Word) else tuple(w)
            imgs.append(letters)
        rank = rank if rank is not None else len(imgs)
        reduced = tuple(reduce_letters(img) for img in imgs)
        return cls(rank, reduced, None, all(a == b for a, b in zip(reduced, imgs)))

    @classmethod
    def from_factors(cls, factors: Sequence, rank: int) -> "RoseMap":
        """Compose elementary maps, innermost first; regularity is read off the turns."""
        factors = tuple(factors)
        if not factors:
            return identity_map(rank)
        D = {d: d for d in directions(rank)}
        turns: set = set()
        regular = True
        for phi in factors:
            Dphi = _factor_derivative(phi, rank)
            if any(Dphi[a] == Dphi[b] for a, b in map(turn_pair, turns)):
                regular = False
                break
            turns = _factor_turns(phi, rank) | map_turns(Dphi, turns)
            D = {d: Dphi[D[d]] for d in D}
        if regular:
            m = cls(rank, None, factors, True)
            m.__dict__["derivative_map"] = D
            m.__dict__["taken_turns"] = frozenset(turns)
            return m
        images = _materialize(factors, rank)
        return cls(rank, images, None, False)

    @cached_property
    def images(self) -> tuple[Word, ...]:
        return tuple(Word(img, self.rank) for img in self.image_letters)

    @cached_property
    def image_letters(self) -> tuple[tuple[int, ...], ...]:
        if self._images is not None:
            return self._images
        total = sum(self.image_lengths)
        if total > MAX_EXPLICIT_LETTERS:
            raise ImageTooLarge(f"edge images have {total} letters in total")
        return _materialize(self.factors, self.rank)

    @property
    def has_explicit_images(self) -> bool:
        return self._images is not None or "image_letters" in self.__dict__

    @cached_property
    def image_lengths(self) -> tuple[int, ...]:
        M = self.transition_matrix
        return tuple(sum(M[i][j] for i in range(self.rank)) for j in range(self.rank))

    def image(self, d: int) -> tuple[int, ...]:
        img = self.image_letters[abs(d) - 1]
        return img if d > 0 else invert_letters(img)

    def apply(self, letters: Iterable[int]) -> tuple[int, ...]:
        out: list[int] = []
        for d in letters:
            out.extend(self.image(d))
        return reduce_letters(out)

    @cached_property
    def derivative_map(self) -> dict[int, int]:
        self._require_regular()
        return {d: self.image(d)[0] for d in directions(self.rank)}

    @cached_property
    def taken_turns(self) -> frozenset:
        self._require_regular()
        out = set()
        for img in self.image_letters:
            out |= path_turns(img)
        return frozenset(out)

    @cached_property
    def transition_matrix(self) -> tuple[tuple[int, ...], ...]:
        r = self.rank
        if self._images is not None:
            M = [[0] * r for _ in range(r)]
            for j, img in enumerate(self._images):
                for d in img:
                    M[abs(d) - 1][j] += 1
            return tuple(map(tuple, M))
        M = [[int(i == j) for j in range(r)] for i in range(r)]
        for phi in self.factors:
            M = _factor_matrix_apply(phi, r, M)
        return tuple(map(tuple, M))

    def _require_regular(self):
        if not self.regular:
            raise PreconditionError("map is not regular")

    def __eq__(self, other) -> bool:
        if not isinstance(other, RoseMap):
            return NotImplemented
        return self.rank == other.rank and self.image_letters == other.image_letters

    def __hash__(self):
        return hash((self.rank, self.image_letters))

    def __str__(self) -> str:
        return format_rose_map(self)


def _materialize(factors, rank: int) -> tuple[tuple[int, ...], ...]:
    images = [(i,) for i in range(1, rank + 1)]
    for phi in factors:
        images = [reduce_letters([e for d in img for e in phi.apply_letter(d)]) for img in images]
    return tuple(images)


def identity_map(rank: int) -> RoseMap:
    return RoseMap(rank, tuple((i,) for i in range(1, rank + 1)), None, True)


def from_nielsen(theta: NielsenAuto) -> RoseMap:
    return RoseMap.from_factors((theta,), theta.rank)


def from_sequence(seq) -> RoseMap:
    seq = as_sequence(seq)
    if not len(seq):
        raise MalformedInputError("empty sequence")
    return RoseMap.from_factors(seq.items, seq.rank)


def compose(outer: RoseMap, inner: RoseMap) -> RoseMap:
    """The map ``outer o inner``; regular iff no cancellation happens in any edge image."""
    if outer.rank != inner.rank:
        raise MalformedInputError("rank mismatch")
    r = outer.rank
    if outer.factors is not None and inner.factors is not None and outer.regular and inner.regular:
        return RoseMap.from_factors(inner.factors + outer.factors, r)
    raw = [[e for d in img for e in outer.image(d)] for img in inner.image_letters]
    reduced = tuple(reduce_letters(img) for img in raw)
    clean = all(len(a) == len(b) for a, b in zip(raw, reduced))
    if any(not img for img in reduced):
        raise PreconditionError("composition collapses an edge")
    return RoseMap(r, reduced, None, clean and outer.regular and inner.regular)


def power(f: RoseMap, k: int) -> RoseMap:
    if k < 1:
        raise MalformedInputError("power must be positive")
    out = f
    for _ in range(k - 1):
        out = compose(f, out)
    return out


def derivative(f: RoseMap) -> dict[int, int]:
    return dict(f.derivative_map)


def taken_turns(f: RoseMap) -> frozenset:
    return f.taken_turns


def transition_matrix(f: RoseMap) -> tuple[tuple[int, ...], ...]:
    f._require_regular()
    return f.transition_matrix


def gates(f: RoseMap, iterate_cap: int | None = None) -> list[frozenset]:
    """Directions grouped by eventual identification under iterates of Df."""
    D = f.derivative_map
    dirs = directions(f.rank)
    cap = iterate_cap if iterate_cap is not None else 2 * f.rank + 1
    current = {d: d for d in dirs}
    kernel = None
    for _ in range(cap + 1):
        current = {d: D[current[d]] for d in dirs}
        groups: dict[int, set] = {}
        for d in dirs:
            groups.setdefault(current[d], set()).add(d)
        new = frozenset(frozenset(g) for g in groups.values())
        if new == kernel:
            break
        kernel = new
    else:
        raise CapExceededError("gate partition did not stabilize")
    return sorted(kernel, key=lambda g: min(direction_key(d) for d in g))


def illegal_turns(f: RoseMap, iterate_cap: int | None = None) -> set[frozenset]:
    out = set()
    for g in gates(f, iterate_cap):
        gs = sorted(g, key=direction_key)
        out |= {turn(a, b) for i, a in enumerate(gs) for b in gs[i + 1:]}
    return out


def gate_index(f: RoseMap) -> dict[int, int]:
    return {d: k for k, g in enumerate(gates(f)) for d in g}


def is_legal_turn(f: RoseMap, t: frozenset) -> bool:
    if is_degenerate(t):
        return False
    a, b = turn_pair(t)
    g = gate_index(f)
    return g[a] != g[b]


def is_homotopy_equivalence(f: RoseMap) -> bool:
    if f.factors is not None:
        return True
    from .folds import is_basis

    return is_basis([w for w in f.image_letters], f.rank)


def is_train_track(f: RoseMap, iterate_cap: int | None = None) -> bool:
    if not is_homotopy_equivalence(f):
        raise PreconditionError("map is not a homotopy equivalence")
    if not f.regular:
        return False
    g = {d: k for k, gate in enumerate(gates(f, iterate_cap)) for d in gate}
    return all(g[a] != g[b] for a, b in map(turn_pair, f.taken_turns))


@dataclass(frozen=True)
class WhGraph:
    rank: int
    edges: frozenset
    restricted_to: tuple[int, ...] | None = None

    @property
    def vertices(self) -> list[int]:
        return directions(self.rank) if self.restricted_to is None else list(self.restricted_to)

    def restrict(self, verts: Iterable[int]) -> "WhGraph":
        vs = sorted(set(verts), key=direction_key)
        return WhGraph(self.rank, frozenset(e for e in self.edges if e <= set(vs)), tuple(vs))

    def to_networkx(self, verts: Iterable[int] | None = None):
        import networkx as nx

        G = nx.Graph()
        G.add_nodes_from(self.vertices if verts is None else verts)
        G.add_edges_from(turn_pair(e) for e in self.edges)
        return G

    def is_connected(self) -> bool:
        import networkx as nx

        return nx.is_connected(self.to_networkx())

    def degree(self, d: int) -> int:
        return sum(1 for e in self.edges if d in e)

    def __str__(self) -> str:
        return " ".join(sorted(map(format_turn, self.edges)))


def limited_whitehead_graph(f: RoseMap) -> WhGraph:
    return WhGraph(f.rank, f.taken_turns)


def stable_turns(f: RoseMap, cap: int = 1000) -> frozenset:
    """Union of the turns taken by all iterates of a train track map."""
    D = f.derivative_map
    base = set(f.taken_turns)
    current = frozenset(base)
    seen = {current}
    union = set(current)
    for _ in range(cap):
        if any(D[a] == D[b] for a, b in map(turn_pair, current)):
            raise PreconditionError("an iterate of the map is not regular")
        current = frozenset(base | map_turns(D, current))
        if current in seen:
            return frozenset(union)
        seen.add(current)
        union |= current
    raise CapExceededError(f"turn closure did not stabilize within {cap} iterations")


def whitehead_graph(f: RoseMap, cap: int = 1000) -> WhGraph:
    return WhGraph(f.rank, stable_turns(f, cap))


def upsilon(r: int, x: int, y: int) -> WhGraph:
    return WhGraph(r, upsilon_edges(r, x, y))


def is_upsilon(g: WhGraph, x: int, y: int) -> bool:
    return g.edges == upsilon_edges(g.rank, x, y)


def upsilon_shape(g: WhGraph) -> tuple[int, int] | None:
    """The pair (x, y) with ``g`` equal to Upsilon[x, y], found by degrees, or None."""
    ones = [d for d in g.vertices if g.degree(d) == 1]
    if len(ones) != 1:
        return None
    x = ones[0]
    (e,) = [e for e in g.edges if x in e]
    (nbr,) = e - {x}
    y = -nbr
    if abs(y) == abs(x):
        return None
    return (x, y) if is_upsilon(g, x, y) else None


def format_rose_map(f: RoseMap) -> str:
    lines = [f"rank {f.rank}"]
    for i, img in enumerate(f.image_letters, start=1):
        lines.append(f"{format_letter(i)} -> {''.join(map(format_letter, img))}")
    return "\n".join(lines) + "\n"


def parse_rose_map(text: str) -> RoseMap:
    rank = None
    images: dict[int, tuple[int, ...]] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("rank"):
            rank = int(line.split()[1])
            continue
        if "->" not in line:
            raise MalformedInputError(f"bad line {raw!r}")
        lhs, rhs = line.split("->", 1)
        src = split_letters(lhs)
        if len(src) != 1 or src[0] < 0:
            raise MalformedInputError(f"bad edge {lhs!r}")
        images[src[0]] = tuple(split_letters(rhs))
    if rank is None:
        rank = len(images)
    if sorted(images) != list(range(1, rank + 1)):
        raise MalformedInputError("need exactly one image per edge")
    return RoseMap.from_images([images[i] for i in range(1, rank + 1)], rank)


def find_inp(f: RoseMap, step_cap: int = 64):
    """Bounded search for an indivisible Nielsen path; see ``ttwalk._inp``."""
    from ._inp import search_inp

    return search_inp(f, step_cap)
