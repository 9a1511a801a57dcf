"""Stallings folds on the rose.

A one-illegal-turn train track map splits as a chain of proper full folds, each
an elementary Nielsen map, followed by a signed permutation of the edges.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import lcm
from typing import Sequence

from .errors import ContradictionError, MalformedInputError, PreconditionError
from .free_group import directions, format_letter, invert_letters
from .nielsen import NielsenAuto, NielsenSequence, is_cyclically_admissible
from .rose_map import (
    RoseMap,
    compose,
    from_sequence,
    illegal_turns,
    is_train_track,
    power,
    turn,
)


@dataclass(frozen=True)
class PermAuto:
    """a_i -> a_{sigma(i)}^{signs[i]}, with ``sigma`` 1-based."""

    sigma: tuple[int, ...]
    signs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "sigma", tuple(self.sigma))
        object.__setattr__(self, "signs", tuple(self.signs))
        r = len(self.sigma)
        if sorted(self.sigma) != list(range(1, r + 1)) or len(self.signs) != r:
            raise MalformedInputError("not a signed permutation")
        if any(s not in (1, -1) for s in self.signs):
            raise MalformedInputError("signs must be +1 or -1")

    @property
    def rank(self) -> int:
        return len(self.sigma)

    @classmethod
    def identity(cls, r: int) -> "PermAuto":
        return cls(tuple(range(1, r + 1)), (1,) * r)

    @classmethod
    def from_letters(cls, images: Sequence[int]) -> "PermAuto":
        return cls(tuple(abs(d) for d in images), tuple(1 if d > 0 else -1 for d in images))

    def __call__(self, d: int) -> int:
        i = abs(d)
        img = self.signs[i - 1] * self.sigma[i - 1]
        return img if d > 0 else -img

    def apply_letter(self, d: int) -> tuple[int]:
        return (self(d),)

    def compose(self, inner: "PermAuto") -> "PermAuto":
        return PermAuto.from_letters([self(inner(i)) for i in range(1, self.rank + 1)])

    def is_identity(self) -> bool:
        return self == PermAuto.identity(self.rank)

    @property
    def order(self) -> int:
        seen = set()
        out = 1
        for start in range(1, self.rank + 1):
            if start in seen:
                continue
            length, parity, i = 0, 1, start
            while i not in seen:
                seen.add(i)
                parity *= self.signs[i - 1]
                i = self.sigma[i - 1]
                length += 1
            out = lcm(out, length if parity == 1 else 2 * length)
        return out

    def to_rose_map(self) -> RoseMap:
        return RoseMap.from_images([(self(i),) for i in range(1, self.rank + 1)], self.rank)

    def __str__(self) -> str:
        return "(" + " ".join(f"{format_letter(i)}->{format_letter(self(i))}" for i in range(1, self.rank + 1)) + ")"


@dataclass(frozen=True)
class FoldDecomposition:
    nielsen_part: NielsenSequence
    perm_part: PermAuto

    def recompose(self) -> RoseMap:
        r = self.perm_part.rank
        return RoseMap.from_factors(tuple(self.nielsen_part.items) + (self.perm_part,), r)


def is_basis(words: Sequence[Sequence[int]], rank: int) -> bool:
    """Whether the words form a basis of F_rank, by Stallings folding of their wedge."""
    if len(words) != rank or any(not w for w in words):
        return False
    parent: list[int] = [0]
    out: list[dict[int, int]] = [{}]

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    def new_vertex():
        parent.append(len(parent))
        out.append({})
        return len(parent) - 1

    pending: list[tuple[int, int]] = []

    def attach(u, label, v):
        u, v = find(u), find(v)
        for a, lab, b in ((u, label, v), (v, -label, u)):
            if lab in out[a]:
                pending.append((out[a][lab], b))
            else:
                out[a][lab] = b
        settle()

    def settle():
        while pending:
            a, b = pending.pop()
            a, b = find(a), find(b)
            if a == b:
                continue
            if len(out[a]) < len(out[b]):
                a, b = b, a
            parent[b] = a
            for lab, c in out[b].items():
                if lab in out[a]:
                    pending.append((out[a][lab], c))
                else:
                    out[a][lab] = c
            out[b] = {}

    for w in words:
        v = 0
        for k, d in enumerate(w):
            nxt = 0 if k == len(w) - 1 else new_vertex()
            attach(v, d, nxt)
            v = nxt
    roots = {find(v) for v in range(len(parent))}
    if len(roots) != 1:
        return False
    (root,) = roots
    return all(d in out[root] and find(out[root][d]) == root for d in directions(rank))


def foldable_turns(f: RoseMap) -> set[frozenset]:
    D = f.derivative_map
    dirs = directions(f.rank)
    return {turn(a, b) for i, a in enumerate(dirs) for b in dirs[i + 1:] if D[a] == D[b]}


def fold_decomposition(f: RoseMap) -> FoldDecomposition:
    """Peel proper full folds from the inner side until a signed permutation remains."""
    r = f.rank
    if not f.regular:
        raise PreconditionError("map is not regular")
    images = [list(img) for img in f.image_letters]

    def image(d):
        img = images[abs(d) - 1]
        return tuple(img) if d > 0 else invert_letters(img)

    peeled = []
    complexity = sum(map(len, images))
    while True:
        D = {d: image(d)[0] for d in directions(r)}
        dirs = directions(r)
        foldable = [(a, b) for i, a in enumerate(dirs) for b in dirs[i + 1:] if D[a] == D[b]]
        if not foldable:
            break
        if len(foldable) > 1:
            raise PreconditionError(f"{len(foldable)} foldable turns")
        d1, d2 = foldable[0]
        w1, w2 = image(d1), image(d2)
        if len(w2) > len(w1):
            d1, d2, w1, w2 = d2, d1, w2, w1
        if w1 == w2:
            raise PreconditionError("complete fold: the map is not a homotopy equivalence")
        if w1[: len(w2)] != w2 or abs(d1) == abs(d2):
            raise ContradictionError("partial fold encountered")
        theta = NielsenAuto(d1, d2, r)
        rest = w1[len(w2):]
        images[abs(d1) - 1] = list(rest if d1 > 0 else invert_letters(rest))
        new = sum(map(len, images))
        if new >= complexity:
            raise ContradictionError("fold did not reduce complexity")
        complexity = new
        peeled.append(theta)
    if any(len(img) != 1 for img in images) or len({abs(img[0]) for img in images}) != r:
        raise PreconditionError("no foldable turn left but the map is not an isomorphism")
    perm = PermAuto.from_letters([img[0] for img in images])
    return FoldDecomposition(NielsenSequence(tuple(peeled), r), perm)


def conjugate_by_perm(psi: PermAuto, theta: NielsenAuto) -> NielsenAuto:
    """The theta' with g_psi o g_theta = g_theta' o g_psi."""
    return NielsenAuto(psi(theta.x), psi(theta.y), theta.rank)


def _require_one_illegal_turn_train_track(f: RoseMap) -> None:
    if not is_train_track(f):
        raise PreconditionError("not a train track map")
    if len(illegal_turns(f)) != 1:
        raise PreconditionError("need exactly one nondegenerate illegal turn")


def power_sequence(decomp: FoldDecomposition, p: int | None = None) -> NielsenSequence:
    """Nielsen factors of (psi o N)^p with every permutation moved to the inside.

    Requires psi^p = 1. The result is N^{psi^p}, ..., N^{psi^2}, N^{psi}, innermost first.
    """
    psi = decomp.perm_part
    p = psi.order if p is None else p
    r = psi.rank
    current = PermAuto.identity(r)
    blocks = []
    for _ in range(p):
        current = current.compose(psi)
        blocks.append(tuple(conjugate_by_perm(current, t) for t in decomp.nielsen_part))
    if not current.is_identity():
        raise PreconditionError(f"permutation part has order not dividing {p}")
    items = []
    for block in reversed(blocks):
        items.extend(block)
    return NielsenSequence(tuple(items), r)


def realize_power(f: RoseMap, p: int | None = None, verify: bool = True) -> tuple[int, NielsenSequence]:
    """A power of ``f`` written as a cyclically admissible composition of Nielsen maps."""
    _require_one_illegal_turn_train_track(f)
    decomp = fold_decomposition(f)
    if not len(decomp.nielsen_part):
        raise PreconditionError("the map is a graph isomorphism")
    p = decomp.perm_part.order if p is None else p
    seq = power_sequence(decomp, p)
    if not is_cyclically_admissible(seq):
        raise ContradictionError("realized sequence is not cyclically admissible")
    if verify and from_sequence(seq) != power(f, p):
        raise ContradictionError("realized sequence does not recompose to the power")
    return p, seq


def uniform_power(r: int) -> int:
    """An exponent killing every signed permutation of rank r."""
    return 2 * lcm(*range(1, r + 1))


def recomposition_receipt(f: RoseMap, decomp: FoldDecomposition) -> dict:
    g = decomp.recompose()
    return {
        "rank": f.rank,
        "nielsen_part": str(decomp.nielsen_part),
        "perm_part": str(decomp.perm_part),
        "input_images": [" ".join(map(format_letter, img)) for img in f.image_letters],
        "recomposed_images": [" ".join(map(format_letter, img)) for img in g.image_letters],
        "recomposition_ok": g == f,
    }


def twisted(perm: PermAuto, f: RoseMap) -> RoseMap:
    return compose(perm.to_rose_map(), f)
