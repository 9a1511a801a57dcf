"""Bounded search for indivisible Nielsen paths of one-illegal-turn train track maps.

An INP has the form rho1^-1 rho2 with rho1, rho2 legal and the illegal turn
{d1, d2} between them. Write f = phi_N o ... o phi_1 with elementary factors.
Any legal edge paths rho1', rho2' extending rho1, rho2 have the property that,
after applying phi_1, ..., phi_k and tightening, both sides are nonempty and the
remaining factors send the middle turn to a degenerate or illegal turn. The
pruning pass grows rho1', rho2' edge by edge, pushing the pair through the
factors one at a time and discarding a branch as soon as that fails. If every
branch dies, there is no periodic INP of any period, since the same argument
applies to every power of f.

If branches survive, an exact fixed-point search runs on the explicit edge
images of f, f^2, ... and can return a witness together with its period. The
pruning pass never materializes edge images of long compositions: each side is
a stack of (letter, level) tokens expanded lazily from the front.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .errors import PreconditionError
from .free_group import directions, format_letter
from .rose_map import (
    ImageTooLarge,
    RoseMap,
    gate_index,
    illegal_turns,
    is_train_track,
    turn_pair,
)

INP_FOUND = "INP-FOUND"
NO_INP = "NO-INP"
INCONCLUSIVE = "INCONCLUSIVE"

EXPLICIT_LIMIT = 100_000
NODE_BUDGET = 200_000


@dataclass(frozen=True)
class InpResult:
    status: str
    illegal_turn: tuple[int, int]
    rho1: tuple[int, ...] | None = None
    rho2: tuple[int, ...] | None = None
    s1: Fraction | None = None
    s2: Fraction | None = None
    rounds: int = 0
    branches: int = 0
    period: int = 1

    @property
    def found(self) -> bool:
        return self.status == INP_FOUND

    @property
    def no_inp(self) -> bool:
        return self.status == NO_INP

    def describe(self) -> dict:
        out = {"status": self.status, "rounds": self.rounds, "branches": self.branches}
        if self.found:
            out["period"] = self.period
            out["rho1"] = " ".join(map(format_letter, self.rho1))
            out["rho2"] = " ".join(map(format_letter, self.rho2))
            out["s1"] = f"{self.s1.numerator}/{self.s1.denominator}"
            out["s2"] = f"{self.s2.numerator}/{self.s2.denominator}"
        return out


def is_expanding_irreducible(M) -> bool:
    r = len(M)
    reach = [[bool(M[i][j]) or i == j for j in range(r)] for i in range(r)]
    for k in range(r):
        for i in range(r):
            if reach[i][k]:
                for j in range(r):
                    if reach[k][j]:
                        reach[i][j] = True
    irreducible = all(all(row) for row in reach)
    return irreducible and sum(map(sum, M)) > r


def check_preconditions(f: RoseMap) -> tuple[int, int]:
    if not f.regular or not is_train_track(f):
        raise PreconditionError("not a train track map")
    bad = illegal_turns(f)
    if len(bad) != 1:
        raise PreconditionError(f"need exactly one illegal turn, found {len(bad)}")
    if not is_expanding_irreducible(f.transition_matrix):
        raise PreconditionError("map is not expanding with irreducible matrix")
    (t,) = bad
    return turn_pair(t)


def _factorization(f: RoseMap) -> tuple:
    if f.factors is not None:
        return f.factors
    from .folds import fold_decomposition

    d = fold_decomposition(f)
    factors = tuple(d.nielsen_part.items)
    if not d.perm_part.is_identity():
        factors += (d.perm_part,)
    return factors


class _Pruner:
    def __init__(self, f: RoseMap, d1: int, d2: int, step_cap: int, node_budget: int):
        self.r = f.rank
        self.factors = _factorization(f)
        self.N = len(self.factors)
        self.d1, self.d2 = d1, d2
        self.step_cap = step_cap
        self.node_budget = node_budget
        self.gate = gate_index(f)
        dirs = directions(self.r)
        self.dirs = dirs
        fd = [{d: phi.apply_letter(d)[0] for d in dirs} for phi in self.factors]
        suffix = [None] * (self.N + 1)
        suffix[self.N] = {d: d for d in dirs}
        for k in range(self.N - 1, -1, -1):
            suffix[k] = {d: suffix[k + 1][fd[k][d]] for d in dirs}
        self.suffix = suffix
        self.images = [{d: tuple(phi.apply_letter(d)) for d in dirs} for phi in self.factors]

    def front(self, side: list, level: int) -> int:
        while True:
            z, lv = side[-1]
            if lv == level:
                return z
            side.pop()
            img = self.images[lv % self.N][z]
            for w in reversed(img):
                side.append((w, lv + 1))

    def legal(self, a: int, b: int) -> bool:
        return a != b and self.gate[a] != self.gate[b]

    def doomed(self, level: int, a: int, b: int) -> bool:
        D = self.suffix[level % self.N]
        return self.legal(D[a], D[b])

    def extensions(self, last: int) -> list[int]:
        return [e for e in self.dirs if self.legal(-last, e)]

    def run(self) -> tuple[str, int, int]:
        d1, d2 = self.d1, self.d2
        stack = [(0, [(d1, 0)], [(d2, 0)], d1, d2, 0)]
        nodes = 0
        max_rounds = 0
        inconclusive = False
        while stack:
            level, A, B, lastA, lastB, rounds = stack.pop()
            nodes += 1
            if nodes > self.node_budget:
                return INCONCLUSIVE, max_rounds, nodes
            while True:
                while A and B and self.front(A, level) == self.front(B, level):
                    A.pop()
                    B.pop()
                if not A or not B:
                    if rounds >= self.step_cap:
                        inconclusive = True
                        break
                    optsA = [([(e, 0)], e) for e in self.extensions(lastA)] if not A else [(A, lastA)]
                    optsB = [([(e, 0)], e) for e in self.extensions(lastB)] if not B else [(B, lastB)]
                    for (nA, la), (nB, lb) in product(optsA, optsB):
                        stack.append((level, list(nA), list(nB), la, lb, rounds + 1))
                    break
                if self.doomed(level, self.front(A, level), self.front(B, level)):
                    break
                if level and level % self.N == 0:
                    rounds += 1
                    max_rounds = max(max_rounds, rounds)
                    if rounds > self.step_cap:
                        inconclusive = True
                        break
                level += 1
        return (INCONCLUSIVE if inconclusive else NO_INP), max_rounds, nodes


def _explicit_search(f: RoseMap, d1: int, d2: int, cap: int):
    gate = gate_index(f)
    dirs = directions(f.rank)

    def nexts(last):
        return [e for e in dirs if e != -last and gate[e] != gate[-last]]

    def fimg(path):
        out = []
        for e in path:
            out.extend(f.image(e))
        return out

    def completions(start, c, first):
        found = []
        for p in range(1, len(start) + 1):
            found += _check_prefix(start[:p], c, first)
        stack = [start] if _extendable(start, c) else []
        while stack:
            a = stack.pop()
            if len(a) >= cap:
                continue
            for e in nexts(a[-1]):
                b = a + (e,)
                found += _check_prefix(b, c, first)
                if _extendable(b, c):
                    stack.append(b)
        return found

    def _remainder(a, c):
        return fimg(a)[c:]

    def _comparable(a, R):
        m = min(len(a), len(R))
        return tuple(R[:m]) == tuple(a[:m])

    def _extendable(a, c):
        R = _remainder(a, c)
        return len(R) < len(a) and (not R or R[0] == a[0]) and _comparable(a, R)

    def _check_prefix(a, c, first):
        R = _remainder(a, c)
        if not R or R[0] != first or not _comparable(a, R):
            return []
        p = len(a)
        prev = len(fimg(a[:-1]))
        if not (prev - c - (p - 1) < 0 <= len(R) - p):
            return []
        stretch = len(f.image(a[-1]))
        if stretch == 1:
            return []
        return [(a, Fraction(c + p - 1 - prev, stretch - 1))]

    stack = [((d1,), (d2,))]
    nodes = 0
    while stack:
        al, be = stack.pop()
        nodes += 1
        if len(al) + len(be) > cap or nodes > NODE_BUDGET:
            continue
        fa, fb = fimg(al), fimg(be)
        c = 0
        while c < len(fa) and c < len(fb) and fa[c] == fb[c]:
            c += 1
        if c < len(fa) and c < len(fb):
            ca = completions(al, c, d1)
            cb = completions(be, c, d2) if ca else []
            if ca and cb:
                return ca[0], cb[0], nodes
            continue
        optsA = [al + (e,) for e in nexts(al[-1])] if c == len(fa) else [al]
        optsB = [be + (e,) for e in nexts(be[-1])] if c == len(fb) else [be]
        for x, y in product(optsA, optsB):
            stack.append((x, y))
    return None, None, nodes


def search_inp(f: RoseMap, step_cap: int = 64, node_budget: int = NODE_BUDGET) -> InpResult:
    d1, d2 = check_preconditions(f)
    status, rounds, nodes = _Pruner(f, d1, d2, step_cap, node_budget).run()
    if status == NO_INP:
        return InpResult(NO_INP, (d1, d2), rounds=rounds, branches=nodes)
    try:
        small = sum(f.image_lengths) <= EXPLICIT_LIMIT
    except ImageTooLarge:
        small = False
    if small:
        from .rose_map import compose

        g = f
        for period in range(1, max_period(f.rank) + 1):
            if period > 1:
                g = compose(f, g)
                if sum(len(img) for img in g.image_letters) > EXPLICIT_LIMIT:
                    break
            w1, w2, more = _explicit_search(g, d1, d2, step_cap)
            nodes += more
            if w1 is not None:
                return InpResult(INP_FOUND, (d1, d2), w1[0], w2[0], w1[1], w2[1], rounds, nodes, period)
    return InpResult(INCONCLUSIVE, (d1, d2), rounds=rounds, branches=nodes)


def max_period(r: int) -> int:
    """Periods tried by the explicit search: enough to make the 2r directions rotationless."""
    return 2 * r
