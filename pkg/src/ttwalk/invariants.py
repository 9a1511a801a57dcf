"""Index, ideal Whitehead graph and the property-G certificate for compositions on the rose."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from fractions import Fraction

from .errors import ContradictionError, PreconditionError
from .nielsen import (
    NielsenAuto,
    NielsenSequence,
    as_sequence,
    find_block,
    is_cyclically_admissible,
    prevention_block,
    seed_sequence,
)
from .rose_map import (
    RoseMap,
    WhGraph,
    find_inp,
    from_sequence,
    gates,
    illegal_turns,
    limited_whitehead_graph,
    turn_pair,
    upsilon_shape,
    whitehead_graph,
)
from .spectral import is_irreducible, is_permutation_matrix, positive_power

CERTIFIED = "certified"
SEARCH_NEGATIVE = "search-negative"
INCONCLUSIVE = "inconclusive"
INP_FOUND = "inp-found"
PINP_FREE = (CERTIFIED, SEARCH_NEGATIVE)


def _frac(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class IndexReport:
    gate_count: int
    index_list: tuple[Fraction, ...]
    rotationless_index: Fraction
    geometric_index: Fraction
    iw_vertices: int
    iw_is_complete: bool

    def to_dict(self) -> dict:
        return {
            "gate_count": self.gate_count,
            "index_list": [_frac(q) for q in self.index_list],
            "rotationless_index": _frac(self.rotationless_index),
            "geometric_index": _frac(self.geometric_index),
            "iw_vertices": self.iw_vertices,
            "iw_is_complete": self.iw_is_complete,
        }


def periodic_directions(f: RoseMap) -> list[int]:
    """Directions fixed by some iterate of Df: the eventual image of Df."""
    D = f.derivative_map
    current = set(D)
    while True:
        nxt = {D[d] for d in current}
        if nxt == current:
            return sorted(current, key=lambda d: (abs(d), d < 0))
        current = nxt


def _require_pinp_free(f: RoseMap, no_pinp: str) -> None:
    if no_pinp not in PINP_FREE:
        raise PreconditionError(f"no certificate that the map is free of periodic Nielsen paths ({no_pinp})")
    if len(illegal_turns(f)) != 1:
        raise PreconditionError("need exactly one illegal turn")
    M = f.transition_matrix
    if not is_irreducible(M) or is_permutation_matrix(M):
        raise PreconditionError("map is not expanding with irreducible matrix")


def ideal_whitehead_graph(f: RoseMap, no_pinp: str, cap: int = 1000) -> WhGraph:
    """The stable Whitehead graph restricted to periodic directions (single vertex, no pINPs)."""
    _require_pinp_free(f, no_pinp)
    return whitehead_graph(f, cap).restrict(periodic_directions(f))


def _complete_on(g: WhGraph, verts: list[int]) -> bool:
    n = len(verts)
    return len(g.edges) == n * (n - 1) // 2


def index_report(f: RoseMap, no_pinp: str, cap: int = 1000) -> IndexReport:
    _require_pinp_free(f, no_pinp)
    count = len(gates(f))
    index_list = (1 - Fraction(count, 2),) if count >= 3 else ()
    rot = sum(index_list, Fraction(0))
    if not 1 - f.rank <= rot < 0:
        raise ContradictionError(f"rotationless index {rot} outside [1 - r, 0)")
    verts = periodic_directions(f)
    iw = whitehead_graph(f, cap).restrict(verts)
    return IndexReport(count, index_list, rot, -2 * rot, len(verts), _complete_on(iw, verts))


def has_cut_vertex(g: WhGraph, verts: list[int]) -> bool:
    import networkx as nx

    G = g.to_networkx(verts)
    return any(next(nx.articulation_points(G.subgraph(c)), None) is not None for c in nx.connected_components(G))


def _block_at(items, i: int, block) -> bool:
    n = len(items)
    return len(block) <= n and all(items[(i + j) % n] == block[j] for j in range(len(block)))


def find_prevention_occurrence(seq: NielsenSequence) -> int | None:
    """Cyclic position of a prevention block with any admissible letter assignment."""
    items, r = seq.items, seq.rank
    n = len(items)
    for i in range(n):
        t1, t2 = items[i], items[(i + 1) % n]
        guesses = [(3, (t1.x, -t2.x, t1.y))]
        if r >= 4 and n > 2:
            guesses.append((4, (t1.y, t2.x, -items[(i + 2) % n].x, t1.x)))
        for kind, letters in guesses:
            if len({abs(d) for d in letters}) != len(letters):
                continue
            block = prevention_block(r, letters) if kind == 4 else _three_letter_block(r, letters)
            if _block_at(items, i, block.items):
                return i
    return None


def _three_letter_block(r: int, letters) -> NielsenSequence:
    a, b, c = letters
    pairs = [(a, c), (-b, a), (-b, -c), (a, -b), (a, c), (a, b), (a, c), (a, c)]
    return NielsenSequence(tuple(NielsenAuto(p, q, r) for p, q in pairs), r)


@dataclass(frozen=True)
class Caps:
    inp_cap: int = 64
    whitehead_cap: int = 1000
    power_k_cap: int = 16


@dataclass
class GReport:
    fully_irreducible_certified: bool
    ageometric_certified: bool
    single_illegal_turn: bool
    no_pinp: str
    iw_complete_2r_minus_1: bool
    lone_axis: bool
    rank: int = 0
    length: int = 0
    rotation: int = 0
    prefix: str = "none"
    primitive_power: int | None = None
    whitehead_connected: bool = False
    wh_upsilon: bool = False
    index: IndexReport | None = None
    inp_search: dict | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def property_g(self) -> bool:
        ok = (
            self.fully_irreducible_certified
            and self.ageometric_certified
            and self.single_illegal_turn
            and self.iw_complete_2r_minus_1
            and self.lone_axis
        )
        if not ok or self.index is None:
            return False
        r = self.rank
        return self.index.rotationless_index == Fraction(3, 2) - r and self.index.geometric_index == 2 * r - 3

    def to_dict(self) -> dict:
        out = asdict(self)
        out["index"] = self.index.to_dict() if self.index else None
        out["property_g"] = self.property_g
        return out


def rotate_to_certificate(seq: NielsenSequence) -> tuple[NielsenSequence, int, str]:
    """Rotate so a seed block, or failing that a prevention block, is a prefix."""
    r = seq.rank
    if r >= 3:
        k = find_block(seq.items, seed_sequence(r).items)
        if k is not None:
            return seq.rotate(k), k, "seed"
        k = find_prevention_occurrence(seq)
        if k is not None:
            return seq.rotate(k), k, "prevention"
    return seq, 0, "none"


def check_property_G(seq, caps: Caps | None = None) -> GReport:
    caps = caps or Caps()
    seq = as_sequence(seq)
    if not is_cyclically_admissible(seq):
        raise PreconditionError("sequence is not cyclically admissible")
    r = seq.rank
    rotated, k, prefix = rotate_to_certificate(seq)
    f = from_sequence(rotated)
    notes = []
    bad = illegal_turns(f)
    first = rotated.items[0]
    single = len(bad) == 1 and turn_pair(next(iter(bad))) == turn_pair(frozenset((first.x, first.y)))
    M = f.transition_matrix
    expanding = is_irreducible(M) and not is_permutation_matrix(M)
    power = positive_power(M, caps.power_k_cap)

    inp_info = None
    if prefix != "none":
        no_pinp = CERTIFIED
    elif not (single and expanding):
        no_pinp = INCONCLUSIVE
        notes.append("search preconditions fail: not an expanding one-illegal-turn train track")
    else:
        res = find_inp(f, caps.inp_cap)
        inp_info = res.describe()
        no_pinp = {"NO-INP": SEARCH_NEGATIVE, "INP-FOUND": INP_FOUND}.get(res.status, INCONCLUSIVE)

    wh = whitehead_graph(f, caps.whitehead_cap)
    connected = wh.is_connected()
    pinp_free = no_pinp in PINP_FREE
    fully = pinp_free and power is not None and connected and single
    ageometric = fully and pinp_free

    index = None
    iw_full = False
    lone = False
    if pinp_free and single and expanding:
        index = index_report(f, no_pinp, caps.whitehead_cap)
        iw_full = index.iw_vertices == 2 * r - 1 and index.iw_is_complete
        verts = periodic_directions(f)
        iw = wh.restrict(verts)
        ageometric = ageometric and index.geometric_index < 2 * r - 2
        lone = (
            fully
            and ageometric
            and index.rotationless_index == Fraction(3, 2) - r
            and not has_cut_vertex(iw, verts)
        )
    shape = upsilon_shape(limited_whitehead_graph(f))
    last = rotated.items[-1]
    return GReport(
        fully_irreducible_certified=fully,
        ageometric_certified=ageometric,
        single_illegal_turn=single,
        no_pinp=no_pinp,
        iw_complete_2r_minus_1=iw_full,
        lone_axis=lone,
        rank=r,
        length=len(seq),
        rotation=k,
        prefix=prefix,
        primitive_power=power,
        whitehead_connected=connected,
        wh_upsilon=shape == (last.x, last.y),
        index=index,
        inp_search=inp_info,
        notes=notes,
    )
