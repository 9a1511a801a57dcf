from fractions import Fraction

import pytest

from ttwalk.errors import PreconditionError
from ttwalk.invariants import (
    Caps,
    check_property_G,
    find_prevention_occurrence,
    has_cut_vertex,
    ideal_whitehead_graph,
    index_report,
    periodic_directions,
)
from ttwalk.nielsen import NielsenAuto, NielsenSequence, prevention_block, seed_sequence, successors
from ttwalk.rose_map import from_sequence, upsilon

from conftest import cyclic_samples


def with_seed(r, n, seed):
    """A cyclically admissible sequence of length n containing the seed block at a random spot."""
    import random

    from ttwalk.nielsen import enumerate_S, is_cyclically_admissible
    from ttwalk.walk import sample_indices

    s = seed_sequence(r)
    S = enumerate_S(r)
    pos = {t: i for i, t in enumerate(S)}
    rng = random.Random(seed)
    trial = 0
    while True:
        tail = [S[i] for i in sample_indices(r, n - len(s) + 1, seed, trial)]
        trial += 1
        seq = NielsenSequence(s.items + tuple(tail[1:]), r) if tail[0] in successors(s.items[-1]) else None
        if seq is not None and is_cyclically_admissible(seq):
            return seq.rotate(rng.randrange(n))


@pytest.mark.parametrize("r", [3, 4])
def test_seed_sequence_report(r):
    f = from_sequence(seed_sequence(r))
    rep = index_report(f, "certified")
    assert rep.gate_count == 2 * r - 1
    assert rep.index_list == (Fraction(3, 2) - r,)
    assert rep.rotationless_index == Fraction(3, 2) - r
    assert rep.geometric_index == 2 * r - 3 < 2 * r - 2
    assert rep.iw_vertices == 2 * r - 1 and rep.iw_is_complete
    iw = ideal_whitehead_graph(f, "certified")
    last = seed_sequence(r).items[-1]
    assert last.x not in iw.vertices
    assert not has_cut_vertex(iw, iw.vertices)


def test_index_report_requires_certificate():
    f = from_sequence(seed_sequence(3))
    with pytest.raises(PreconditionError):
        index_report(f, "inconclusive")


@pytest.mark.parametrize("r", [3, 4])
def test_property_g_on_seed_containing_sequences(r):
    for k in range(6):
        seq = with_seed(r, 40 + 10 * k, k)
        rep = check_property_G(seq)
        assert rep.prefix == "seed" and rep.no_pinp == "certified"
        assert rep.property_g
        assert rep.index.geometric_index == -2 * rep.index.rotationless_index
        assert 1 - r <= rep.index.rotationless_index < 0


def test_repeated_theta_is_not_certified():
    t = NielsenAuto(1, 2, 3)
    rep = check_property_G([t, t])
    assert rep.single_illegal_turn
    assert not rep.fully_irreducible_certified
    assert not rep.property_g


def test_rejects_non_cyclic():
    with pytest.raises(PreconditionError):
        check_property_G([NielsenAuto(1, 2, 3), NielsenAuto(1, -2, 3)])


def test_prevention_rotation_is_certified():
    p = prevention_block(3, (2, -3, 1))
    samples = cyclic_samples(3, 30, 40, seed=6)
    done = 0
    for s in samples:
        seq = NielsenSequence(s.items + p.items, 3)
        from ttwalk.nielsen import is_cyclically_admissible

        if not is_cyclically_admissible(seq):
            continue
        assert find_prevention_occurrence(seq) is not None
        rep = check_property_G(seq)
        assert rep.no_pinp == "certified"
        done += 1
    assert done > 0


def test_lone_axis_implies_index_and_no_cut_vertex():
    from ttwalk.invariants import periodic_directions
    from ttwalk.rose_map import whitehead_graph

    for seq in cyclic_samples(3, 80, 25, seed=12):
        rep = check_property_G(seq, Caps(inp_cap=32))
        if rep.lone_axis:
            assert rep.index.rotationless_index == Fraction(3, 2) - 3
            f = from_sequence(seq.rotate(rep.rotation))
            verts = periodic_directions(f)
            assert not has_cut_vertex(whitehead_graph(f).restrict(verts), verts)
        if rep.property_g:
            assert rep.lone_axis and rep.index.iw_is_complete
        d = rep.to_dict()
        assert d["no_pinp"] in ("certified", "search-negative", "inconclusive", "inp-found")


def test_periodic_directions_of_seed():
    f = from_sequence(seed_sequence(3))
    assert len(periodic_directions(f)) == 5
