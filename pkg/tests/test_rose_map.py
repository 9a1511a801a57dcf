import pytest
from hypothesis import given, strategies as st

from ttwalk.errors import MalformedInputError, PreconditionError
from ttwalk.free_group import directions
from ttwalk.nielsen import NielsenAuto, enumerate_S, prevention_block
from ttwalk.rose_map import (
    RoseMap,
    compose,
    derivative,
    find_inp,
    format_rose_map,
    from_nielsen,
    from_sequence,
    gates,
    identity_map,
    illegal_turns,
    is_train_track,
    is_upsilon,
    limited_whitehead_graph,
    parse_rose_map,
    power,
    taken_turns,
    transition_matrix,
    turn,
    upsilon,
    upsilon_shape,
    whitehead_graph,
)
from ttwalk.spectral import matmul

from conftest import admissible_sequence, cyclic_samples

a, b, c = 1, 2, 3


def explicit(f):
    return RoseMap.from_images(f.image_letters, f.rank)


def substitute(seq, r):
    """Letterwise substitution of the factors, innermost first."""
    images = [[i] for i in range(1, r + 1)]
    for t in seq:
        new = []
        for img in images:
            out = []
            for d in img:
                out.extend(t.apply_letter(d))
            new.append(out)
        images = new
    return [tuple(img) for img in images]


def test_from_nielsen_basics():
    t = NielsenAuto(a, b, 3)
    f = from_nielsen(t)
    assert f.image_letters == ((b, a), (b,), (c,))
    assert taken_turns(f) == {turn(-b, a)}
    assert illegal_turns(f) == {turn(a, b)}
    D = derivative(f)
    assert D[a] == D[b] == b and D[c] == c
    assert is_train_track(f)
    assert limited_whitehead_graph(f).edges == {turn(-b, a)}
    assert transition_matrix(f) == ((1, 0, 0), (1, 1, 0), (0, 0, 1))


def test_identity_map():
    e = identity_map(3)
    assert taken_turns(e) == frozenset()
    assert illegal_turns(e) == set()
    assert len(gates(e)) == 6
    assert transition_matrix(e) == ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    f = from_sequence(admissible_sequence(3, 10, 1))
    assert compose(e, f) == f


def test_irregular_composition_rejected():
    f = compose(from_nielsen(NielsenAuto(a, b, 3)), from_nielsen(NielsenAuto(a, -b, 3)))
    assert not f.regular
    assert not is_train_track(f)
    with pytest.raises(PreconditionError):
        derivative(f)
    g = from_sequence([NielsenAuto(a, -b, 3), NielsenAuto(a, b, 3)])
    assert not g.regular


@given(st.integers(0, 10_000), st.integers(1, 25))
def test_factored_and_explicit_routes_agree(seed, n):
    seq = admissible_sequence(3, n, seed)
    f = from_sequence(seq)
    g = explicit(f)
    assert f.regular and g.regular
    assert list(f.image_letters) == substitute(seq, 3)
    assert derivative(f) == derivative(g)
    assert taken_turns(f) == taken_turns(g)
    assert transition_matrix(f) == transition_matrix(g)


def test_prevention_block_images():
    p = prevention_block(3)
    f = from_sequence(p)
    assert f.regular
    assert list(f.image_letters) == substitute(p, 3)


@given(st.integers(0, 10_000), st.integers(1, 25))
def test_turn_recursion_and_regularity(seed, n):
    seq = admissible_sequence(3, n, seed)
    prev = None
    for m in range(1, n + 1):
        g = from_sequence(seq[:m])
        t = seq.items[m - 1]
        Dt = derivative(from_nielsen(t))
        expected = {turn(-t.y, t.x)}
        if prev is not None:
            expected |= {turn(Dt[x], Dt[y]) for x, y in (tuple(u) for u in prev)}
        assert taken_turns(g) == expected
        image = set(derivative(g).values())
        assert len(image) == 2 * 3 - 1 and t.x not in image
        prev = taken_turns(g)


@given(st.integers(0, 10_000), st.integers(1, 15), st.integers(1, 15))
def test_matrix_and_derivative_multiplicative(seed, n, m):
    s1 = admissible_sequence(3, n, seed)
    s2 = admissible_sequence(3, m, seed, 1)
    f, g = explicit(from_sequence(s1)), explicit(from_sequence(s2))
    h = compose(g, f)
    if h.regular:
        assert [list(row) for row in transition_matrix(h)] == matmul(transition_matrix(g), transition_matrix(f))
        Dg, Df = derivative(g), derivative(f)
        assert derivative(h) == {d: Dg[Df[d]] for d in directions(3)}


def test_cyclic_compositions_are_one_illegal_turn_train_tracks():
    for seq in cyclic_samples(3, 40, 30, seed=2):
        f = from_sequence(seq)
        first = seq.items[0]
        assert is_train_track(f)
        assert illegal_turns(f) == {turn(first.x, first.y)}
        assert len(gates(f)) == 2 * 3 - 1


@pytest.mark.parametrize("k", [2, 3, 5])
def test_power_matrix(k):
    seq = cyclic_samples(3, 12, 1, seed=k)[0]
    f = from_sequence(seq)
    M = transition_matrix(f)
    Mk = M
    for _ in range(k - 1):
        Mk = matmul(Mk, M)
    assert [list(row) for row in transition_matrix(power(f, k))] == [list(row) for row in Mk]


def test_whitehead_connectivity_propagates():
    for seed in range(20):
        seq = admissible_sequence(3, 30, seed)
        was = False
        for m in range(1, 31):
            now = limited_whitehead_graph(from_sequence(seq[:m])).is_connected()
            assert now or not was
            was = now


def test_upsilon():
    g = upsilon(3, a, b)
    assert is_upsilon(g, a, b)
    assert g.is_connected() and len(g.vertices) == 6
    assert upsilon_shape(g) == (a, b)
    from ttwalk.rose_map import WhGraph

    dirs = directions(3)
    full = WhGraph(3, frozenset(turn(x, y) for i, x in enumerate(dirs) for y in dirs[i + 1:]))
    assert not is_upsilon(full, a, b)


def test_seed_whitehead_graph_is_upsilon():
    from ttwalk.nielsen import seed_sequence

    s = seed_sequence(3)
    f = from_sequence(s)
    last = s.items[-1]
    assert limited_whitehead_graph(f) == whitehead_graph(f) == upsilon(3, last.x, last.y)


def test_text_round_trip():
    f = from_sequence(admissible_sequence(3, 8, 4))
    text = format_rose_map(f)
    assert text.splitlines()[0] == "rank 3"
    assert parse_rose_map(text) == f
    with pytest.raises(MalformedInputError):
        parse_rose_map("rank 2\na1 -> a1a3\na2 -> a2\n")


def test_inp_found_on_fibonacci(fib):
    res = find_inp(fib)
    assert res.found and res.period == 2
    g = power(fib, res.period)
    # tightening oracle: g(rho1)^-1 g(rho2) tightens to rho1^-1 rho2
    from ttwalk.free_group import invert_letters, reduce_letters

    path = invert_letters(res.rho1) + tuple(res.rho2)
    assert reduce_letters(g.apply(path)) == reduce_letters(path)
    assert 0 < res.s1 <= 1 and 0 < res.s2 <= 1
