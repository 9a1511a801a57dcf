import pytest
from hypothesis import given, strategies as st

from ttwalk.errors import MalformedInputError
from ttwalk.free_group import (
    Word,
    apply_nielsen,
    cyclic_reduce,
    directions,
    format_letter,
    invert_letters,
    parse_letter,
    reduce,
)
from ttwalk.nielsen import NielsenAuto, enumerate_S, inverse

from conftest import letters

a, b, c = 1, 2, 3


def naive_reduce(raw):
    w = list(raw)
    changed = True
    while changed:
        changed = False
        for i in range(len(w) - 1):
            if w[i] == -w[i + 1]:
                del w[i:i + 2]
                changed = True
                break
    return tuple(w)


def test_reduce_examples():
    assert reduce([a, -a], 3).letters == ()
    assert reduce([a, b, -b, a], 3).letters == (a, a)
    assert reduce([a, -b, b, -a, c], 3).letters == (c,)


def test_reduce_rejects_bad_rank_and_zero():
    with pytest.raises(MalformedInputError):
        reduce([4], 3)
    with pytest.raises(MalformedInputError):
        reduce([0], 3)


@given(st.integers(1, 4).flatmap(lambda r: st.tuples(st.just(r), letters(r))))
def test_reduce_matches_pair_deletion_and_is_idempotent(case):
    r, raw = case
    w = reduce(raw, r)
    assert w.letters == naive_reduce(raw)
    assert reduce(w.letters, r) == w
    assert len(w) <= len(raw)


def test_cyclic_reduce_examples():
    assert cyclic_reduce(Word((a, b, -a), 3)).letters == (b,)
    assert cyclic_reduce(Word((), 3)).letters == ()
    assert cyclic_reduce(reduce([-a, b, c, b, a], 3)).letters == (b, c, b)


def _rotations(w):
    return {w[k:] + w[:k] for k in range(max(len(w), 1))}


@given(letters(3))
def test_cyclic_reduce_invariant_under_rotation(raw):
    w = reduce(raw, 3)
    core = cyclic_reduce(w).letters
    for k in range(len(w)):
        rotated = reduce(w.letters[k:] + w.letters[:k], 3)
        assert cyclic_reduce(rotated).letters in _rotations(core)


def test_apply_nielsen_examples():
    theta = NielsenAuto(a, b, 3)
    assert apply_nielsen(theta, Word((a,), 3)).letters == (b, a)
    assert apply_nielsen(theta, Word((-a,), 3)).letters == (-a, -b)
    assert apply_nielsen(theta, Word((c,), 3)).letters == (c,)


@given(st.data())
def test_apply_nielsen_inverse_and_multiplicative(data):
    r = data.draw(st.integers(2, 4))
    theta = data.draw(st.sampled_from(enumerate_S(r)))
    u = reduce(data.draw(letters(r)), r)
    v = reduce(data.draw(letters(r)), r)
    assert apply_nielsen(inverse(theta), apply_nielsen(theta, u)) == u
    assert apply_nielsen(theta, u * v) == apply_nielsen(theta, u) * apply_nielsen(theta, v)


def test_text_round_trip():
    w = Word.parse("a1A2a3", 3)
    assert w.letters == (1, -2, 3)
    assert str(w) == "a1 A2 a3"
    assert Word.parse(str(w), 3) == w
    assert str(Word.parse("1", 3)) == "1"
    assert [parse_letter(format_letter(d)) for d in directions(3)] == directions(3)
    assert invert_letters((1, -2)) == (2, -1)
    with pytest.raises(MalformedInputError):
        Word.parse("a1x", 3)


def test_word_inverse():
    w = Word.parse("a1a2A3", 3)
    assert (w * w.inverse()).letters == ()
