import random

import pytest
from hypothesis import settings, strategies as st

from ttwalk.nielsen import NielsenSequence, enumerate_S, sequence_from_indices
from ttwalk.walk import sample_indices

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def letters(rank, max_size=20):
    gens = st.integers(1, rank)
    return st.lists(st.tuples(gens, st.sampled_from((1, -1))).map(lambda p: p[0] * p[1]), max_size=max_size)


def admissible_sequence(rank, n, seed, trial=0) -> NielsenSequence:
    return sequence_from_indices(sample_indices(rank, n, seed, trial), rank)


def cyclic_samples(rank, n, count, seed=0, min_len=1):
    """Cyclically admissible walk prefixes with lengths drawn from [min_len, n]."""
    from ttwalk.nielsen import is_cyclically_admissible

    rng = random.Random(seed)
    out, trial = [], 0
    while len(out) < count:
        length = rng.randint(min_len, n)
        seq = admissible_sequence(rank, length, seed, trial)
        trial += 1
        if is_cyclically_admissible(seq):
            out.append(seq)
    return out


@st.composite
def nielsen_autos(draw, rank):
    return draw(st.sampled_from(enumerate_S(rank)))


@pytest.fixture(scope="session")
def fib():
    from ttwalk.rose_map import RoseMap

    return RoseMap.from_images([(1, 2), (1,)], 2)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
