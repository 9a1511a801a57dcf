"""The admissible random walk on elementary Nielsen automorphisms.

States are indices into ``enumerate_S(r)``. The walk starts uniformly and then
moves to a uniformly chosen admissible successor. Each trial draws from its own
Philox stream keyed by (seed, trial index), so results do not depend on how
trials are scheduled.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidRankError, MalformedInputError
from .nielsen import (
    NielsenAuto,
    NielsenSequence,
    enumerate_S,
    is_admissible,
    is_admissible_pair,
    is_cyclically_admissible,
    sequence_from_indices,
)

SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class WalkConfig:
    rank: int
    seed: int = 0
    length: int = 100
    trials: int = 1

    def __post_init__(self):
        if self.rank < 3:
            raise InvalidRankError("the walk needs rank at least 3")
        if self.length < 1 or self.trials < 1:
            raise MalformedInputError("length and trials must be positive")


@dataclass(frozen=True)
class Trajectory:
    indices: tuple[int, ...]
    config: WalkConfig
    trial_index: int
    items: NielsenSequence = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "items", sequence_from_indices(self.indices, self.config.rank))

    def __len__(self):
        return len(self.indices)

    def prefix(self, n: int) -> NielsenSequence:
        return self.items[:n]


@lru_cache(maxsize=None)
def chain_tables(r: int) -> tuple[np.ndarray, np.ndarray]:
    """Successor table (sorted indices, one row per state) and admissibility matrix."""
    S = enumerate_S(r)
    adm = np.array([[is_admissible_pair(a, b) for b in S] for a in S], dtype=bool)
    succ = np.array([np.flatnonzero(row) for row in adm], dtype=np.int64)
    for arr in (adm, succ):
        arr.setflags(write=False)
    return succ, adm


def out_degree(r: int) -> int:
    return 4 * r - 6


def transition_prob(t: NielsenAuto, u: NielsenAuto) -> Fraction:
    if t.rank != u.rank:
        raise MalformedInputError("rank mismatch")
    return Fraction(1, out_degree(t.rank)) if is_admissible_pair(t, u) else Fraction(0)


def exact_transition_matrix(r: int) -> list[list[Fraction]]:
    S = enumerate_S(r)
    return [[transition_prob(a, b) for b in S] for a in S]


def stationary_check(r: int) -> bool:
    """Uniform measure is stationary, and the chain is irreducible and aperiodic."""
    import networkx as nx

    S = enumerate_S(r)
    P = exact_transition_matrix(r)
    mu = Fraction(1, len(S))
    if any(sum(row) != 1 for row in P):
        return False
    if any(sum(mu * P[i][j] for i in range(len(S))) != mu for j in range(len(S))):
        return False
    G = nx.DiGraph()
    G.add_nodes_from(range(len(S)))
    G.add_edges_from((i, j) for i in range(len(S)) for j in range(len(S)) if P[i][j])
    self_loop = any(P[i][i] for i in range(len(S)))
    return nx.is_strongly_connected(G) and self_loop and nx.is_aperiodic(G)


def en_limit(r: int) -> Fraction:
    return Fraction(2 * r - 3, 2 * r * (r - 1))


def trial_rng(seed: int, trial_index: int) -> np.random.Generator:
    ss = np.random.SeedSequence([seed & SEED_MASK, trial_index])
    return np.random.Generator(np.random.Philox(ss))


def _walk(r: int, first: int, choices: np.ndarray) -> np.ndarray:
    succ, _ = chain_tables(r)
    out = np.empty(len(choices) + 1, dtype=np.int64)
    out[0] = first
    state = first
    for k, c in enumerate(choices, start=1):
        state = succ[state, c]
        out[k] = state
    return out


def _draws(r: int, n: int, seed: int, trial_index: int) -> tuple[int, np.ndarray]:
    rng = trial_rng(seed, trial_index)
    first = int(rng.integers(4 * r * (r - 1)))
    return first, rng.integers(0, out_degree(r), size=n - 1)


def sample_indices(r: int, n: int, seed: int, trial_index: int) -> np.ndarray:
    first, choices = _draws(r, n, seed, trial_index)
    return _walk(r, first, choices)


def sample_trajectory(config: WalkConfig, trial_index: int = 0) -> Trajectory:
    idx = sample_indices(config.rank, config.length, config.seed, trial_index)
    return Trajectory(tuple(int(i) for i in idx), config, trial_index)


def sample_index_matrix(config: WalkConfig, start: int = 0, stop: int | None = None) -> np.ndarray:
    """Rows are trials ``start..stop-1``; row t equals ``sample_indices(..., t)``."""
    stop = config.trials if stop is None else stop
    r, n = config.rank, config.length
    succ, _ = chain_tables(r)
    m = stop - start
    firsts = np.empty(m, dtype=np.int64)
    choices = np.empty((m, n - 1), dtype=np.int64)
    for k, t in enumerate(range(start, stop)):
        firsts[k], choices[k] = _draws(r, n, config.seed, t)
    out = np.empty((m, n), dtype=np.int64)
    out[:, 0] = firsts
    for j in range(1, n):
        out[:, j] = succ[out[:, j - 1], choices[:, j - 1]]
    return out


def is_E_n(prefix) -> bool:
    return is_cyclically_admissible(prefix)


def cyclic_flags(index_matrix: np.ndarray, r: int) -> np.ndarray:
    _, adm = chain_tables(r)
    return adm[index_matrix[:, -1], index_matrix[:, 0]]


@dataclass(frozen=True)
class Estimate:
    estimate: float
    stderr: float
    trials: int
    theoretical_limit: Fraction

    def within(self, k: float) -> bool:
        return abs(self.estimate - float(self.theoretical_limit)) < k * self.stderr


def binomial_estimate(hits: int, trials: int, limit: Fraction) -> Estimate:
    p = hits / trials
    return Estimate(p, math.sqrt(p * (1 - p) / trials), trials, limit)


def estimate_E_n_prob(config: WalkConfig, chunk: int = 20_000) -> Estimate:
    hits = 0
    for start in range(0, config.trials, chunk):
        stop = min(config.trials, start + chunk)
        hits += int(cyclic_flags(sample_index_matrix(config, start, stop), config.rank).sum())
    return binomial_estimate(hits, config.trials, en_limit(config.rank))


def _items(traj) -> tuple:
    if isinstance(traj, Trajectory):
        return traj.items.items
    if isinstance(traj, NielsenSequence):
        return traj.items
    return tuple(traj)


def count_occurrences(traj, block: Sequence[NielsenAuto]) -> int:
    items, block = _items(traj), tuple(block)
    if not block:
        raise MalformedInputError("empty block")
    q = len(block)
    return sum(1 for i in range(len(items) - q + 1) if items[i:i + q] == block)


def first_prefix_ending_with(traj, block: Sequence[NielsenAuto]) -> int | None:
    """Smallest n such that the length-n prefix ends with ``block``."""
    items, block = _items(traj), tuple(block)
    if not block:
        raise MalformedInputError("empty block")
    q = len(block)
    for n in range(q, len(items) + 1):
        if items[n - q:n] == block:
            return n
    return None


def block_indices(block: Iterable[NielsenAuto]) -> tuple[int, ...]:
    block = tuple(block)
    S = enumerate_S(block[0].rank)
    pos = {t: i for i, t in enumerate(S)}
    return tuple(pos[t] for t in block)


def count_block_rows(index_matrix: np.ndarray, block: Sequence[int]) -> np.ndarray:
    """Occurrences of a block of state indices in each row."""
    q = len(block)
    m, n = index_matrix.shape
    if q > n:
        return np.zeros(m, dtype=np.int64)
    hit = np.ones((m, n - q + 1), dtype=bool)
    for j, b in enumerate(block):
        hit &= index_matrix[:, j:n - q + 1 + j] == b
    return hit.sum(axis=1)


def block_probability(r: int, q: int) -> Fraction:
    """Stationary probability that a fixed admissible block of length q starts at a given step."""
    return Fraction(1, 4 * r * (r - 1)) * Fraction(1, out_degree(r)) ** (q - 1)


def trial_record(traj: Trajectory, block: Sequence[NielsenAuto] | None = None) -> dict:
    rec = {
        "trial": traj.trial_index,
        "n": len(traj),
        "cyclically_admissible": is_cyclically_admissible(traj.items),
        "admissible": is_admissible(traj.items),
        "sequence": str(traj.items),
    }
    if block is not None:
        rec["block_occurrences"] = count_occurrences(traj, block)
    return rec
