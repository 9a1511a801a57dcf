"""Integer matrix products along the walk, norms, spectral radii and Lyapunov estimates.

Matrices are tuples of rows of Python ints. The norm is the max row sum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ContradictionError, ConvergenceError, MalformedInputError, PreconditionError
from .nielsen import NielsenAuto, is_cyclically_admissible, seed_sequence, sequence_from_indices
from .walk import WalkConfig, block_indices, count_block_rows, sample_indices

Matrix = Sequence[Sequence[int]]


def identity(r: int) -> list[list[int]]:
    return [[int(i == j) for j in range(r)] for i in range(r)]


def elementary_matrix(t: NielsenAuto) -> list[list[int]]:
    M = identity(t.rank)
    M[abs(t.y) - 1][abs(t.x) - 1] = 1
    return M


def matmul(A: Matrix, B: Matrix) -> list[list[int]]:
    n, m, p = len(A), len(B), len(B[0])
    return [[sum(A[i][k] * B[k][j] for k in range(m)) for j in range(p)] for i in range(n)]


def left_apply(t: NielsenAuto, M: list[list[int]]) -> None:
    """In place: M <- E(t) M."""
    ry, rx = abs(t.y) - 1, abs(t.x) - 1
    M[ry] = [a + b for a, b in zip(M[ry], M[rx])]


def sequence_matrix(seq: Iterable[NielsenAuto], r: int | None = None) -> list[list[int]]:
    """M(theta_n) ... M(theta_1) for theta_1, ..., theta_n."""
    seq = list(seq)
    r = r if r is not None else seq[0].rank
    M = identity(r)
    for t in seq:
        left_apply(t, M)
    return M


def operator_norm(M: Matrix):
    return max(sum(abs(e) for e in row) for row in M)


def log_norm(M: Matrix) -> float:
    # math.log accepts arbitrarily large ints
    return math.log(operator_norm(M))


def _bool_matrix(M: Matrix) -> np.ndarray:
    return np.array([[e != 0 for e in row] for row in M], dtype=bool)


def _bool_power_positive(B: np.ndarray, k: int) -> bool:
    P = B.copy()
    for _ in range(k - 1):
        P = (P.astype(np.int64) @ B.astype(np.int64)) > 0
    return bool(P.all())


def is_irreducible(M: Matrix) -> bool:
    r = len(M)
    B = _bool_matrix(M) | np.eye(r, dtype=bool)
    return _bool_power_positive(B, max(r - 1, 1))


def is_positive(M: Matrix) -> bool:
    return all(e > 0 for row in M for e in row)


def positive_power(M: Matrix, cap: int) -> int | None:
    """Smallest k <= cap with M^k entrywise positive, or None."""
    B = _bool_matrix(M)
    P = B.copy()
    for k in range(1, cap + 1):
        if P.all():
            return k
        P = (P.astype(np.int64) @ B.astype(np.int64)) > 0
    return None


def is_permutation_matrix(M: Matrix) -> bool:
    return all(sum(row) == 1 for row in M) and all(sum(col) == 1 for col in zip(*M))


def _components(M: Matrix) -> list[list[int]]:
    import networkx as nx

    r = len(M)
    G = nx.DiGraph()
    G.add_nodes_from(range(r))
    G.add_edges_from((i, j) for i in range(r) for j in range(r) if M[i][j])
    return [sorted(c) for c in nx.strongly_connected_components(G)]


def _scaled_block(M: Matrix, idx: list[int]) -> tuple[np.ndarray, int]:
    # scale by a power of two so that row sums are at most 1
    shift = max(sum(M[i][j] for j in idx) for i in idx).bit_length()
    scale = 1 << shift
    B = np.array([[M[i][j] / scale for j in idx] for i in idx], dtype=float)
    return B, shift


def _block_radius(B: np.ndarray, tol: float, max_iter: int) -> tuple[float, float]:
    """Collatz-Wielandt bracket on B + I; the shift makes an irreducible block primitive."""
    n = len(B)
    if n == 1:
        return float(B[0, 0]), float(B[0, 0])
    A = B + np.eye(n)
    x = np.ones(n)
    lo, hi = 0.0, math.inf
    for _ in range(max_iter):
        y = A @ x
        ratios = y / x
        lo, hi = max(lo, ratios.min()), min(hi, ratios.max())
        if hi - lo <= max(tol, 8e-16 * hi):
            break
        x = y / y.max()
    else:
        raise ConvergenceError("power iteration did not converge", estimate=(lo + hi) / 2 - 1)
    return lo - 1, hi - 1


def _radius_parts(M: Matrix, tol: float, max_iter: int) -> tuple[float, int]:
    """The spectral radius as (mantissa, shift) with value mantissa * 2**shift."""
    if not any(e for row in M for e in row):
        raise MalformedInputError("zero matrix")
    if any(e < 0 for row in M for e in row):
        raise MalformedInputError("matrix has negative entries")
    best = (0.0, 0)
    best_log = -math.inf
    for comp in _components(M):
        B, shift = _scaled_block(M, comp)
        lo, hi = _block_radius(B, math.ldexp(tol, -shift), max_iter)
        val = (lo + hi) / 2
        if val <= 0:
            continue
        lg = math.log(val) + shift * math.log(2)
        if lg > best_log:
            best, best_log = (val, shift), lg
    return best


def spectral_radius(M: Matrix, tol: float = 1e-10, max_iter: int = 100_000, cross_check: bool = False) -> float:
    val, shift = _radius_parts(M, tol, max_iter)
    lam = math.ldexp(val, shift)
    if cross_check and len(M) <= 4:
        ref = charpoly_radius(M)
        if abs(lam - ref) > max(10 * tol, 1e-9 * ref):
            raise ConvergenceError(f"power iteration {lam} disagrees with polynomial roots {ref}", estimate=lam)
    return lam


def log_spectral_radius(M: Matrix, tol: float = 1e-10, max_iter: int = 100_000) -> float:
    val, shift = _radius_parts(M, tol, max_iter)
    return math.log(val) + shift * math.log(2) if val > 0 else -math.inf


def charpoly_radius(M: Matrix, dps: int = 50) -> float:
    """Largest root modulus of the exact characteristic polynomial."""
    import mpmath
    import sympy

    x = sympy.Symbol("x")
    poly = sympy.Matrix(M).charpoly(x)
    best = 0.0
    # square-free factors have simple roots, which polyroots handles reliably
    for factor, _ in sympy.sqf_list(poly.as_expr(), x)[1]:
        coeffs = [int(c) for c in sympy.Poly(factor, x).all_coeffs()]
        if len(coeffs) < 2:
            continue
        with mpmath.workdps(dps):
            roots = mpmath.polyroots(coeffs, maxsteps=2000, extraprec=4 * dps)
            best = max(best, float(max(abs(z) for z in roots)))
    return best


def tao_bounds_check(M: Matrix, tol: float = 1e-8) -> bool:
    """lambda(M) <= ||M|| <= r lambda(M)^2 for a matrix with all entries at least 1."""
    if any(e < 1 for row in M for e in row):
        raise PreconditionError("every entry must be at least 1")
    r = len(M)
    lam = spectral_radius(M, tol=tol * 1e-2)
    norm = operator_norm(M)
    slack = tol * max(1.0, norm)
    return lam <= norm + slack and norm <= r * lam * lam + slack


def _require_expanding(M: Matrix) -> None:
    if not is_irreducible(M):
        raise PreconditionError("transition matrix is reducible")
    if is_permutation_matrix(M):
        raise PreconditionError("permutation matrix: the map is not expanding")


def stretch_factor(f, tol: float = 1e-10) -> float:
    M = f.transition_matrix
    _require_expanding(M)
    lam = spectral_radius(M, tol=tol)
    if lam <= 1:
        raise ContradictionError(f"irreducible non-permutation matrix with radius {lam}")
    return lam


def log_stretch_factor(f, tol: float = 1e-10) -> float:
    M = f.transition_matrix
    _require_expanding(M)
    return log_spectral_radius(M, tol=tol)


def word_length_lower_bound(f, qa: float) -> float:
    """log(stretch factor) / log(qa): a floor on word length when generators have length <= qa."""
    if qa <= 1:
        raise MalformedInputError("qa must exceed 1")
    return log_stretch_factor(f) / math.log(qa)


def _as_items(traj) -> tuple:
    if hasattr(traj, "items") and not isinstance(traj, (list, tuple)):
        items = traj.items
        return tuple(items.items) if hasattr(items, "items") else tuple(items)
    return tuple(traj)


def log_norm_process(traj, n: int) -> float:
    """X_n = log of the norm of M(theta_n) ... M(theta_1); X_0 = 0."""
    items = _as_items(traj)
    if n < 0 or n > len(items):
        raise MalformedInputError("n outside the trajectory")
    if n == 0:
        return 0.0
    return log_norm(sequence_matrix(items[:n]))


def log_norm_path(items: Sequence[NielsenAuto], checkpoints: Iterable[int]) -> dict[int, float]:
    checkpoints = sorted(set(checkpoints))
    r = items[0].rank
    M = identity(r)
    out = {}
    k = 0
    for n in checkpoints:
        while k < n:
            left_apply(items[k], M)
            k += 1
        out[n] = log_norm(M) if n else 0.0
    return out


@dataclass(frozen=True)
class LyapunovEstimate:
    ell1_hat: float
    n: int
    trials: int
    stderr: float


def trial_rate(config: WalkConfig, t: int) -> float:
    items = sequence_from_indices(sample_indices(config.rank, config.length, config.seed, t), config.rank).items
    return log_norm_process(items, config.length) / config.length


def estimate_lyapunov(config: WalkConfig) -> LyapunovEstimate:
    rates = np.array([trial_rate(config, t) for t in range(config.trials)])
    ell = float(rates.mean())
    stderr = float(rates.std(ddof=1) / math.sqrt(len(rates))) if len(rates) > 1 else math.nan
    if ell <= 0:
        raise ContradictionError(f"nonpositive Lyapunov estimate {ell}")
    return LyapunovEstimate(ell, config.length, config.trials, stderr)


def positivity_lower_bound(alpha: float, k: int) -> float:
    """(alpha / 2k) log 2, with alpha the per-step occurrence rate of a positive block of length k."""
    return alpha / (2 * k) * math.log(2)


def seed_occurrence_rate(config: WalkConfig) -> float:
    """Measured occurrences of the seed block per step, over the configured trials."""
    from .walk import sample_index_matrix

    block = block_indices(seed_sequence(config.rank).items)
    hits = count_block_rows(sample_index_matrix(config), block).sum()
    return float(hits) / (config.trials * config.length)


@dataclass(frozen=True)
class GrowthBandReport:
    ell1_hat: float
    lower: float
    upper: float
    rates: dict[int, float]

    @property
    def in_band(self) -> dict[int, bool]:
        return {n: self.lower <= v <= self.upper for n, v in self.rates.items()}

    @property
    def all_in_band(self) -> bool:
        return all(self.in_band.values())


def growth_band_check(traj, indices: Iterable[int], ell1_hat: float, rel: float = 0.1) -> GrowthBandReport:
    """(1/n) log lambda of each cyclically admissible prefix against [(ell/2)(1 - rel), ell (1 + rel)]."""
    items = _as_items(traj)
    indices = sorted(set(indices))
    r = items[0].rank
    M = identity(r)
    k = 0
    rates = {}
    for n in indices:
        if n < 2 or not is_cyclically_admissible(items[:n]):
            raise PreconditionError(f"prefix length {n} is not cyclically admissible")
        while k < n:
            left_apply(items[k], M)
            k += 1
        rates[n] = log_spectral_radius(M) / n
    return GrowthBandReport(ell1_hat, ell1_hat / 2 * (1 - rel), ell1_hat * (1 + rel), rates)


def norm_process_rows(traj, checkpoints: Iterable[int]) -> list[dict]:
    """Rows (n, X_n, X_n/n, log lambda) for CSV output."""
    items = _as_items(traj)
    r = items[0].rank
    M = identity(r)
    k = 0
    rows = []
    for n in sorted(set(checkpoints)):
        while k < n:
            left_apply(items[k], M)
            k += 1
        x = log_norm(M) if n else 0.0
        rows.append({"n": n, "X_n": x, "X_n_over_n": x / n if n else 0.0, "log_lambda": log_spectral_radius(M)})
    return rows
