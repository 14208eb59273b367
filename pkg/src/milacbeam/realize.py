"""Exact reproduction of fully-digital beamformer sets by the hybrid chain.

A set of per-subcarrier digital beamformers, stacked side by side into one
wide matrix, can be reproduced exactly by the hybrid architecture whenever
the RF-chain count reaches that matrix's rank: take the left singular
vectors as the analog matrix and the rest of the SVD as the digital part.
This keeps the analog matrix on the unit spectral-norm ball and preserves
the total digital power. With fewer chains the factorization is rank
limited and the best achievable residual is the tail singular-value energy.
"""

import numpy as np

from .textio import dump_complex_array, load_complex_array


def min_rf_chains(n_tx: int, n_users: int, n_subcarriers: int) -> int:
    """RF chains needed to reproduce arbitrary per-subcarrier beamformer sets."""
    if n_tx < 1 or n_users < 1 or n_subcarriers < 1:
        raise ValueError("dimensions must be positive")
    return int(min(n_tx, n_users * n_subcarriers))


def aggregate_targets(targets: np.ndarray) -> np.ndarray:
    """Stack per-subcarrier matrices (N, N_T, K) side by side into (N_T, K*N)."""
    t = np.asarray(targets)
    if t.ndim != 3:
        raise ValueError("expected targets with shape (N, N_T, K)")
    n, n_t, k = t.shape
    return t.transpose(1, 0, 2).reshape(n_t, n * k)


def split_aggregate(agg: np.ndarray, n_subcarriers: int) -> np.ndarray:
    """Inverse of aggregate_targets: (rows, K*N) back to (N, rows, K)."""
    rows, total = agg.shape
    if total % n_subcarriers:
        raise ValueError("column count is not a multiple of the subcarrier count")
    k = total // n_subcarriers
    return agg.reshape(rows, n_subcarriers, k).transpose(1, 0, 2)


def realize_fully_digital(targets: np.ndarray, rank_tol: float = 1e-10,
                          n_rf: int | None = None):
    """Factor a digital beamformer set into (analog matrix, digital precoders).

    Returns ``(p_mat, precoders, n_rf_used)`` where ``n_rf_used`` is the
    numerical rank actually carrying signal. With ``n_rf`` set, the
    factorization is truncated to at most that many chains (best low-rank
    fit) or padded with orthonormal null-space columns and zero rows up to
    it, so shapes always match the requested chain count.
    """
    t = np.asarray(targets, dtype=complex)
    agg = aggregate_targets(t)
    if not np.any(agg):
        raise ValueError("all-zero target set cannot be factored")
    n, n_t, _ = t.shape

    pad = n_rf is not None and n_rf > min(agg.shape)
    u, s, vh = np.linalg.svd(agg, full_matrices=pad)
    rank = int(np.count_nonzero(s > rank_tol * s[0]))
    keep = rank if n_rf is None else min(rank, n_rf)

    p_mat = u[:, :keep]
    w_agg = s[:keep, None] * vh[:keep]
    if n_rf is not None and n_rf > keep:
        extra = u[:, keep:n_rf]
        if extra.shape[1] < n_rf - keep:            # null space exhausted
            extra = np.hstack([extra, np.zeros((n_t, n_rf - keep - extra.shape[1]))])
        p_mat = np.hstack([p_mat, extra])
        w_agg = np.vstack([w_agg, np.zeros((n_rf - keep, w_agg.shape[1]))])

    return p_mat, split_aggregate(w_agg, n), keep


def realization_residual(p_mat: np.ndarray, precoders: np.ndarray,
                         targets: np.ndarray) -> float:
    """Relative Frobenius error of P @ W against the stacked targets."""
    agg_t = aggregate_targets(np.asarray(targets))
    if not np.any(agg_t):
        raise ValueError("all-zero target set")
    agg_w = aggregate_targets(np.asarray(precoders))
    return float(np.linalg.norm(p_mat @ agg_w - agg_t)
                 / np.linalg.norm(agg_t))


def dump_targets(targets: np.ndarray, path) -> None:
    """Store a per-subcarrier beamformer set (N, N_T, K) as text."""
    t = np.asarray(targets)
    if t.ndim != 3:
        raise ValueError("expected targets with shape (N, N_T, K)")
    dump_complex_array(path, "digital-targets", t)


def load_targets(path) -> np.ndarray:
    return load_complex_array(path, "digital-targets")
