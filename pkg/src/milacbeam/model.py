"""Core domain types and rate / MSE / objective evaluation.

Everything operates on the scaled analog matrix P (twice the physical
network response) together with scaled noise variances (4x the physical
ones), so the factor-of-four bookkeeping cancels out and downstream code
never has to carry it.

Array conventions used throughout the package:

* frequency channel ``h``:  (K, N, N_T)  -- one N_T-vector per user and
  subcarrier
* analog matrix ``p_mat``:  (N_T, N_RF)
* digital precoders ``w``:  (N, N_RF, K) -- column k of ``w[n]`` serves
  user k on subcarrier n
* equalizers ``u`` and weights ``omega``: (K, N)
* noise variances: scalar or (K, N), broadcastable
"""

from dataclasses import dataclass, field

import numpy as np

#: Relative slack used by the feasibility predicates below.
FEASIBILITY_TOL = 1e-10

LN2 = float(np.log(2.0))


@dataclass
class SystemConfig:
    """Dimensions and physical parameters of one downlink OFDM instance.

    ``total_power`` is the digital power budget in linear scale; with unit
    noise variances the transmit SNR is ``total_power / n_subcarriers``.
    ``noise_var`` holds the physical per-(user, subcarrier) noise variances
    (a scalar broadcasts). ``bandwidth_hz`` is carried as metadata only.
    """

    n_subcarriers: int
    n_tx: int
    n_users: int
    n_rf: int
    total_power: float
    n_taps: int = 16
    pdp_decay: float = 0.8
    noise_var: float | np.ndarray = 1.0
    bandwidth_hz: float = 300e6
    seed: int = 0

    def __post_init__(self):
        if self.n_subcarriers < 1 or self.n_tx < 1 or self.n_users < 1 or self.n_rf < 1:
            raise ValueError("all dimensions must be positive")
        if self.n_rf > self.n_tx:
            raise ValueError("n_rf must not exceed n_tx")
        if self.n_taps < 1 or self.n_taps > self.n_subcarriers:
            raise ValueError("need 1 <= n_taps <= n_subcarriers for a valid cyclic prefix")
        if self.total_power <= 0:
            raise ValueError("total_power must be positive")
        if self.pdp_decay <= 0:
            raise ValueError("pdp_decay must be positive")
        if np.any(np.asarray(self.noise_var, dtype=float) <= 0):
            raise ValueError("noise variances must be positive")

    @property
    def snr(self) -> float:
        """Linear transmit SNR (total power over subcarrier count)."""
        return self.total_power / self.n_subcarriers

    def noise_vars(self) -> np.ndarray:
        """Physical noise variances as a (K, N) array."""
        arr = np.asarray(self.noise_var, dtype=float)
        return np.broadcast_to(arr, (self.n_users, self.n_subcarriers)).copy()

    def scaled_noise_vars(self) -> np.ndarray:
        """Noise variances of the scaled formulation, 4x the physical ones."""
        return 4.0 * self.noise_vars()


def total_power_for_snr_db(n_subcarriers: int, snr_db: float) -> float:
    """Digital power budget realizing a given transmit SNR in dB."""
    return n_subcarriers * 10.0 ** (snr_db / 10.0)


@dataclass
class OptimizerTrace:
    """Per-iteration record of a block-coordinate-descent run."""

    objective_per_iter: list[float] = field(default_factory=list)
    sumrate_per_iter: list[float] = field(default_factory=list)
    inner_pgd_iters: list[int] = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def n_outer(self) -> int:
        return len(self.objective_per_iter)


def channel_array(channel) -> np.ndarray:
    """Accept either a FreqChannel-like object (with ``.h``) or a raw array."""
    return np.asarray(getattr(channel, "h", channel))


def milac_feasible(p_mat: np.ndarray, tol: float = FEASIBILITY_TOL) -> bool:
    """Membership of the analog matrix in the unit spectral-norm ball."""
    return float(np.linalg.norm(p_mat, 2)) <= 1.0 + tol


def precoder_power(precoders: np.ndarray) -> float:
    """Total digital power, the squared Frobenius norm summed over subcarriers."""
    return float(np.sum(np.abs(precoders) ** 2))


def power_feasible(precoders: np.ndarray, total_power: float,
                   tol: float = FEASIBILITY_TOL) -> bool:
    return precoder_power(precoders) <= total_power * (1.0 + tol)


def effective_gains(h_freq: np.ndarray, p_mat: np.ndarray,
                    precoders: np.ndarray) -> np.ndarray:
    """Complex gains g[k, n, j] = h_{k,n}^H P w_{j,n} for all user/stream pairs."""
    return np.einsum("knt,tr,nrj->knj", np.conj(h_freq), p_mat, precoders,
                     optimize=True)


def _signal_and_totals(gains: np.ndarray):
    k = gains.shape[0]
    idx = np.arange(k)
    sig = gains[idx, :, idx]                      # (K, N) desired-stream gain
    power = np.abs(gains) ** 2
    total = power.sum(axis=2)                     # (K, N) all-stream power
    return sig, total


def user_rates(h_freq: np.ndarray, p_mat: np.ndarray, precoders: np.ndarray,
               noise_scaled) -> np.ndarray:
    """Per-(user, subcarrier) achievable rates in bits/s/Hz."""
    sig, total = _signal_and_totals(effective_gains(h_freq, p_mat, precoders))
    sig_pow = np.abs(sig) ** 2
    interference = total - sig_pow
    return np.log2(1.0 + sig_pow / (interference + np.asarray(noise_scaled)))


def user_mses(h_freq: np.ndarray, p_mat: np.ndarray, precoders: np.ndarray,
              u: np.ndarray, noise_scaled) -> np.ndarray:
    """Per-(user, subcarrier) symbol MSE for given scalar equalizers."""
    sig, total = _signal_and_totals(effective_gains(h_freq, p_mat, precoders))
    interference = total - np.abs(sig) ** 2
    return (np.abs(1.0 - np.conj(u) * sig) ** 2
            + np.abs(u) ** 2 * (interference + np.asarray(noise_scaled)))


def compute_user_rate(h: np.ndarray, p_mat: np.ndarray, w_mat: np.ndarray,
                      k: int, noise_scaled: float) -> float:
    """Achievable rate of user k on one subcarrier, in bits/s/Hz.

    ``h`` is the user's channel vector, ``w_mat`` the subcarrier's digital
    precoder (columns are streams), ``noise_scaled`` the scaled noise
    variance (4x physical).
    """
    if noise_scaled <= 0:
        raise ValueError("noise variance must be positive")
    h = np.asarray(h)
    if h.shape != (p_mat.shape[0],):
        raise ValueError("channel vector does not match the analog matrix")
    g = np.conj(h) @ (p_mat @ w_mat)
    p = np.abs(g) ** 2
    interference = float(p.sum() - p[k])
    return float(np.log2(1.0 + p[k] / (interference + noise_scaled)))


def compute_avg_sum_rate(channel, p_mat: np.ndarray, precoders: np.ndarray,
                         noise_scaled) -> float:
    """Sum-rate over users, averaged over subcarriers."""
    h = channel_array(channel)
    rates = user_rates(h, p_mat, precoders, noise_scaled)
    return float(rates.sum() / h.shape[1])


def compute_mse(u: complex, p_mat: np.ndarray, w_mat: np.ndarray,
                h: np.ndarray, k: int, noise_scaled: float) -> float:
    """Symbol MSE for user k on one subcarrier under scalar equalizer u."""
    if noise_scaled <= 0:
        raise ValueError("noise variance must be positive")
    h = np.asarray(h)
    if h.shape != (p_mat.shape[0],):
        raise ValueError("channel vector does not match the analog matrix")
    g = np.conj(h) @ (p_mat @ w_mat)
    p = np.abs(g) ** 2
    interference = float(p.sum() - p[k])
    return float(np.abs(1.0 - np.conj(u) * g[k]) ** 2
                 + np.abs(u) ** 2 * (interference + noise_scaled))


def wmmse_objective(weights: np.ndarray, mses: np.ndarray,
                    n_subcarriers: int) -> float:
    """Weighted-MSE objective: mean over subcarriers of sum_k (w E / ln 2 - log2 w)."""
    w = np.asarray(weights, dtype=float)
    e = np.asarray(mses, dtype=float)
    if np.any(w <= 0):
        raise ValueError("weights must be positive")
    return float(np.sum(w * e / LN2 - np.log2(w)) / n_subcarriers)
