"""Frequency-selective multipath channel generation and characterization.

Channels are D-tap in the time domain with an exponentially decaying,
normalized power delay profile. Tap vectors are circularly symmetric
complex Gaussian; the per-subcarrier frequency response is the unnormalized
DFT of the taps. ``verify_time_frequency_equivalence`` simulates one whole
OFDM block sample by sample and checks that it reproduces the
per-subcarrier model, which is the property the rest of the package relies
on.
"""

from dataclasses import dataclass

import numpy as np

from .model import SystemConfig
from .textio import dump_complex_array, load_complex_array


@dataclass
class PowerDelayProfile:
    """Normalized tap powers, geometrically decaying with factor exp(-1/decay)."""

    p: np.ndarray
    decay: float


@dataclass
class TapChannel:
    """Time-domain taps, shape (K, D, N_T)."""

    taps: np.ndarray

    @property
    def n_users(self) -> int:
        return self.taps.shape[0]

    @property
    def n_taps(self) -> int:
        return self.taps.shape[1]


@dataclass
class FreqChannel:
    """Per-subcarrier frequency responses, shape (K, N, N_T)."""

    h: np.ndarray

    @property
    def n_users(self) -> int:
        return self.h.shape[0]

    @property
    def n_subcarriers(self) -> int:
        return self.h.shape[1]


def generate_pdp(n_taps: int, decay: float) -> PowerDelayProfile:
    """Exponential power delay profile p_d proportional to exp(-d/decay), normalized."""
    if n_taps < 1:
        raise ValueError("need at least one tap")
    if decay <= 0:
        raise ValueError("decay factor must be positive")
    weights = np.exp(-np.arange(n_taps, dtype=float) / decay)
    return PowerDelayProfile(p=weights / weights.sum(), decay=float(decay))


def rms_delay_spread(pdp: PowerDelayProfile, sample_period: float = 1.0) -> float:
    """RMS delay spread in the units of ``sample_period``."""
    d = np.arange(len(pdp.p), dtype=float)
    mean_delay = float(pdp.p @ d)
    variance = float(pdp.p @ (d - mean_delay) ** 2)
    return sample_period * float(np.sqrt(max(variance, 0.0)))


def generate_taps(config: SystemConfig, seed: int | None = None) -> TapChannel:
    """Draw i.i.d. complex Gaussian taps with per-tap variance from the PDP.

    Each (user, tap) vector comes from its own substream keyed by
    (seed, k, d), so the output is independent of generation order and
    byte-identical for a fixed seed.
    """
    if seed is None:
        seed = config.seed
    pdp = generate_pdp(config.n_taps, config.pdp_decay)
    taps = np.empty((config.n_users, config.n_taps, config.n_tx), dtype=complex)
    for k in range(config.n_users):
        for d in range(config.n_taps):
            rng = np.random.default_rng(np.random.SeedSequence((seed, k, d)))
            z = rng.standard_normal((2, config.n_tx))
            taps[k, d] = np.sqrt(pdp.p[d] / 2.0) * (z[0] + 1j * z[1])
    return TapChannel(taps=taps)


def taps_to_frequency(taps: TapChannel, n_subcarriers: int) -> FreqChannel:
    """Unnormalized DFT of the taps across the delay axis, one bin per subcarrier."""
    t = taps.taps if isinstance(taps, TapChannel) else np.asarray(taps)
    if t.shape[1] > n_subcarriers:
        raise ValueError("more taps than subcarriers")
    return FreqChannel(h=np.fft.fft(t, n=n_subcarriers, axis=1))


def generate_channel(config: SystemConfig, seed: int | None = None) -> FreqChannel:
    """Convenience: taps plus DFT in one call."""
    return taps_to_frequency(generate_taps(config, seed), config.n_subcarriers)


def verify_time_frequency_equivalence(config: SystemConfig, taps: TapChannel,
                                      p_mat: np.ndarray, precoders: np.ndarray,
                                      rng: np.random.Generator) -> float:
    """Simulate one OFDM block through the time domain and compare models.

    The pipeline is: per-subcarrier digital precoding, orthonormal IDFT per
    RF chain, per-sample application of the physical analog response (half
    the scaled matrix), circular convolution with the taps (ideal cyclic
    prefix), orthonormal DFT at each receiver. Returns the worst deviation
    from the per-subcarrier product model, relative to the signal scale.
    """
    n = config.n_subcarriers
    k_users = config.n_users
    p_phys = np.asarray(p_mat) / 2.0

    symbols = (rng.standard_normal((n, k_users))
               + 1j * rng.standard_normal((n, k_users))) / np.sqrt(2.0)

    # frequency-domain RF-chain signal, then one orthonormal IDFT per chain
    s_freq = np.einsum("nrk,nk->nr", precoders, symbols)
    s_time = np.fft.ifft(s_freq, axis=0, norm="ortho")
    x_time = s_time @ p_phys.T                       # (N, N_T) transmit samples

    # Circular multipath combining, one output stream per user. The h^H x
    # reception convention conjugates the taps, which flips the delay sign:
    # sum_d conj(tap_d)^T x[(m+d) mod N] has per-subcarrier response h^H.
    received = np.zeros((n, k_users), dtype=complex)
    for d in range(config.n_taps):
        shifted = np.roll(x_time, -d, axis=0)
        received += shifted @ np.conj(taps.taps[:, d, :]).T
    rec_freq = np.fft.fft(received, axis=0, norm="ortho").T

    h = taps_to_frequency(taps, n).h
    reference = np.einsum("knt,tr,nr->kn", np.conj(h), p_phys, s_freq)

    scale = max(float(np.abs(reference).max()), float(np.abs(rec_freq).max()))
    if scale == 0.0:
        return 0.0
    return float(np.abs(rec_freq - reference).max() / scale)


def dump_channel(channel, path) -> None:
    """Write a TapChannel or FreqChannel to the documented text format."""
    if isinstance(channel, TapChannel):
        dump_complex_array(path, "tap-channel", channel.taps)
    elif isinstance(channel, FreqChannel):
        dump_complex_array(path, "freq-channel", channel.h)
    else:
        raise TypeError("expected a TapChannel or FreqChannel")


def load_channel(path):
    """Read back a channel dump; the header decides the returned type."""
    with open(path) as fh:
        name = fh.readline().split()[0]
    if name == "tap-channel":
        return TapChannel(taps=load_complex_array(path, "tap-channel"))
    if name == "freq-channel":
        return FreqChannel(h=load_complex_array(path, "freq-channel"))
    raise ValueError(f"{path}: not a channel dump (header '{name}')")
