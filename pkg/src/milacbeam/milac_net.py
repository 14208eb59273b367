"""Equivalent-baseband model of the analog multiport microwave network.

The network has ``n_rf + n_tx`` ports (RF chains first, antennas second)
and is described either by its admittance matrix Y or by its scattering
matrix referenced to a common port impedance. The beamforming response is
the antenna-to-RF-chain block of the corresponding transfer matrix; for a
reciprocal lossless network (symmetric, unitary scattering matrix) twice
that block always sits inside the unit spectral-norm ball, which is what
the optimizer's feasible set encodes.
"""

from dataclasses import dataclass

import numpy as np

#: Default reference impedance at every port, ohms.
Z0_DEFAULT = 50.0

#: Condition-number guard for the port-matrix inversions.
COND_LIMIT = 1e12


@dataclass
class MiLACNetwork:
    """Admittance description of the analog network.

    ``y`` is the (n_rf + n_tx) x (n_rf + n_tx) admittance matrix in
    siemens; ``n_rf`` input ports come first. Reciprocal networks have
    symmetric ``y``; lossless ones have purely imaginary ``y``.
    """

    y: np.ndarray
    n_rf: int
    z0: float = Z0_DEFAULT

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=complex)
        m = self.y.shape[0]
        if self.y.ndim != 2 or self.y.shape[1] != m:
            raise ValueError("admittance matrix must be square")
        if not 0 < self.n_rf < m:
            raise ValueError("n_rf must split the ports into two non-empty groups")
        if self.z0 <= 0:
            raise ValueError("reference impedance must be positive")

    @property
    def n_ports(self) -> int:
        return self.y.shape[0]

    @property
    def n_tx(self) -> int:
        return self.n_ports - self.n_rf


@dataclass
class ReciprocityLosslessReport:
    """Deviations of a scattering matrix from symmetry and unitarity."""

    ok: bool
    symmetry_deviation: float
    unitarity_deviation: float

    def __bool__(self) -> bool:
        return self.ok


def _guarded_port_matrix(net: MiLACNetwork) -> np.ndarray:
    a = np.eye(net.n_ports) + net.z0 * net.y
    if np.linalg.cond(a) > COND_LIMIT:
        raise np.linalg.LinAlgError(
            "I + Z0*Y is singular or too ill-conditioned to invert reliably")
    return a


def admittance_to_scattering(net: MiLACNetwork) -> np.ndarray:
    """Scattering matrix (I + Z0 Y)^(-1) (I - Z0 Y)."""
    a = _guarded_port_matrix(net)
    return np.linalg.solve(a, np.eye(net.n_ports) - net.z0 * net.y)


def scattering_to_beamforming(phi: np.ndarray, n_rf: int, n_tx: int) -> np.ndarray:
    """Physical beamforming response: half the antenna/RF-chain block of phi."""
    phi = np.asarray(phi)
    if phi.shape != (n_rf + n_tx, n_rf + n_tx):
        raise ValueError("scattering matrix does not match the port split")
    return 0.5 * phi[n_rf:n_rf + n_tx, :n_rf]


def admittance_to_beamforming(net: MiLACNetwork) -> np.ndarray:
    """Beamforming response straight from Y: a block of (I + Z0 Y)^(-1)."""
    a = _guarded_port_matrix(net)
    inv = np.linalg.solve(a, np.eye(net.n_ports))
    return inv[net.n_rf:, :net.n_rf]


def check_reciprocal_lossless(phi: np.ndarray,
                              tol: float = 1e-10) -> ReciprocityLosslessReport:
    """Check phi for symmetry (reciprocity) and unitarity (losslessness)."""
    phi = np.asarray(phi)
    if phi.ndim != 2 or phi.shape[0] != phi.shape[1]:
        raise ValueError("scattering matrix must be square")
    m = phi.shape[0]
    sym_dev = float(np.linalg.norm(phi - phi.T))
    uni_dev = float(np.linalg.norm(np.conj(phi).T @ phi - np.eye(m)))
    ok = (sym_dev <= tol * float(np.linalg.norm(phi))
          and uni_dev <= tol * float(np.sqrt(m)))
    return ReciprocityLosslessReport(ok=ok, symmetry_deviation=sym_dev,
                                     unitarity_deviation=uni_dev)


def spectral_norm(x: np.ndarray) -> float:
    """Largest singular value."""
    x = np.asarray(x)
    if x.size == 0:
        return 0.0
    return float(np.linalg.norm(x, 2))


def random_reactive_admittance(n_ports: int, rng: np.random.Generator,
                               scale: float = 1.0 / Z0_DEFAULT) -> np.ndarray:
    """Random purely imaginary symmetric admittance (reciprocal, lossless)."""
    b = rng.standard_normal((n_ports, n_ports)) * scale
    return 1j * (b + b.T) / 2.0
