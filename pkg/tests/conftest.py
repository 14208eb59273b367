import numpy as np
import pytest

from milacbeam import SystemConfig
from milacbeam.optimizer import project_spectral_ball


def crandn(rng, *shape):
    """Circularly symmetric unit-variance complex Gaussians."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def small_config(seed=0, **overrides):
    kwargs = dict(n_subcarriers=8, n_tx=8, n_users=2, n_rf=2,
                  total_power=80.0, n_taps=4, pdp_decay=1.0, seed=seed)
    kwargs.update(overrides)
    return SystemConfig(**kwargs)


def random_state(rng, n=4, n_tx=4, k=2, n_rf=2, total_power=20.0):
    """A feasible (channel, analog matrix, precoders) triple with random data."""
    h = crandn(rng, k, n, n_tx)
    p = project_spectral_ball(crandn(rng, n_tx, n_rf) * 2.0)
    w = crandn(rng, n, n_rf, k)
    w *= np.sqrt(total_power / np.sum(np.abs(w) ** 2))
    return h, p, w


@pytest.fixture
def rng():
    return np.random.default_rng(0xBEEF)


def precoder_subproblem_data(h, p, u, omega):
    """Loop-built quadratic data of the digital-precoder subproblem.

    Deliberately re-derived with explicit outer products (no einsum) so the
    reference path shares no code with the implementation under test.
    """
    k_users, n, _ = h.shape
    n_rf = p.shape[1]
    q = np.zeros((n, n_rf, n_rf), dtype=complex)
    a = np.zeros((n, n_rf, k_users), dtype=complex)
    for i in range(n):
        m = np.zeros((h.shape[2], h.shape[2]), dtype=complex)
        for k in range(k_users):
            m += omega[k, i] * abs(u[k, i]) ** 2 * np.outer(h[k, i], np.conj(h[k, i]))
        q[i] = np.conj(p).T @ m @ p
        for k in range(k_users):
            a[i][:, k] = omega[k, i] * u[k, i] * (np.conj(p).T @ h[k, i])
    return q, a


def precoder_objective(w, q, a):
    quad = sum(np.real(np.trace(np.conj(w[i]).T @ q[i] @ w[i]))
               for i in range(q.shape[0]))
    lin = sum(np.real(np.trace(np.conj(a[i]).T @ w[i]))
              for i in range(q.shape[0]))
    return quad - 2.0 * lin


def reference_precoder_solve(q, a, total_power, max_iters=300_000):
    """Tiny-step projected gradient descent on the precoder subproblem.

    First-order reference: descend 2(Q w - a) with the inverse-Lipschitz
    step and rescale onto the power ball, until the objective stalls.
    Returns the final objective value.
    """
    lip = 2.0 * max(float(np.linalg.norm(q[i], 2)) for i in range(q.shape[0]))
    step = 1.0 / max(lip, 1e-12)
    w = np.zeros_like(a)
    f_prev = np.inf
    for it in range(max_iters):
        w = w - step * 2.0 * (q @ w - a)
        power = float(np.sum(np.abs(w) ** 2))
        if power > total_power:
            w *= np.sqrt(total_power / power)
        if it % 200 == 199:
            f = precoder_objective(w, q, a)
            if abs(f_prev - f) <= 1e-12 * max(1.0, abs(f)):
                return f
            f_prev = f
    return precoder_objective(w, q, a)
