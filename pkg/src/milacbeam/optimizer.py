"""Weighted-MMSE block-coordinate-descent solvers for the wideband problem.

The sum-rate maximization is handled through its weighted-MSE form: scalar
equalizers and positive MSE weights admit closed-form updates, the digital
precoders solve a power-constrained convex quadratic program via a single
bisected multiplier, and the shared analog matrix is updated by projected
gradient descent on the unit spectral-norm ball with a Lipschitz step.
Cycling through the four blocks never increases the transformed objective,
and after each equalizer/weight refresh the objective and the average
sum-rate add up to K/ln 2, which the per-iteration trace records.

Baseline schemes reuse the same skeleton: the fully-digital solver pins the
analog stage to identity, the analog-only solvers freeze the digital
precoders at a flat power split, and the phase-shifter variants replace the
ball projection with entrywise phase extraction (with a step-halving
acceptance rule, since that constraint set is not convex).
"""

from dataclasses import dataclass
from time import perf_counter

import numpy as np

from .model import (OptimizerTrace, SystemConfig, channel_array,
                    effective_gains, user_mses, user_rates, wmmse_objective)

_INIT_STREAM_TAG = 0x696E6974  # "init": keeps solver randomness off the channel streams

#: Weight cap applied when an MSE falls below 1e-14.
WEIGHT_CAP = 1e14


@dataclass
class SolverOptions:
    """Stopping rules and initialization choice for the BCD solvers."""

    max_outer: int = 200
    outer_tol: float = 1e-5
    max_pgd: int = 100
    pgd_tol: float = 1e-6
    bisection_tol: float = 1e-8
    init_scheme: str = "matched-filter"

    def __post_init__(self):
        if self.max_outer < 1 or self.max_pgd < 1:
            raise ValueError("iteration limits must be positive")
        if min(self.outer_tol, self.pgd_tol, self.bisection_tol) <= 0:
            raise ValueError("tolerances must be positive")
        if self.init_scheme not in ("matched-filter", "random-projected"):
            raise ValueError(f"unknown init scheme: {self.init_scheme!r}")


@dataclass
class PgdWorkspace:
    """Quadratic-form data of the analog-matrix subproblem.

    ``m`` (N, N_T, N_T) and ``c`` (N, N_RF, N_RF) are Hermitian PSD,
    ``d`` is (N, N_RF, N_T); ``step`` is the Lipschitz step size (None when
    the quadratic part vanishes and the analog update should be skipped).
    """

    m: np.ndarray
    c: np.ndarray
    d: np.ndarray
    m_norms: np.ndarray | None = None
    step: float | None = None


# ---------------------------------------------------------------------------
# closed-form block updates


def update_equalizers(channel, p_mat: np.ndarray, precoders: np.ndarray,
                      noise_scaled) -> np.ndarray:
    """MMSE scalar equalizers, shape (K, N)."""
    h = channel_array(channel)
    gains = effective_gains(h, p_mat, precoders)
    idx = np.arange(gains.shape[0])
    sig = gains[idx, :, idx]
    total = (np.abs(gains) ** 2).sum(axis=2)
    return sig / (total + np.asarray(noise_scaled))


def update_weights(channel, p_mat: np.ndarray, precoders: np.ndarray,
                   u: np.ndarray) -> np.ndarray:
    """Optimal MSE weights 1/E at the MMSE equalizers, shape (K, N).

    Requires ``u`` to come from :func:`update_equalizers`; the inverted
    quantity is then real in (0, 1]. Weights are capped at 1e14 when the
    MSE collapses below 1e-14.
    """
    h = channel_array(channel)
    gains = effective_gains(h, p_mat, precoders)
    idx = np.arange(gains.shape[0])
    sig = gains[idx, :, idx]
    resid = 1.0 - np.conj(u) * sig
    imag_tol = 1e-12 * (1.0 + np.abs(np.conj(u) * sig))
    if np.any(np.abs(resid.imag) > imag_tol):
        raise ValueError("equalizers are not MMSE-consistent; weights would be complex")
    mse = np.maximum(resid.real, 1.0 / WEIGHT_CAP)
    return 1.0 / mse


def update_digital_precoders(channel, p_mat: np.ndarray, u: np.ndarray,
                             omega: np.ndarray, total_power: float,
                             bisection_tol: float = 1e-8,
                             return_multiplier: bool = False):
    """Exact digital-precoder update under the shared power budget.

    Minimizes the weighted quadratic form over all per-subcarrier precoders
    jointly. Every column solves (Q_n + mu I) w = a_{k,n} with one common
    multiplier mu >= 0: zero when the minimum-norm solution already fits
    the budget, otherwise found by bisecting the monotone power curve until
    the budget is met to ``bisection_tol`` (the returned point is always on
    the feasible side).
    """
    h = channel_array(channel)
    if np.any(np.asarray(omega) <= 0):
        raise ValueError("weights must be positive")
    coef = np.asarray(omega) * np.abs(u) ** 2
    m = np.einsum("kn,knt,kns->nts", coef, h, np.conj(h), optimize=True)
    q = np.einsum("tr,nts,sq->nrq", np.conj(p_mat), m, p_mat, optimize=True)
    a = np.einsum("kn,tr,knt->nrk", np.asarray(omega) * u, np.conj(p_mat), h,
                  optimize=True)

    lam, vec = np.linalg.eigh(q)
    lam = np.maximum(lam, 0.0)                       # clip eigh noise on PSD input
    a_t = np.einsum("nir,nik->nrk", np.conj(vec), a, optimize=True)
    a_sq = np.abs(a_t) ** 2

    lam_scale = float(lam.max()) if lam.size else 0.0
    null_mode = lam <= 1e-12 * lam_scale

    def power_at(mu: float) -> float:
        return float((a_sq / (lam + mu)[:, :, None] ** 2).sum())

    def solve_at(mu: float) -> np.ndarray:
        if mu == 0.0:
            inv = np.where(null_mode, 0.0, 1.0 / np.where(null_mode, 1.0, lam))
        else:
            inv = 1.0 / (lam + mu)
        return np.einsum("nir,nrk->nik", vec, inv[:, :, None] * a_t, optimize=True)

    a_energy = float(a_sq.sum())
    null_energy = float(a_sq[null_mode].sum())
    pinv_ok = a_energy == 0.0 or null_energy <= 1e-24 * a_energy
    if pinv_ok:
        w0 = solve_at(0.0)
        if float(np.sum(np.abs(w0) ** 2)) <= total_power * (1.0 + 1e-12):
            return (w0, 0.0) if return_multiplier else w0

    mu_hi = 1.0
    for _ in range(200):
        if power_at(mu_hi) <= total_power:
            break
        mu_hi *= 2.0
    else:
        raise RuntimeError("failed to bracket the power multiplier")

    mu_lo, mu = 0.0, mu_hi
    for _ in range(300):
        mid = 0.5 * (mu_lo + mu_hi)
        pw = power_at(mid)
        if pw > total_power:
            mu_lo = mid
            continue
        mu_hi = mid
        if total_power - pw <= bisection_tol * total_power:
            mu = mid                     # feasible side, within tolerance
            break
    else:
        mu = mu_hi
    w = solve_at(mu)
    return (w, mu) if return_multiplier else w


# ---------------------------------------------------------------------------
# analog-matrix subproblem


def build_pgd_workspace(channel, u: np.ndarray, omega: np.ndarray,
                        precoders: np.ndarray) -> PgdWorkspace:
    """Assemble the quadratic-form data for the analog-matrix update."""
    h = channel_array(channel)
    coef = np.asarray(omega) * np.abs(u) ** 2
    m = np.einsum("kn,knt,kns->nts", coef, h, np.conj(h), optimize=True)
    c = np.einsum("nrk,nsk->nrs", precoders, np.conj(precoders), optimize=True)
    d = np.einsum("kn,nrk,knt->nrt", np.asarray(omega) * np.conj(u), precoders,
                  np.conj(h), optimize=True)

    # ||m_n||_2 through the K x K Gram matrix (same nonzero spectrum)
    inner = np.einsum("int,jnt->nij", np.conj(h), h, optimize=True)
    s = np.sqrt(coef).T                              # (N, K)
    gram = inner * s[:, :, None] * s[:, None, :]
    m_norms = np.maximum(np.linalg.eigvalsh(gram)[..., -1], 0.0)

    ws = PgdWorkspace(m=m, c=c, d=d, m_norms=m_norms)
    ws.step = lipschitz_step(ws)
    return ws


def lipschitz_step(workspace: PgdWorkspace) -> float | None:
    """Step size 1 / (2 sum_n ||M_n||_2 ||C_n||_2), or None if that blows up.

    A None return tells the caller to skip the analog update: the quadratic
    part of the subproblem vanishes, which only happens when the precoders
    or equalizers are all zero.
    """
    if workspace.m_norms is not None:
        m_norms = workspace.m_norms
    else:
        m_norms = np.maximum(np.linalg.eigvalsh(workspace.m)[..., -1], 0.0)
    c_norms = np.maximum(np.linalg.eigvalsh(workspace.c)[..., -1], 0.0)
    denom = 2.0 * float(m_norms @ c_norms)
    if denom <= 0.0:
        return None
    return 1.0 / denom


def pgd_gradient(p_mat: np.ndarray, workspace: PgdWorkspace) -> np.ndarray:
    """Gradient of the analog subproblem objective (conjugate convention)."""
    mpc = np.einsum("nts,sr,nrq->tq", workspace.m, p_mat, workspace.c,
                    optimize=True)
    d_herm = np.conj(workspace.d).transpose(0, 2, 1).sum(axis=0)
    return 2.0 * (mpc - d_herm)


def pgd_objective(p_mat: np.ndarray, workspace: PgdWorkspace) -> float:
    """Value of the analog subproblem objective at ``p_mat``."""
    pmp = np.einsum("sr,nst,tq->nrq", np.conj(p_mat), workspace.m, p_mat,
                    optimize=True)
    quad = np.einsum("nrq,nqr->", pmp, workspace.c, optimize=True)
    lin = np.einsum("nrt,tr->", workspace.d, p_mat, optimize=True)
    return float(quad.real - 2.0 * lin.real)


def project_spectral_ball(x: np.ndarray) -> np.ndarray:
    """Nearest point of the unit spectral-norm ball: clip singular values at 1."""
    u, s, vh = np.linalg.svd(np.asarray(x), full_matrices=False)
    return (u * np.minimum(s, 1.0)) @ vh


def update_milac_matrix(p0: np.ndarray, workspace: PgdWorkspace,
                        options: SolverOptions):
    """Projected gradient descent on the spectral ball from a feasible start.

    Returns ``(p, iterations)``. The subproblem is convex and the step size
    is the inverse Lipschitz constant, so the objective never increases.
    """
    eta = workspace.step if workspace.step is not None else lipschitz_step(workspace)
    if eta is None:
        return p0, 0
    p = p0
    f_prev = pgd_objective(p, workspace)
    iters = 0
    for _ in range(options.max_pgd):
        p = project_spectral_ball(p - eta * pgd_gradient(p, workspace))
        f_next = pgd_objective(p, workspace)
        iters += 1
        if abs(f_prev - f_next) <= options.pgd_tol * max(abs(f_prev), 1e-12):
            break
        f_prev = f_next
    return p, iters


def project_unit_modulus(x: np.ndarray, n_tx: int | None = None) -> np.ndarray:
    """Entrywise phase extraction onto constant-modulus entries 1/sqrt(N_T)."""
    x = np.asarray(x)
    if n_tx is None:
        n_tx = x.shape[0]
    return np.exp(1j * np.angle(x)) / np.sqrt(n_tx)


def _phase_shifter_step(p0: np.ndarray, workspace: PgdWorkspace,
                        options: SolverOptions):
    """Analog update under the phase-shifter constraint.

    The constraint set is nonconvex, so a projected step is accepted only
    if it does not increase the subproblem objective; otherwise the step is
    halved (up to 20 times) and finally the current point is kept.
    """
    eta = workspace.step if workspace.step is not None else lipschitz_step(workspace)
    if eta is None:
        return p0, 0
    n_tx = p0.shape[0]
    p = p0
    f_cur = pgd_objective(p, workspace)
    iters = 0
    for _ in range(options.max_pgd):
        grad = pgd_gradient(p, workspace)
        step = eta
        accepted = False
        for _ in range(20):
            cand = project_unit_modulus(p - step * grad, n_tx)
            f_cand = pgd_objective(cand, workspace)
            if f_cand <= f_cur:
                accepted = True
                break
            step *= 0.5
        iters += 1
        if not accepted:
            break
        drop = f_cur - f_cand
        p, f_cur = cand, f_cand
        if drop <= options.pgd_tol * max(abs(f_cur), 1e-12):
            break
    return p, iters


# ---------------------------------------------------------------------------
# initialization and the shared BCD loop


def _matched_digital(h: np.ndarray, p_mat: np.ndarray,
                     total_power: float) -> np.ndarray:
    """Matched-filter precoders through a given analog stage, at full power."""
    w = np.einsum("tr,knt->nrk", np.conj(p_mat), h, optimize=True)
    power = float(np.sum(np.abs(w) ** 2))
    if power > 0.0:
        return w * np.sqrt(total_power / power)
    return np.zeros_like(w)


def initialize(config: SystemConfig, channel, options: SolverOptions,
               rng: np.random.Generator | None = None):
    """Feasible starting point (analog matrix, digital precoders).

    "matched-filter" takes the leading left singular vectors of the stacked
    channel; "random-projected" projects a complex Gaussian draw onto the
    spectral ball. Either way the digital part is the matched filter through
    the analog stage, scaled to use the full power budget.
    """
    h = channel_array(channel)
    n_tx, n_rf = config.n_tx, config.n_rf
    if options.init_scheme == "matched-filter":
        stacked = h.reshape(-1, n_tx).T
        u_left, _, _ = np.linalg.svd(stacked, full_matrices=True)
        p0 = u_left[:, :n_rf]
    else:
        if rng is None:
            rng = np.random.default_rng(
                np.random.SeedSequence((config.seed, _INIT_STREAM_TAG)))
        g = (rng.standard_normal((n_tx, n_rf))
             + 1j * rng.standard_normal((n_tx, n_rf))) / np.sqrt(2.0)
        p0 = project_spectral_ball(g)
    return p0, _matched_digital(h, p0, config.total_power)


def _bcd(h: np.ndarray, noise_scaled: np.ndarray, total_power: float,
         p0: np.ndarray, w0: np.ndarray, options: SolverOptions,
         update_w: bool, analog_step):
    n_subcarriers = h.shape[1]
    p, w = p0, w0
    trace = OptimizerTrace()
    started = perf_counter()
    obj_prev = None
    for _ in range(options.max_outer):
        u = update_equalizers(h, p, w, noise_scaled)
        omega = update_weights(h, p, w, u)
        mses = user_mses(h, p, w, u, noise_scaled)
        obj = wmmse_objective(omega, mses, n_subcarriers)
        trace.objective_per_iter.append(obj)
        trace.sumrate_per_iter.append(
            float(user_rates(h, p, w, noise_scaled).sum() / n_subcarriers))
        if obj_prev is not None and \
                abs(obj_prev - obj) <= options.outer_tol * max(abs(obj_prev), 1e-12):
            break
        obj_prev = obj
        if update_w:
            w = update_digital_precoders(h, p, u, omega, total_power,
                                         options.bisection_tol)
        if analog_step is not None:
            workspace = build_pgd_workspace(h, u, omega, w)
            p, inner = analog_step(p, workspace, options)
            trace.inner_pgd_iters.append(inner)
        else:
            trace.inner_pgd_iters.append(0)
    trace.wall_time = perf_counter() - started
    return p, w, trace


def _frozen_flat_precoders(config: SystemConfig) -> np.ndarray:
    if config.n_rf != config.n_users:
        raise ValueError("analog-only schemes need n_rf == n_users")
    n, k = config.n_subcarriers, config.n_users
    w = np.zeros((n, k, k), dtype=complex)
    w[:, np.arange(k), np.arange(k)] = np.sqrt(config.total_power / (k * n))
    return w


# ---------------------------------------------------------------------------
# public solvers


def solve_hybrid_milac(config: SystemConfig, channel,
                       options: SolverOptions | None = None,
                       rng: np.random.Generator | None = None):
    """Joint analog/digital design; returns (p_mat, precoders, trace)."""
    options = options or SolverOptions()
    h = channel_array(channel)
    noise = config.scaled_noise_vars()
    p0, w0 = initialize(config, h, options, rng)
    return _bcd(h, noise, config.total_power, p0, w0, options,
                update_w=True, analog_step=update_milac_matrix)


def solve_fully_digital(config: SystemConfig, channel,
                        options: SolverOptions | None = None,
                        rng: np.random.Generator | None = None):
    """Unconstrained-architecture reference: analog stage pinned to identity.

    Runs the same loop with one RF chain per antenna and no analog update;
    the scaled noise keeps rates on the same footing as every other scheme.
    Returns (precoders, trace) with per-subcarrier N_T x K precoders.
    """
    options = options or SolverOptions()
    h = channel_array(channel)
    noise = config.scaled_noise_vars()
    p0 = np.eye(config.n_tx, dtype=complex)
    w0 = _matched_digital(h, p0, config.total_power)
    _, w, trace = _bcd(h, noise, config.total_power, p0, w0, options,
                       update_w=True, analog_step=None)
    return w, trace


def solve_milac_only(config: SystemConfig, channel,
                     options: SolverOptions | None = None,
                     rng: np.random.Generator | None = None):
    """Analog-only scheme: digital part frozen at a flat power split.

    Only the equalizers, weights, and analog matrix are updated. Returns
    (p_mat, trace).
    """
    options = options or SolverOptions()
    h = channel_array(channel)
    noise = config.scaled_noise_vars()
    w = _frozen_flat_precoders(config)
    p0, _ = initialize(config, h, options, rng)
    p, _, trace = _bcd(h, noise, config.total_power, p0, w, options,
                       update_w=False, analog_step=update_milac_matrix)
    return p, trace


def solve_phase_shifter(config: SystemConfig, channel,
                        options: SolverOptions | None = None,
                        mode: str = "hybrid",
                        rng: np.random.Generator | None = None):
    """Phase-shifter baselines sharing the BCD skeleton.

    ``mode="hybrid"`` updates the digital precoders as usual;
    ``mode="analog-only"`` freezes them at a flat power split. Returns
    (p_mat, precoders, trace).
    """
    if mode not in ("hybrid", "analog-only"):
        raise ValueError(f"unknown phase-shifter mode: {mode!r}")
    options = options or SolverOptions()
    h = channel_array(channel)
    noise = config.scaled_noise_vars()
    p0, _ = initialize(config, h, options, rng)
    p0 = project_unit_modulus(p0, config.n_tx)
    if mode == "analog-only":
        w0 = _frozen_flat_precoders(config)
    else:
        w0 = _matched_digital(h, p0, config.total_power)
    p, w, trace = _bcd(h, noise, config.total_power, p0, w0, options,
                       update_w=(mode == "hybrid"), analog_step=_phase_shifter_step)
    return p, w, trace
