"""Quick invariant suite behind ``milacbeam selftest``.

Each check is a tiny seeded instance of one of the package's core
identities. The whole suite runs in a few seconds; the pytest suite covers
the same ground (and much more) with full sweeps.
"""

import tempfile
from pathlib import Path

import numpy as np

from .channel import (dump_channel, generate_channel, generate_pdp,
                      generate_taps, load_channel, rms_delay_spread,
                      taps_to_frequency, verify_time_frequency_equivalence)
from .milac_net import (MiLACNetwork, admittance_to_beamforming,
                        admittance_to_scattering, check_reciprocal_lossless,
                        random_reactive_admittance, scattering_to_beamforming,
                        spectral_norm)
from .model import LN2, SystemConfig, compute_avg_sum_rate
from .optimizer import (SolverOptions, build_pgd_workspace,
                        pgd_gradient, pgd_objective, project_spectral_ball,
                        solve_fully_digital, solve_hybrid_milac,
                        update_digital_precoders, update_equalizers,
                        update_weights)
from .realize import min_rf_chains, realization_residual, realize_fully_digital


def _small_config(seed=0):
    return SystemConfig(n_subcarriers=8, n_tx=8, n_users=2, n_rf=2,
                        total_power=80.0, n_taps=4, pdp_decay=1.0, seed=seed)


def _random_state(seed=0):
    cfg = _small_config(seed)
    chan = generate_channel(cfg)
    rng = np.random.default_rng(seed + 1)
    g = (rng.standard_normal((cfg.n_tx, cfg.n_rf))
         + 1j * rng.standard_normal((cfg.n_tx, cfg.n_rf)))
    p = project_spectral_ball(g)
    w = (rng.standard_normal((cfg.n_subcarriers, cfg.n_rf, cfg.n_users))
         + 1j * rng.standard_normal((cfg.n_subcarriers, cfg.n_rf, cfg.n_users)))
    w *= np.sqrt(cfg.total_power / np.sum(np.abs(w) ** 2))
    return cfg, chan, p, w


def check_pdp_and_delay_spread():
    for eps, target in ((4.0, 3.32), (1.0, 0.96)):
        pdp = generate_pdp(16, eps)
        assert abs(pdp.p.sum() - 1.0) < 1e-12
        assert abs(rms_delay_spread(pdp) - target) < 0.01


def check_tap_dft():
    cfg = _small_config()
    taps = generate_taps(cfg)
    h = taps_to_frequency(taps, cfg.n_subcarriers).h
    lhs = np.sum(np.abs(h) ** 2)
    rhs = cfg.n_subcarriers * np.sum(np.abs(taps.taps) ** 2)
    assert abs(lhs - rhs) < 1e-10 * rhs


def check_time_frequency_pipeline():
    cfg, chan, p, w = _random_state(3)
    taps = generate_taps(cfg)
    rng = np.random.default_rng(5)
    assert verify_time_frequency_equivalence(cfg, taps, p, w, rng) <= 1e-9


def check_network_paths():
    rng = np.random.default_rng(11)
    net = MiLACNetwork(y=random_reactive_admittance(6, rng), n_rf=2)
    phi = admittance_to_scattering(net)
    assert check_reciprocal_lossless(phi, tol=1e-8).ok
    direct = admittance_to_beamforming(net)
    via_phi = scattering_to_beamforming(phi, net.n_rf, net.n_tx)
    assert np.linalg.norm(direct - via_phi) < 1e-10
    assert spectral_norm(2 * via_phi) <= 1 + 1e-9


def check_projection():
    rng = np.random.default_rng(13)
    x = 3 * (rng.standard_normal((8, 4)) + 1j * rng.standard_normal((8, 4)))
    proj = project_spectral_ball(x)
    assert spectral_norm(proj) <= 1 + 1e-10
    assert np.linalg.norm(project_spectral_ball(proj) - proj) < 1e-12


def check_gradient():
    cfg, chan, p, w = _random_state(17)
    noise = cfg.scaled_noise_vars()
    u = update_equalizers(chan, p, w, noise)
    omega = update_weights(chan, p, w, u)
    ws = build_pgd_workspace(chan, u, omega, w)
    grad = pgd_gradient(p, ws)
    rng = np.random.default_rng(19)
    delta = 1e-5
    for _ in range(5):
        direction = rng.standard_normal(p.shape) + 1j * rng.standard_normal(p.shape)
        direction /= np.linalg.norm(direction)
        fd = (pgd_objective(p + delta * direction, ws)
              - pgd_objective(p - delta * direction, ws)) / (2 * delta)
        analytic = np.real(np.vdot(grad, direction))
        assert abs(fd - analytic) <= 1e-5 * max(1.0, abs(analytic))


def check_precoder_update():
    cfg, chan, p, w = _random_state(23)
    noise = cfg.scaled_noise_vars()
    u = update_equalizers(chan, p, w, noise)
    omega = update_weights(chan, p, w, u)
    w_new, mu = update_digital_precoders(chan, p, u, omega, cfg.total_power,
                                         return_multiplier=True)
    power = float(np.sum(np.abs(w_new) ** 2))
    assert power <= cfg.total_power * (1 + 1e-10)
    assert mu * (cfg.total_power - power) <= 1e-6 * cfg.total_power


def check_realization():
    cfg = _small_config(29)
    chan = generate_channel(cfg)
    opts = SolverOptions(max_outer=40)
    w_d, _ = solve_fully_digital(cfg, chan, opts)
    n_rf = min_rf_chains(cfg.n_tx, cfg.n_users, cfg.n_subcarriers)
    p, w, _ = realize_fully_digital(w_d, n_rf=n_rf)
    assert realization_residual(p, w, w_d) <= 1e-10
    noise = cfg.scaled_noise_vars()
    r_digital = compute_avg_sum_rate(chan, np.eye(cfg.n_tx), w_d, noise)
    r_realized = compute_avg_sum_rate(chan, p, w, noise)
    assert abs(r_digital - r_realized) <= 1e-9 * max(1.0, abs(r_digital))


def check_bcd_monotone():
    cfg = _small_config(31)
    chan = generate_channel(cfg)
    _, _, trace = solve_hybrid_milac(cfg, chan, SolverOptions(max_outer=30))
    obj = np.array(trace.objective_per_iter)
    assert np.all(np.diff(obj) <= 1e-9 * np.maximum(np.abs(obj[:-1]), 1e-12))
    rates = np.array(trace.sumrate_per_iter)
    ident = cfg.n_users / LN2 - obj - rates
    assert np.max(np.abs(ident)) <= 1e-9 * max(1.0, float(np.abs(rates).max()))


def check_channel_roundtrip():
    cfg = _small_config(37)
    chan = generate_channel(cfg)
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "chan.txt"
        dump_channel(chan, path)
        again = load_channel(path)
    assert np.array_equal(chan.h, again.h)


CHECKS = (
    ("pdp and delay spread", check_pdp_and_delay_spread),
    ("tap DFT Parseval", check_tap_dft),
    ("time/frequency pipeline", check_time_frequency_pipeline),
    ("network model paths", check_network_paths),
    ("spectral projection", check_projection),
    ("analog-update gradient", check_gradient),
    ("precoder update KKT", check_precoder_update),
    ("digital-set realization", check_realization),
    ("BCD monotone + rate identity", check_bcd_monotone),
    ("channel dump round trip", check_channel_roundtrip),
)


def run_selftest(echo=print) -> int:
    """Run every check; returns the number of failures."""
    failed = 0
    for name, fn in CHECKS:
        try:
            fn()
        except Exception as exc:  # noqa: BLE001 - report and keep going
            failed += 1
            echo(f"FAIL  {name}: {exc}")
        else:
            echo(f"PASS  {name}")
    return failed
