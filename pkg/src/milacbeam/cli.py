"""Command-line front end: experiment runs, self tests, realization checks."""

import argparse
import dataclasses
import sys

import numpy as np

from .harness import (default_spec, load_experiment_spec, run_experiment,
                      write_results)
from .model import compute_avg_sum_rate
from .realize import (load_targets, min_rf_chains, realization_residual,
                      realize_fully_digital)
from .channel import load_channel
from .milac_net import spectral_norm
from .selftest import CHECKS, run_selftest


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="milacbeam",
        description="Wideband hybrid digital/analog beamforming experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a Monte-Carlo experiment")
    run_p.add_argument("--config", help="experiment config file")
    run_p.add_argument("--experiment", help="experiment name override")
    run_p.add_argument("--seed", type=int, help="base seed override")
    run_p.add_argument("--trials", type=int, help="trial count override")
    run_p.add_argument("--restarts", type=int,
                       help="solver starts per run (best sum-rate kept)")
    run_p.add_argument("--out", help="output CSV path")
    run_p.add_argument("--small", action="store_true",
                       help="CI-sized preset (N=16, N_T=16, K=2, 20 trials)")

    sub.add_parser("selftest", help="run the quick invariant suite")

    rz = sub.add_parser("realize",
                        help="factor a stored digital beamformer set through the hybrid chain")
    rz.add_argument("--targets", required=True, help="digital-targets dump file")
    rz.add_argument("--n-rf", type=int, default=None,
                    help="RF-chain budget (default: enough for exact reproduction)")
    rz.add_argument("--channel", default=None,
                    help="optional freq-channel dump for a rate comparison")
    rz.add_argument("--noise-var", type=float, default=1.0,
                    help="physical noise variance for the rate comparison")
    return parser


def _cmd_run(args) -> int:
    if args.config:
        spec = load_experiment_spec(args.config)
        if args.small:
            from .harness import default_system_config
            spec = dataclasses.replace(
                spec,
                base_config=default_system_config(small=True,
                                                  seed=spec.base_config.seed),
                trials=min(spec.trials, 20))
    else:
        spec = default_spec(args.experiment or "snr-sweep", small=args.small)
    if args.experiment:
        spec = dataclasses.replace(spec, experiment=args.experiment)
    if args.seed is not None:
        spec = dataclasses.replace(
            spec, base_config=dataclasses.replace(spec.base_config, seed=args.seed))
    if args.trials is not None:
        spec = dataclasses.replace(spec, trials=args.trials)
    if args.restarts is not None:
        spec = dataclasses.replace(spec, restarts=args.restarts)
    if args.out:
        spec = dataclasses.replace(spec, output_path=args.out)
    if not spec.output_path:
        spec = dataclasses.replace(spec, output_path=f"{spec.experiment}.csv")

    result = run_experiment(spec)
    write_results(result, spec.output_path)
    print(f"wrote {len(result.rows)} rows to {spec.output_path}")
    for row in result.rows:
        print(f"  {row.scheme:>12} @ {row.sweep_value:g}: "
              f"{row.mean_sumrate:.4f} +- {row.std:.4f} bits/s/Hz "
              f"({row.trials} trials)")
    return 0


def _cmd_realize(args) -> int:
    targets = load_targets(args.targets)
    n, n_tx, k = targets.shape
    n_rf = args.n_rf if args.n_rf is not None else min_rf_chains(n_tx, k, n)
    p, w, used = realize_fully_digital(targets, n_rf=n_rf)
    residual = realization_residual(p, w, targets)
    power_t = float(np.sum(np.abs(targets) ** 2))
    power_w = float(np.sum(np.abs(w) ** 2))
    print(f"targets: N={n} subcarriers, N_T={n_tx} antennas, K={k} users")
    print(f"RF chains requested/used: {n_rf}/{used}")
    print(f"analog spectral norm: {spectral_norm(p):.12f}")
    print(f"relative residual ||P W - W_D||_F / ||W_D||_F: {residual:.3e}")
    print(f"digital power: targets {power_t:.6f}, realization {power_w:.6f}")
    if args.channel:
        chan = load_channel(args.channel)
        noise = 4.0 * args.noise_var
        rate_t = compute_avg_sum_rate(chan, np.eye(n_tx), targets, noise)
        rate_r = compute_avg_sum_rate(chan, p, w, noise)
        print(f"avg sum-rate: targets {rate_t:.6f}, realization {rate_r:.6f} bits/s/Hz")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "selftest":
        failed = run_selftest()
        print(f"selftest: {len(CHECKS) - failed} passed, {failed} failed")
        return 1 if failed else 0
    if args.command == "realize":
        return _cmd_realize(args)
    raise AssertionError(args.command)


if __name__ == "__main__":
    sys.exit(main())
