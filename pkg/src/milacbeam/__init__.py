"""Hybrid digital / analog-network beamforming for wideband MU-MISO-OFDM.

The package is organized by concern:

* :mod:`milacbeam.model` -- domain types, rate/MSE/objective evaluation
* :mod:`milacbeam.channel` -- multi-tap channel generation and checks
* :mod:`milacbeam.milac_net` -- admittance/scattering network model
* :mod:`milacbeam.realize` -- exact reproduction of digital beamformer sets
* :mod:`milacbeam.optimizer` -- WMMSE block-coordinate-descent solvers
* :mod:`milacbeam.harness` -- seeded Monte-Carlo experiment runner and CSV I/O
"""

__version__ = "0.1.0"

from .model import (SystemConfig, OptimizerTrace, compute_user_rate,
                    compute_avg_sum_rate, compute_mse, wmmse_objective,
                    milac_feasible, power_feasible, precoder_power,
                    total_power_for_snr_db)
from .channel import (PowerDelayProfile, TapChannel, FreqChannel,
                      generate_pdp, rms_delay_spread, generate_taps,
                      taps_to_frequency, generate_channel,
                      verify_time_frequency_equivalence,
                      dump_channel, load_channel)
from .milac_net import (MiLACNetwork, ReciprocityLosslessReport,
                        admittance_to_scattering, scattering_to_beamforming,
                        admittance_to_beamforming, check_reciprocal_lossless,
                        spectral_norm, random_reactive_admittance)
from .realize import (min_rf_chains, realize_fully_digital,
                      realization_residual, aggregate_targets, split_aggregate)
from .optimizer import (SolverOptions, PgdWorkspace, update_equalizers,
                        update_weights, update_digital_precoders,
                        build_pgd_workspace, pgd_gradient, pgd_objective,
                        project_spectral_ball, project_unit_modulus,
                        lipschitz_step, update_milac_matrix, initialize,
                        solve_hybrid_milac, solve_fully_digital,
                        solve_milac_only, solve_phase_shifter)
from .harness import (ExperimentSpec, ExperimentResult, ResultRow,
                      run_experiment, compute_sweep_axis, write_results,
                      read_results, load_experiment_spec)
