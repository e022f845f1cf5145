"""Finite expert-bank selection toolkit.

Operates on per-item x per-expert loss matrices: pick experts from data
samples with an alpha-mixture rule, estimate how much information the
selection leaks about the sample, compare the implied deviation bound to
the finite-class baseline, and trace the rate-distortion trade-off of an
input-dependent routing gate over the same bank.
"""

from .bank_gen import (BankGenConfig, DEFAULT_BANK_SEED, disagreement_matrix,
                       expected_disagreement, gen_bank)
from .core import (ExperimentConfig, ExpertBankDataset, SampleIndices,
                   candidate_empirical_error, fmt_float, load_dataset,
                   save_dataset)
from .estimators import (MIReport, PosteriorBatch, alpha_mixture_entropy,
                         bootstrap_ci, conditional_entropy, empirical_marginal,
                         entropy, estimate_mi, mi_bound, mixture_batch,
                         routing_mi, union_bound)
from .harness import (ALPHA_SWEEP_HEADER, GAP_HIST_BINS, GAP_HIST_HEADER,
                      ExperimentReport, ReplicaRecord, alpha_sweep,
                      alpha_sweep_csv, gap_hist_csv, mi_report_json,
                      run_experiment, write_alpha_sweep_csv, write_gap_hist_csv,
                      write_mi_report_json)
from .rd_solver import (GateMatrix, RD_CURVE_HEADER, RDPoint, ba_solve,
                        default_lambda_grid, gate_objective, rd_curve_csv,
                        rd_sweep, write_rd_curve_csv)
from .selection import (AlphaPosterior, alpha_posterior, erm_select,
                        index_from_uniform, mixture_probs, sample_candidate,
                        sample_errors)

__version__ = "0.1.0"

__all__ = [
    "ALPHA_SWEEP_HEADER",
    "AlphaPosterior",
    "BankGenConfig",
    "DEFAULT_BANK_SEED",
    "ExperimentConfig",
    "ExperimentReport",
    "ExpertBankDataset",
    "GAP_HIST_BINS",
    "GAP_HIST_HEADER",
    "GateMatrix",
    "MIReport",
    "PosteriorBatch",
    "RDPoint",
    "RD_CURVE_HEADER",
    "ReplicaRecord",
    "SampleIndices",
    "alpha_mixture_entropy",
    "alpha_posterior",
    "alpha_sweep",
    "alpha_sweep_csv",
    "ba_solve",
    "bootstrap_ci",
    "candidate_empirical_error",
    "conditional_entropy",
    "default_lambda_grid",
    "disagreement_matrix",
    "empirical_marginal",
    "entropy",
    "erm_select",
    "estimate_mi",
    "expected_disagreement",
    "fmt_float",
    "gap_hist_csv",
    "gate_objective",
    "gen_bank",
    "index_from_uniform",
    "load_dataset",
    "mi_bound",
    "mi_report_json",
    "mixture_batch",
    "mixture_probs",
    "rd_curve_csv",
    "rd_sweep",
    "routing_mi",
    "run_experiment",
    "sample_candidate",
    "sample_errors",
    "save_dataset",
    "union_bound",
    "write_alpha_sweep_csv",
    "write_gap_hist_csv",
    "write_mi_report_json",
    "write_rd_curve_csv",
]
