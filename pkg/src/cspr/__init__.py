"""Testing Chargaff's second parity rule for dinucleotides under a Gibbsian model."""

from cspr.counting import (
    K_INDEX,
    LagPairCounts,
    PairCounts,
    count_lag_pairs,
    count_pairs,
    f_vector,
    lambda_matrix,
)
from cspr.covariance import SigmaEstimate, VEstimate, estimate_covariance, select_m, sigma_hat, v_hat
from cspr.numerics import NotPositiveDefinite, chi2_cdf, chi2_quantile, chi2_sf, solve_spd
from cspr.sequence_io import (
    IngestionPolicy,
    Nucleotide,
    Sequence,
    gc_content,
    parse_fasta,
    read_fasta,
    reverse_complement,
    write_fasta,
)
from cspr.testkit import BatchDecision, TestConfig, TestReport, eta_statistic, holm_bonferroni, run_batch, run_test

__version__ = "0.1.0"

__all__ = [
    "BatchDecision",
    "IngestionPolicy",
    "K_INDEX",
    "LagPairCounts",
    "NotPositiveDefinite",
    "Nucleotide",
    "PairCounts",
    "Sequence",
    "SigmaEstimate",
    "TestConfig",
    "TestReport",
    "VEstimate",
    "chi2_cdf",
    "chi2_quantile",
    "chi2_sf",
    "count_lag_pairs",
    "count_pairs",
    "estimate_covariance",
    "eta_statistic",
    "f_vector",
    "gc_content",
    "holm_bonferroni",
    "lambda_matrix",
    "parse_fasta",
    "read_fasta",
    "reverse_complement",
    "run_batch",
    "run_test",
    "select_m",
    "sigma_hat",
    "solve_spd",
    "v_hat",
    "write_fasta",
]
