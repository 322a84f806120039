"""Pearson-quadratic moment estimators and the tests built on them.

A distribution in the Pearson system satisfies an integral (or, for
lattice data, summation) identity with a quadratic
``q(x) = delta (x - mu)^2 + beta (x - mu) + gamma``.  This package estimates
``(delta, beta, gamma)`` from sample moments, gives their delta-method
covariance, and tests normality, ``delta = 0``, symmetry and the Poisson
hypothesis.
"""

__version__ = "0.1.0"

from .errors import (DataError, InvalidSpec, NonpositiveVariance, NumericError,  # noqa: E402
                     PearsonQError, SingularCovariance, SingularSystem, ThetaDegenerate,
                     UnsupportedAlpha)
from .moments import (Case, MomentSet, Sample, assert_nondegenerate,  # noqa: E402
                      central_moments, ingest_csv)
from .estimators import (QParams, estimate, estimate_continuous, estimate_discrete,  # noqa: E402
                         moment_system, solve_moment_system)
from .asymptotics import (CovModel, asymptotic_cov, jacobians, null_cov_normality,  # noqa: E402
                          null_cov_poisson, sigma0_delta, sigma0_symmetry, sigma_matrix)
from .testing import (PercentileTable, TestOutcome, lookup_percentile, shipped_table,  # noqa: E402
                      test_delta_zero, test_normality, test_poisson, test_symmetry)
from .distributions import (FamilySpec, population_moments, sample, true_q_params,  # noqa: E402
                            verify_continuous_identity, verify_discrete_identity)
from .rng import RngStream, substream  # noqa: E402
from .competitors import CriticalValueSet, calibrate_critical_values  # noqa: E402
from .simharness import (ExperimentConfig, ExperimentResult, run_estimator_table,  # noqa: E402
                         run_percentiles, run_size_power)

__all__ = [
    "PearsonQError", "DataError", "ThetaDegenerate", "NonpositiveVariance", "InvalidSpec",
    "UnsupportedAlpha", "NumericError", "SingularSystem", "SingularCovariance",
    "Case", "Sample", "MomentSet", "ingest_csv", "central_moments", "assert_nondegenerate",
    "QParams", "estimate", "estimate_continuous", "estimate_discrete", "moment_system",
    "solve_moment_system", "CovModel", "sigma_matrix", "jacobians", "asymptotic_cov",
    "null_cov_normality", "null_cov_poisson", "sigma0_delta", "sigma0_symmetry",
    "TestOutcome", "PercentileTable", "shipped_table", "lookup_percentile", "test_normality",
    "test_delta_zero", "test_symmetry", "test_poisson", "FamilySpec", "sample",
    "true_q_params", "population_moments", "verify_discrete_identity",
    "verify_continuous_identity", "RngStream", "substream", "CriticalValueSet",
    "calibrate_critical_values", "ExperimentConfig", "ExperimentResult",
    "run_estimator_table", "run_percentiles", "run_size_power",
]
