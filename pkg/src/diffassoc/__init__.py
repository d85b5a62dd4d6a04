"""Kernel-based test for differential association between two conditions."""
from .baseline import dcoxs_score, dcoxs_test
from .diffstat import (
    DiffStatResult,
    MomentSummary,
    PooledProduct,
    moment_sums,
    permutation_variance,
    pooled_product_matrix,
    statistic_tilde,
    z_score,
)
from .errors import (
    BlockMismatch,
    DegenerateData,
    DiffAssocError,
    DimensionMismatch,
    GroupTooSmall,
    NonPositiveVariance,
    SizeMismatch,
    TooLarge,
)
from .hsic import hsic_nodiag, hsic_sums, hsic_trace
from .inference import (
    PairedDataset,
    TestResult,
    cauchy_combine,
    exact_permutation_distribution,
    monte_carlo_permutation_pvalue,
    normal_pvalue,
    run_test,
)
from .kernels import (
    KernelSpec,
    center_kernel,
    gaussian_kernel_matrix,
    linear_kernel_matrix,
    median_heuristic_bandwidth,
    pairwise_sq_distances,
)
from .simgen import SimConfig, ar1_covariance, gen_setting1, gen_setting2, generate, mvn_sample

__version__ = "0.1.0"
