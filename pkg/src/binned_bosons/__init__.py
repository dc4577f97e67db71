"""Binned-mode photon-number distributions of (noisy) boson samplers.

Computes exact and randomized binned distributions via the
characteristic-function/permanent method and provides statistical
validation tests built on them.
"""

from .backend import active_backend
from .binning import (
    BinnedDistribution,
    ModePartition,
    bin_full_distribution,
    bin_pattern,
    bin_samples,
    binned_distribution_exact,
    binned_distribution_gurvits,
    bunching_matrix,
    char_poly_coefficients,
    characteristic_grid,
    characteristic_value,
    generalized_bunching_probability,
    virtual_interferometer,
)
from .errors import DimensionError, InvariantError, SizeLimitError
from .haarstats import (
    EnsembleSpec,
    averaged_variance,
    distribution_variance,
    ensemble_variance_mc,
    ensemble_variances,
    haar_variance_formula,
    sum_sq_overlaps,
    weingarten_moment_oracle,
)
from .interference import (
    DelayConfig,
    FullDistribution,
    SampleSet,
    draw_samples,
    full_distribution,
    gram_from_delays,
    gram_uniform,
    hom_visibility,
    outcome_probability,
    quad_mean_overlap,
    validate_gram,
)
from .linalg import (
    NoiseModel,
    amplitude_fidelity,
    apply_noise,
    assert_unitary,
    derive_rng,
    haar_unitary,
    permanent_exact,
    permanent_gurvits,
    unitary_log,
    unitarity_defect,
)
from .validation import (
    ValidationReport,
    bin_fluctuation_scan,
    binned_tvd,
    default_partitions,
    ensemble_avg_tvd,
    fixed_distribution_baseline,
    gbp_difference_scan,
    hadamard_family,
    phase_sensitivity_probe,
    random_hadamard_pair,
    tvd,
    uniform_sampler_baseline,
    validation_report,
)

__version__ = "0.1.0"
