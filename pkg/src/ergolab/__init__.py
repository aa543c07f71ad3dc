"""ergolab: desk-scale experiments on measure-preserving systems.

The package separates what spectra can see from what they cannot: the
Koopman operators of circle rotations, skew products, product-measure
shifts, and rotation-times-shift products are modeled symbolically, and
three independent toolkits interrogate them — generalized
proper-function towers (exact and residual-certified), per-step
information rates, and correlation statistics.  A CLI wraps the named
reproduction scenarios with deterministic, schema-validated reports.
"""

from .quadratic import (
    ExactnessError,
    QuadraticReal,
    RotationNumber,
    SQRT2_MINUS_1,
    integral_combination,
)
from .systems import (
    BernoulliSpec,
    CylinderSet,
    SampleBatch,
    SymbolWindow,
    SystemSpec,
    TorusPoint,
    WindowError,
    cylinder_measure,
    iterate_batch,
    product_step,
    rotation_step,
    sample_batch,
    sample_point,
    shift_step,
    skew_step,
    spawn_rngs,
    step_batch,
)
from .koopman import (
    FourierMode,
    GroupComparison,
    IncompatibleSpectraError,
    IntertwinerCheck,
    IntertwinerPairing,
    Orbit,
    Phase,
    PhasedMode,
    ProductBasisIndex,
    SpectrumDescriptor,
    build_intertwiner,
    is_one_simple,
    koopman_apply_product,
    koopman_apply_skew,
    koopman_apply_skew_inverse,
    koopman_apply_skew_normalized,
    normalizing_phase,
    orbit_decompose,
    point_spectrum_groups_equal,
    proper_modes_of_skew,
    spectrum_of,
    verify_intertwiner,
)
from .tower import (
    DegenerateGridError,
    DistinguishResult,
    InconclusiveEvidenceError,
    ModeSubgroup,
    ProductTowerCertificate,
    ResidualReport,
    TowerLevel,
    UnsupportedSystemError,
    certify_product_tower,
    compute_tower,
    quasi_eigen_residual_search,
    quotient_homomorphism,
    residual_brute_force,
    residual_reference,
    stabilization_depth,
    tower_step,
    towers_distinguish,
)
from .entropy import (
    EntropyEstimate,
    EntropyVerdict,
    PartitionSpec,
    UndersampledError,
    bernoulli_entropy,
    block_entropy_rate,
    entropy_classifier,
    exact_block_entropy,
    exact_block_entropy_rate,
    partition_refine_entropy,
)
from .mixing import (
    CorrelationPoint,
    NoClosedFormError,
    TestSet,
    birkhoff_average,
    correlation,
    orbit_track,
    spectral_ergodicity_check,
    spectral_weak_mixing_check,
    weak_mixing_statistic,
    weak_mixing_verdict,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # quadratic
    "ExactnessError",
    "QuadraticReal",
    "RotationNumber",
    "SQRT2_MINUS_1",
    "integral_combination",
    # systems
    "BernoulliSpec",
    "CylinderSet",
    "SampleBatch",
    "SymbolWindow",
    "SystemSpec",
    "TorusPoint",
    "WindowError",
    "cylinder_measure",
    "iterate_batch",
    "product_step",
    "rotation_step",
    "sample_batch",
    "sample_point",
    "shift_step",
    "skew_step",
    "spawn_rngs",
    "step_batch",
    # koopman
    "FourierMode",
    "GroupComparison",
    "IncompatibleSpectraError",
    "IntertwinerCheck",
    "IntertwinerPairing",
    "Orbit",
    "Phase",
    "PhasedMode",
    "ProductBasisIndex",
    "SpectrumDescriptor",
    "build_intertwiner",
    "is_one_simple",
    "koopman_apply_product",
    "koopman_apply_skew",
    "koopman_apply_skew_inverse",
    "koopman_apply_skew_normalized",
    "normalizing_phase",
    "orbit_decompose",
    "point_spectrum_groups_equal",
    "proper_modes_of_skew",
    "spectrum_of",
    "verify_intertwiner",
    # tower
    "DegenerateGridError",
    "DistinguishResult",
    "InconclusiveEvidenceError",
    "ModeSubgroup",
    "ProductTowerCertificate",
    "ResidualReport",
    "TowerLevel",
    "UnsupportedSystemError",
    "certify_product_tower",
    "compute_tower",
    "quasi_eigen_residual_search",
    "quotient_homomorphism",
    "residual_brute_force",
    "residual_reference",
    "stabilization_depth",
    "tower_step",
    "towers_distinguish",
    # entropy
    "EntropyEstimate",
    "EntropyVerdict",
    "PartitionSpec",
    "UndersampledError",
    "bernoulli_entropy",
    "block_entropy_rate",
    "entropy_classifier",
    "exact_block_entropy",
    "exact_block_entropy_rate",
    "partition_refine_entropy",
    # mixing
    "CorrelationPoint",
    "NoClosedFormError",
    "TestSet",
    "birkhoff_average",
    "correlation",
    "orbit_track",
    "spectral_ergodicity_check",
    "spectral_weak_mixing_check",
    "weak_mixing_statistic",
    "weak_mixing_verdict",
]
