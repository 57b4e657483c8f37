"""Fermionic entanglement negativity on exact dense Fock-space representations."""

from .errors import (
    ClassificationError,
    FnegError,
    LayoutError,
    ParityError,
    SamplingError,
    StateValidationError,
)
from .fock import (
    FockOperator,
    ModeLayout,
    SubsystemSpec,
    annihilation_op,
    creation_op,
    embed_local,
    graded_tensor,
    identity_op,
    majorana_op,
    number_op,
    parity_op,
    permute_modes,
)
from .ptranspose import (
    PhaseRule,
    ProjectedState,
    bosonic_pt,
    fermionic_pt,
    fermionic_pt_majorana,
    full_transpose,
    parity_project,
    partial_trace,
    partial_transpose,
)
from .measures import (
    MeasureReport,
    bipartite_report,
    cayley_hdet,
    entropy,
    j_abc,
    log_negativity,
    mutual_information,
    n_abc,
    negativity,
    pi_abc,
    pt_moment,
    three_tangle,
    trace_norm,
    tripartite_report,
)
from .states import (
    PureCoeffs,
    biseparable_example,
    canonical_state,
    canonical_vector,
    random_density,
    random_pure,
    random_separable,
)
from .classify import (
    ClassLabel,
    ParityType,
    mixed3_classify,
    pure3_class,
    subsystem_parity_type,
    two_mode_separable,
)
from .verify import (
    CheckReport,
    check_identity_suite,
    check_locc_monotonicity,
    check_perturbation_expansion,
    conjecture_scan,
    pi_inequality_scan,
)

__version__ = "0.1.0"

__all__ = [
    "CheckReport",
    "ClassLabel",
    "ClassificationError",
    "FnegError",
    "FockOperator",
    "LayoutError",
    "MeasureReport",
    "ModeLayout",
    "ParityError",
    "ParityType",
    "PhaseRule",
    "ProjectedState",
    "PureCoeffs",
    "SamplingError",
    "StateValidationError",
    "SubsystemSpec",
    "annihilation_op",
    "bipartite_report",
    "biseparable_example",
    "bosonic_pt",
    "canonical_state",
    "canonical_vector",
    "cayley_hdet",
    "check_identity_suite",
    "check_locc_monotonicity",
    "check_perturbation_expansion",
    "conjecture_scan",
    "creation_op",
    "embed_local",
    "entropy",
    "fermionic_pt",
    "fermionic_pt_majorana",
    "full_transpose",
    "graded_tensor",
    "identity_op",
    "j_abc",
    "log_negativity",
    "majorana_op",
    "mixed3_classify",
    "mutual_information",
    "n_abc",
    "negativity",
    "number_op",
    "parity_op",
    "parity_project",
    "partial_trace",
    "partial_transpose",
    "permute_modes",
    "pi_abc",
    "pi_inequality_scan",
    "pt_moment",
    "pure3_class",
    "random_density",
    "random_pure",
    "random_separable",
    "subsystem_parity_type",
    "three_tangle",
    "trace_norm",
    "tripartite_report",
    "two_mode_separable",
]
