"""Attenuation-channel entropies and the transmission efficiency of pulse modulators."""

from .channel import (
    AttenuationChannel,
    KrausChannel,
    LiftedChannel,
    apply,
    apply_lifted,
    attenuation_channel,
    beam_splitter_isometry,
    kraus_from_isometry,
    lift,
    thin_binomial,
)
from .dynamics import (
    BlockResult,
    StationarySource,
    block_compound_input,
    block_compound_output,
    block_functionals,
    block_joint_compound,
    dynamical_entropy,
    dynamical_mutual,
)
from .entropy import (
    CompoundState,
    EntropyValue,
    Policy,
    classical_mutual_information,
    compound_state,
    fundamental_inequality_check,
    mutual_entropy,
    relative_entropy,
    von_neumann,
)
from .errors import CapacityError, ConsistencyError, DomainError, IdealModulatorError, RepresentationError
from .fock import (
    ClassicalDistribution,
    DensityOperator,
    FockBasis,
    SchattenDecomposition,
    from_classical,
    number_projection,
    partial_trace,
    product_projection,
    spectral_decompose,
    tensor,
    to_classical,
)
from .modulation import (
    Alphabet,
    ComparisonReport,
    ModulationScheme,
    brute_force_mutual,
    closed_form_dynamical_entropy,
    closed_form_ppm_mutual,
    closed_form_pwm_mutual,
    compare_modulators,
    modulated_source,
    pam_state,
    ppm_state,
    pwm_state,
)
