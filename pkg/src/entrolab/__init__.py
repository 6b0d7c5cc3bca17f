"""Topological entropy of linear operators, two ways: Bowen separated-set
counting on sampled compact sets, and the spectral formula sum log+|lambda|,
together with shift embeddings, shadowing constructions, spectral splittings
and the variational-gap demonstration."""

from .entropy import (
    CompactSample,
    EntropyEstimate,
    EntropyTable,
    dyn_distance,
    eigenplane_lower_bound,
    entropy_estimate,
    greedy_separated,
    grid_sample,
    max_separated_exact,
    sn_table,
    spectral_entropy,
)
from .measures import (
    OrbitMeasure,
    metric_entropy_periodic,
    orbit_measure,
    support_in_center,
    variational_gap,
)
from .operators import (
    BackwardShift,
    DenseMatrix,
    Diagonal,
    DirectSum,
    ForwardShift,
    Operator,
    OperatorPower,
    Scaled,
    SpectralData,
    SpectrumDisc,
    Splitting,
    apply,
    contraction_power,
    mini_norm,
    power_norm,
    riesz_split,
    rolewicz,
    rolewicz_eigenvector,
    rotation_matrix,
    spectral_radius,
    spectrum,
)
from .rules import ConstRule, ExplicitRule, GeometricRule, HarmonicRule
from .spaces import (
    FAggregate,
    Lp,
    SpaceSpec,
    Vector,
    basis_vector,
    distance,
    norm,
    norm_tail_bound,
    project,
    vector,
    zero_vector,
)
from .specification import (
    SegmentSchedule,
    ShadowReport,
    fixed_vector,
    linear_periodic_points,
    periodic_vector,
    shadow_point,
    sp_constant,
    sp_entropy_lower_bound,
    sp_separated_family,
)
from .symbolic import (
    SymbolSequence,
    bernoulli_shift,
    cube_sample,
    phi_N,
    verify_conjugacy,
)

__version__ = "0.1.0"
