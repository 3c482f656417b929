"""Weighted Lorentz sequence spaces L_{p,w}: certified norms, decompositions and compactness tests."""

from __future__ import annotations

from .compactness import (
    Certificate,
    Counterexample,
    Dominated,
    ExplicitFinite,
    Method,
    NotEquinormed,
    NotSatisfied,
    ScaledBasis,
    ShiftFamily,
    Unbounded,
    Verdict,
    certify,
    difference_family,
    family_bound,
    gamma_inverse_at,
    gamma_of,
    lambda_of,
    min_equinorm_index,
    tail_criterion_index,
)
from .core import (
    HARMONIC,
    INVSQRT,
    ExplicitPrefix,
    Finite,
    Geometric,
    GeometricTail,
    Power,
    PowerDecay,
    PowerTail,
    Rearrangement,
    Tabled,
    rearrangement_prefix,
    sigma_inverse_at,
    weight_at,
    weight_prefix_sum,
)
from .errors import (
    BudgetExhausted,
    HorizonExhausted,
    InvalidSpec,
    LorentzError,
    NotSummable,
    NotUniform,
    SupportTooLarge,
    ToleranceUnreachable,
    UnknownTerm,
    UnsupportedVariant,
)
from .norms import (
    DecompositionRecord,
    Inconclusive,
    Interval,
    Member,
    NotMember,
    classify_membership,
    decompose,
    lorentz_norm_bounds,
    lorentz_norm_pth,
    p_norm,
    seminorm_pth,
    tail_norm_pth,
)
from .oracle import (
    PlacementSearchConfig,
    brute_force_equinorm_gap,
    brute_force_norm_pth,
    brute_force_seminorm_pth,
)

__version__ = "0.1.0"

__all__ = [
    "BudgetExhausted",
    "Certificate",
    "Counterexample",
    "DecompositionRecord",
    "Dominated",
    "ExplicitFinite",
    "ExplicitPrefix",
    "Finite",
    "Geometric",
    "GeometricTail",
    "HARMONIC",
    "HorizonExhausted",
    "INVSQRT",
    "Inconclusive",
    "Interval",
    "InvalidSpec",
    "LorentzError",
    "Member",
    "Method",
    "NotEquinormed",
    "NotMember",
    "NotSatisfied",
    "NotSummable",
    "NotUniform",
    "PlacementSearchConfig",
    "Power",
    "PowerDecay",
    "PowerTail",
    "Rearrangement",
    "ScaledBasis",
    "ShiftFamily",
    "SupportTooLarge",
    "Tabled",
    "ToleranceUnreachable",
    "Unbounded",
    "UnknownTerm",
    "UnsupportedVariant",
    "Verdict",
    "brute_force_equinorm_gap",
    "brute_force_norm_pth",
    "brute_force_seminorm_pth",
    "certify",
    "classify_membership",
    "decompose",
    "difference_family",
    "family_bound",
    "gamma_inverse_at",
    "gamma_of",
    "lambda_of",
    "lorentz_norm_bounds",
    "lorentz_norm_pth",
    "min_equinorm_index",
    "p_norm",
    "rearrangement_prefix",
    "seminorm_pth",
    "sigma_inverse_at",
    "tail_criterion_index",
    "tail_norm_pth",
    "weight_at",
    "weight_prefix_sum",
]
