"""Phase-space calculus and mean-field dynamics on periodic grids.

The package implements, at one space dimension and laptop scale, the
numerical side of the semiclassical mean-field story: a quantization
bijection between grid symbols and dense operator matrices, coherent
state frames with the positive (anti-Wick) quantizer, commutator symbol
expansions with remainder budgets, a semi-Lagrangian solver for the
self-consistent classical transport equation, a split-step propagator
for the self-consistent quantum evolution, and the correction cascade
that ties the two together order by order in the small parameter.

Verification suites live in :mod:`weylflow.studies` and behind the
``weylflow`` command line tool.
"""

from .classical import (
    ClassicalTrajectory,
    FlowMap,
    ForcePath,
    integrate_flow,
    solve_vlasov,
    transport_pullback,
)
from .coherent import (
    CoherentFrameReport,
    antiwick_quantize,
    coherent_projector,
    coherent_vector,
    gabor_transform,
    heat_smooth,
    resolution_of_identity_check,
    trace_norm_bracket_check,
    wick_symbol_from_weyl,
    wick_type_symbol,
)
from .config import ConfigError, ExperimentConfig, load_config, template_text
from .expansion import ExpansionBundle, bracket_coefficient, solve_cascade
from .grids import (
    PhaseGrid,
    SpaceGrid,
    SymbolField,
    dual_momentum_grid,
    dual_phase_grid,
)
from .moyal import (
    MoyalExpansion,
    MoyalRemainderReport,
    ck_term,
    moyal_exact,
    moyal_expand,
    poisson_bracket,
    remainder_operator_norms,
)
from .potentials import PotentialSpec, PotentialTerm, format_terms, parse_terms
from .quantum import (
    QuantumTrajectory,
    conjugate_flow,
    gaussian_symbol,
    initial_density,
    initial_symbol,
    mean_field_potential,
    propagate_tdhf,
)
from .reporting import METRICS, ResultTable, read_field_raster, write_field_raster
from .spectral import (
    field_derivative,
    fit_loglog_slope,
    h_fourier,
    h_fourier_inverse,
    integrate,
    norm_l1,
    norm_l2,
    norm_sup,
    periodic_convolution,
    spectral_derivative,
)
from .studies import (
    CALCULUS_SUBSUITES,
    Check,
    run_calculus_suite,
    run_convergence_study,
    run_egorov_study,
    run_tdhf_checks,
    run_vlasov_checks,
)
from .weyl import (
    OperatorMatrix,
    SeminormReport,
    operator_norm,
    operator_norm_budget,
    phase_translation_seminorms,
    quantize_weyl,
    symbol_weyl,
    trace,
    trace_norm,
    trace_norm_budget,
    trace_product_check,
)

__version__ = "0.1.0"

__all__ = [
    "ClassicalTrajectory", "FlowMap", "ForcePath", "integrate_flow",
    "solve_vlasov", "transport_pullback",
    "CoherentFrameReport", "antiwick_quantize", "coherent_projector",
    "coherent_vector", "gabor_transform", "heat_smooth",
    "resolution_of_identity_check", "trace_norm_bracket_check",
    "wick_symbol_from_weyl", "wick_type_symbol",
    "ConfigError", "ExperimentConfig", "load_config", "template_text",
    "ExpansionBundle", "bracket_coefficient", "solve_cascade",
    "PhaseGrid", "SpaceGrid", "SymbolField", "dual_momentum_grid",
    "dual_phase_grid",
    "MoyalExpansion", "MoyalRemainderReport", "ck_term", "moyal_exact",
    "moyal_expand", "poisson_bracket", "remainder_operator_norms",
    "PotentialSpec", "PotentialTerm", "format_terms", "parse_terms",
    "QuantumTrajectory", "conjugate_flow", "gaussian_symbol",
    "initial_density", "initial_symbol", "mean_field_potential",
    "propagate_tdhf",
    "METRICS", "ResultTable", "read_field_raster", "write_field_raster",
    "field_derivative", "fit_loglog_slope", "h_fourier",
    "h_fourier_inverse", "integrate", "norm_l1", "norm_l2", "norm_sup",
    "periodic_convolution", "spectral_derivative",
    "CALCULUS_SUBSUITES", "Check", "run_calculus_suite",
    "run_convergence_study", "run_egorov_study", "run_tdhf_checks",
    "run_vlasov_checks",
    "OperatorMatrix", "SeminormReport", "operator_norm",
    "operator_norm_budget", "phase_translation_seminorms", "quantize_weyl",
    "symbol_weyl", "trace", "trace_norm", "trace_norm_budget",
    "trace_product_check",
    "__version__",
]
