"""Bernstein approximation of smooth multivariate functions with
closed-form evaluation of mixed partial derivatives.

Domains: the unit cube, the unit simplex, and products of a simplex block
with a cube block. Deterministic evaluators are paired with Monte Carlo
estimators built on binomial and multinomial sampling, and with a harness
that measures uniform convergence of values and derivatives on fixed grids.
"""

from .bernstein import (
    CLAMP_TOL,
    CUBE,
    SIMPLEX,
    BernsteinModel,
    DomainError,
    Kind,
    build_model,
    deriv_cube,
    deriv_cube_grid,
    deriv_mixed,
    deriv_simplex,
    derivative,
    dump_model,
    eval_cube,
    eval_cube_grid,
    eval_mixed,
    eval_simplex,
    evaluate,
    load_model,
    mixed,
    model_lattice,
    model_size,
    oracle_deriv,
    parse_model,
    save_model,
)
from .finite_diff import (
    DOMAIN_ALL,
    DOMAIN_CUBE,
    DOMAIN_SIMPLEX,
    DiffSpec,
    ScalarField,
    delta_axis,
    delta_mixed,
    delta_mixed_iterated,
    difference_integral_check,
    normalized_delta,
)
from .harness import (
    CORPUS_NAMES,
    ConvergenceReport,
    FunctionSpec,
    GridSpec,
    builtin_corpus,
    convergence_table,
    corpus_member,
    grid_points,
    report_to_csv,
    report_to_json,
    sup_error,
)
from .multiindex import (
    LatticeKind,
    as_index,
    enumerate_lattice,
    lattice_size,
    log_binomial,
    log_factorial,
    log_multinomial,
    modulus,
)
from .stochastic import (
    McReport,
    lln_diagnostic,
    make_stream,
    mc_deriv,
    mc_eval,
    sample_binomial_vector,
    sample_multinomial_projection,
    z_score,
)

__version__ = "0.1.0"
