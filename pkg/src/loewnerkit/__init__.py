"""Controlled Loewner-Kufarev evolutions: Taylor, Grunsky and Faber coefficients,
their signature (iterated-integral) formulas, and truncated tau-functions."""

from .drivers import (
    DriverPath,
    DriverSet,
    FineGrid,
    herglotz_to_drivers,
    make_polynomial_driver,
    random_polynomial_drivers,
    stieltjes_integral,
    validate_convergence,
)
from .grassmann import (
    TauOperator,
    af_operator,
    faber_checks,
    faber_from_f,
    grunsky_from_f,
    tau_function,
    w_basis,
)
from .series import (
    BivariateTruncated,
    TruncatedLaurent,
    TruncatedTaylor,
    bivariate_log,
    compose,
    divided_difference,
    exp_series,
    log_series,
    project_nonpositive,
    residue,
    revert,
    series_arith,
)
from .solver import (
    CoefficientTrajectory,
    FaberTrajectory,
    GrunskyMatrix,
    faber_ode,
    grunsky_explicit,
    grunsky_ode,
    inverse_ode_residual,
    solve_taylor_ode,
    taylor_explicit,
)
from .witt import (
    ConsistencyError,
    LaurentWordSeries,
    afh_by_signature,
    composition_weight,
    composition_weight_tilde,
    sol_by_witt,
    witt_apply,
    word_action,
)
from .words import (
    IteratedIntegrals,
    WordSeries,
    apply_integral,
    brute_force_oracle,
    compositions,
    iterated_integral,
    s_element,
    shuffle,
)

__version__ = "0.1.0"
