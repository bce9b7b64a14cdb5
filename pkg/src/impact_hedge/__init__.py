"""Optimal tracking of a frictionless hedge under quadratic trading costs.

A trader who must hold a position close to a moving target, but pays a
quadratic cost on the trading rate, should not chase the target itself. The
optimal strategy relaxes toward a forward-looking signal, a kernel-weighted
average of the target's expected future values, at a deterministic speed set
by the rescaled time to maturity. This package provides the closed-form
signals, strategies and costs for deterministic targets (with jumps and
integrable singularities), for a two-fixing average-price call in a Bachelier
model, and for simulated target ensembles, together with independent
discrete-control oracles to verify them against.
"""

from .bachelier import (
    BachelierAsianSpec,
    PathEnsemble,
    asian_delta,
    asian_delta_jump,
    asian_delta_post_fixing,
    asian_delta_terminal,
    asian_price,
    delta_paths,
    simulate_paths,
)
from .costs import (
    ClosedFormCost,
    DirectCost,
    ReachabilityResult,
    cost_closed_form,
    cost_direct,
    reachability_check,
)
from .errors import (
    AlignmentError,
    DomainError,
    ReachabilityError,
    SingularityError,
    StateError,
)
from .kernels import (
    kernel_constrained,
    kernel_constrained_mass,
    kernel_unconstrained,
    kernel_unconstrained_mass,
    position_decay_constrained,
    position_decay_unconstrained,
    scaled_time_to_maturity,
    terminal_weight,
    trading_rate_constrained,
    trading_rate_unconstrained,
)
from .oracle import (
    DiscreteSolution,
    GateauxReport,
    TreeLevel,
    TreeSolution,
    asian_tree_levels,
    deterministic_tree_levels,
    gateaux_check,
    solve_lq_deterministic,
    solve_lq_deterministic_dense,
    solve_lq_tree,
)
from .scenarios import (
    BUILTIN_SCENARIOS,
    Scenario,
    fig1_jump,
    fig2_singularity,
    fig3_asian,
    load_scenario,
    run_scenario,
    scenario_from_json,
    scenario_to_json,
    validate_scenario_dict,
)
from .strategies import (
    StrategyPath,
    integrate_constrained,
    integrate_myopic,
    integrate_unconstrained,
)
from .targets import (
    Constant,
    PolynomialShape,
    PowerSingularity,
    SignalPath,
    TargetProcess,
    TargetSegment,
    TerminalConstraint,
    asian_signal,
    asian_signal_mc,
    asian_signal_paths,
    deterministic_signal_values,
    signal_constrained,
    signal_from_paths,
    signal_quadratic_variation,
    signal_unconstrained,
    target_from_json,
    target_to_json,
)
from .timegrid import ModelParams, TimeGrid

__version__ = "0.1.0"

__all__ = [
    "AlignmentError",
    "BUILTIN_SCENARIOS",
    "BachelierAsianSpec",
    "ClosedFormCost",
    "Constant",
    "DirectCost",
    "DiscreteSolution",
    "DomainError",
    "GateauxReport",
    "ModelParams",
    "PathEnsemble",
    "PolynomialShape",
    "PowerSingularity",
    "ReachabilityError",
    "ReachabilityResult",
    "Scenario",
    "SignalPath",
    "SingularityError",
    "StateError",
    "StrategyPath",
    "TargetProcess",
    "TargetSegment",
    "TerminalConstraint",
    "TimeGrid",
    "TreeLevel",
    "TreeSolution",
    "asian_delta",
    "asian_delta_jump",
    "asian_delta_post_fixing",
    "asian_delta_terminal",
    "asian_price",
    "asian_signal",
    "asian_signal_mc",
    "asian_signal_paths",
    "asian_tree_levels",
    "cost_closed_form",
    "cost_direct",
    "delta_paths",
    "deterministic_signal_values",
    "deterministic_tree_levels",
    "fig1_jump",
    "fig2_singularity",
    "fig3_asian",
    "gateaux_check",
    "integrate_constrained",
    "integrate_myopic",
    "integrate_unconstrained",
    "kernel_constrained",
    "kernel_constrained_mass",
    "kernel_unconstrained",
    "kernel_unconstrained_mass",
    "load_scenario",
    "position_decay_constrained",
    "position_decay_unconstrained",
    "reachability_check",
    "run_scenario",
    "scaled_time_to_maturity",
    "scenario_from_json",
    "scenario_to_json",
    "signal_constrained",
    "signal_from_paths",
    "signal_quadratic_variation",
    "signal_unconstrained",
    "simulate_paths",
    "solve_lq_deterministic",
    "solve_lq_deterministic_dense",
    "solve_lq_tree",
    "target_from_json",
    "target_to_json",
    "terminal_weight",
    "trading_rate_constrained",
    "trading_rate_unconstrained",
    "validate_scenario_dict",
]
