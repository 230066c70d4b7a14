"""Exact information flows and pinning experiments for kinetic Ising networks."""

from .calibration import ComplexityReport, complexity_curve, match_noise, statistical_complexity
from .features import DecayFit, RoleTable, curve_features, fit_decay, integrated_mi, role_scores
from .graph import (
    Graph,
    are_isomorphic,
    canonical_form,
    erdos_renyi_ensemble,
    is_connected,
    krackhardt_kite,
    load_graph,
    named_graph,
)
from .infoflow import InfoCurve, entropy, info_curve, info_curves, lagged_mi
from .ising import (
    ModelParams,
    TransferOperator,
    boltzmann_distribution,
    glauber_accept,
    hamiltonian,
    macrostate_marginal,
    propagate,
    transfer_operator,
)
from .paths import (
    Trajectory,
    enumerate_tipping_trajectories,
    flip_expectations,
    max_likelihood_trajectories,
)
from .sim import (
    SimConfig,
    count_transitions,
    intervention_sweep,
    noise_metric,
    simulate,
)
from .susceptibility import flip_susceptibility, susceptibility_curve

__version__ = "0.1.0"
