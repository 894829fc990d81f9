"""Meta-game solver and simulator for automated penetration-testing playbooks.

The layers, bottom to top: a directed network topology (netgraph), a
movement MDP over it (macromdp), per-node extensive-form tactic trees and
their solvers (gametree), the coupled fixed-point solver and risk scoring
(metasolver), symbolic property sets with knowledge-library adaptation
(knowledge), the scenario file format plus bundled case studies
(scenario), and the sweep/CLI harness with figure rendering (sweep,
figures, cli).
"""

from .errors import (
    IncompleteProfile,
    InvalidAction,
    InvalidParameter,
    InvalidPolicy,
    LibraryGap,
    MetapentError,
    ScenarioError,
    UnknownNode,
    UnknownPredicate,
    UtilityUnset,
)
from .gametree import (
    GameNode,
    MicroTacticGame,
    PlanProfile,
    Role,
    expected_utility,
    outcome_probabilities,
    set_outcome_utilities,
    solve_spne,
    solve_stackelberg,
    to_dot,
)
from .knowledge import (
    KnowledgeLibrary,
    Property,
    PropertySet,
    build_meta_game,
    explore_node,
)
from .macromdp import (
    GlobalPolicy,
    MacroProcess,
    bellman_residual,
    evaluate_policy,
    uniform_policy,
)
from .metasolver import (
    MetaPlaybook,
    MetaSecurityGame,
    derive_global_policy,
    iterate_once,
    render_playbook,
    risk_score,
    risk_table,
    solve_playbook,
)
from .netgraph import NetworkGraph
from .scenario import (
    Scenario,
    builtin_impact_templates,
    load_bundled,
    load_scenario,
    parse_scenario,
    scenario_violations,
    serialize_scenario,
)
from .sweep import Overrides, SweepRow, parse_grid, rows_to_csv, run_sweep, solve_mode

__version__ = "0.1.0"

__all__ = [
    "GameNode",
    "GlobalPolicy",
    "IncompleteProfile",
    "InvalidAction",
    "InvalidParameter",
    "InvalidPolicy",
    "KnowledgeLibrary",
    "LibraryGap",
    "MacroProcess",
    "MetaPlaybook",
    "MetaSecurityGame",
    "MetapentError",
    "MicroTacticGame",
    "NetworkGraph",
    "Overrides",
    "PlanProfile",
    "Property",
    "PropertySet",
    "Role",
    "Scenario",
    "ScenarioError",
    "SweepRow",
    "UnknownNode",
    "UnknownPredicate",
    "UtilityUnset",
    "bellman_residual",
    "build_meta_game",
    "builtin_impact_templates",
    "derive_global_policy",
    "evaluate_policy",
    "expected_utility",
    "explore_node",
    "iterate_once",
    "load_bundled",
    "load_scenario",
    "outcome_probabilities",
    "parse_grid",
    "parse_scenario",
    "render_playbook",
    "risk_score",
    "risk_table",
    "rows_to_csv",
    "run_sweep",
    "scenario_violations",
    "serialize_scenario",
    "set_outcome_utilities",
    "solve_mode",
    "solve_playbook",
    "solve_spne",
    "solve_stackelberg",
    "to_dot",
    "uniform_policy",
]
