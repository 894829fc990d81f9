"""Coupled solver: tactic trees and the movement process, iterated jointly.

One round of the loop evaluates the current movement policy, pushes the
resulting node values back into every tactic tree as leaf utilities,
re-solves each tree under the chosen concept, and reads the next policy
off the solved trees' outcome distributions. The playbook is the
per-node profile set plus the induced policy once successive rounds stop
moving (sup-norm on values, total variation per state on the policy).

The alternation is not guaranteed to contract, so exact revisits of a
previous (policy, values) pair are detected and reported as oscillation
rather than slow convergence.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .errors import IncompleteProfile, InvalidParameter, MetapentError, UnknownNode
from .gametree import (
    MicroTacticGame,
    PlanProfile,
    Role,
    outcome_probabilities,
    set_outcome_utilities,
    solve_spne,
    solve_stackelberg,
)
from .macromdp import GlobalPolicy, MacroProcess, evaluate_policy, uniform_policy

CONCEPTS = ("spne", "stackelberg")
DEFAULT_EPS = 1e-6
DEFAULT_MAX_ITER = 500
_ROUND = 9  # hash rounding for cycle detection


@dataclass
class MetaSecurityGame:
    """All per-node tactic trees plus the shared movement process."""

    mtgs: dict[str, MicroTacticGame]
    msp: MacroProcess

    def validate(self) -> list[str]:
        problems = self.msp.validate()
        graph = self.msp.graph
        for v in graph.sorted_nodes():
            mtg = self.mtgs.get(v)
            if mtg is None:
                problems.append(f"node '{v}' has no tactic tree")
                continue
            if mtg.node != v:
                problems.append(f"tree stored under '{v}' is bound to '{mtg.node}'")
            problems.extend(f"node '{v}': {p}" for p in mtg.validate(graph))
            targets = set(graph.targets(v))
            if mtg.outcomes() != targets:
                problems.append(
                    f"node '{v}': tree outcomes {sorted(mtg.outcomes())} do not equal "
                    f"out-edge targets {sorted(targets)}"
                )
        for v in sorted(set(self.mtgs) - graph.nodes):
            problems.append(f"tactic tree for undeclared node '{v}'")
        return problems


@dataclass
class MetaPlaybook:
    """Joint solution: profiles, induced policy, values, and loop status."""

    profiles: dict[str, PlanProfile]
    policy: GlobalPolicy
    values: dict[str, float]
    iterations: int
    converged: bool
    oscillating: bool = False


def derive_global_policy(
    game: MetaSecurityGame, profiles: Mapping[str, PlanProfile]
) -> GlobalPolicy:
    """Movement policy induced by the tree profiles (outcome distributions)."""
    moves: dict[str, dict[str, float]] = {}
    for v in game.msp.graph.sorted_nodes():
        profile = profiles.get(v)
        if profile is None:
            raise IncompleteProfile(f"no plan profile for node '{v}'")
        moves[v] = outcome_probabilities(game.mtgs[v], profile)
    return GlobalPolicy(moves)


def _solve_node(
    mtg: MicroTacticGame,
    concept: str,
    fixed_defender: Mapping[str, Mapping[str, str]] | None,
) -> PlanProfile:
    if fixed_defender is not None:
        return solve_spne(mtg, fixed_defender=fixed_defender.get(mtg.node, {}))
    if concept == "stackelberg":
        return solve_stackelberg(mtg)
    return solve_spne(mtg)


def iterate_once(
    game: MetaSecurityGame,
    policy: GlobalPolicy,
    concept: str = "spne",
    fixed_defender: Mapping[str, Mapping[str, str]] | None = None,
) -> tuple[dict[str, float], dict[str, MicroTacticGame], dict[str, PlanProfile], GlobalPolicy]:
    """One loop body: evaluate, inject utilities, re-solve trees, induce policy."""
    values = evaluate_policy(game.msp, policy)
    games: dict[str, MicroTacticGame] = {}
    profiles: dict[str, PlanProfile] = {}
    for v in game.msp.graph.sorted_nodes():
        games[v] = set_outcome_utilities(game.mtgs[v], values, game.msp)
        profiles[v] = _solve_node(games[v], concept, fixed_defender)
    refreshed = MetaSecurityGame(mtgs=games, msp=game.msp)
    return values, games, profiles, derive_global_policy(refreshed, profiles)


def _tv_delta(old: GlobalPolicy, new: GlobalPolicy) -> float:
    worst = 0.0
    for s, dist in new.moves.items():
        prev = old.moves.get(s, {})
        keys = set(dist) | set(prev)
        worst = max(worst, 0.5 * sum(abs(dist.get(k, 0.0) - prev.get(k, 0.0)) for k in keys))
    return worst


def _state_key(values: dict[str, float], policy: GlobalPolicy):
    vals = tuple((v, round(x, _ROUND)) for v, x in sorted(values.items()))
    pol = tuple(
        (s, tuple((t, round(p, _ROUND)) for t, p in sorted(dist.items())))
        for s, dist in sorted(policy.moves.items())
    )
    return vals, pol


def solve_playbook(
    game: MetaSecurityGame,
    concept: str = "spne",
    eps: float = DEFAULT_EPS,
    max_iter: int = DEFAULT_MAX_ITER,
    fixed_defender: Mapping[str, Mapping[str, str]] | None = None,
) -> MetaPlaybook:
    """Iterate the loop body from a uniform policy until it stops moving.

    Non-convergence is not an error: the playbook comes back flagged with
    ``converged=False`` (and ``oscillating=True`` when the loop revisited
    an earlier state instead of merely running out of iterations).
    """
    if concept not in CONCEPTS:
        raise InvalidParameter(f"unknown solution concept '{concept}'")
    if not eps > 0:
        raise InvalidParameter("eps must be positive")
    if max_iter < 1:
        raise InvalidParameter("max_iter must be at least 1")
    problems = game.validate()
    if problems:
        raise MetapentError("invalid meta-security game: " + "; ".join(problems))

    policy = uniform_policy(game.msp.graph)
    values: dict[str, float] | None = None
    seen: set = set()
    iterations = 0
    profiles: dict[str, PlanProfile] = {}
    while iterations < max_iter:
        iterations += 1
        new_values, _, profiles, new_policy = iterate_once(game, policy, concept, fixed_defender)
        value_delta = (
            max(abs(new_values[v] - values[v]) for v in new_values) if values is not None else float("inf")
        )
        policy_delta = _tv_delta(policy, new_policy)
        values = new_values
        policy = new_policy
        if value_delta <= eps and policy_delta <= eps:
            return MetaPlaybook(profiles, policy, values, iterations, converged=True)
        key = _state_key(values, policy)
        if key in seen:
            return MetaPlaybook(profiles, policy, values, iterations, converged=False, oscillating=True)
        seen.add(key)
    return MetaPlaybook(profiles, policy, values or {}, iterations, converged=False)


def risk_score(values: Mapping[str, float], v: str, v_max: float) -> float:
    """Normalized exposure of a node: value over ``v_max``, zero if negative.

    Values above ``v_max`` are not clamped; callers cap the display at 1
    and flag the excess.
    """
    if not v_max > 0:
        raise InvalidParameter(f"v_max must be positive, got {v_max}")
    if v not in values:
        raise UnknownNode(f"no value entry for node '{v}'")
    val = values[v]
    return val / v_max if val > 0 else 0.0


def risk_table(values: Mapping[str, float], v_max: float) -> dict[str, float]:
    return {v: risk_score(values, v, v_max) for v in sorted(values)}


def _fmt(x: float) -> str:
    return f"{x + 0.0:.10g}"  # +0.0 folds -0.0 into 0.0


def render_playbook(
    game: MetaSecurityGame,
    playbook: MetaPlaybook,
    v_max: float,
    header: Mapping[str, str] | None = None,
) -> str:
    """Deterministic text export of a solved playbook.

    Lists run metadata, the entry summary, then one block per node with
    its value, risk, chosen actions and induced move distribution.
    """
    graph = game.msp.graph
    entry = graph.entry
    risks = risk_table(playbook.values, v_max)
    lines: list[str] = []
    for key, val in (header or {}).items():
        lines.append(f"{key}: {val}")
    lines.append(f"iterations: {playbook.iterations}")
    status = "true" if playbook.converged else ("oscillating" if playbook.oscillating else "false")
    lines.append(f"converged: {status}")
    lines.append(
        f"entry {entry}: value {_fmt(playbook.values[entry])}  risk {_fmt(risks[entry])}"
    )
    for v in graph.sorted_nodes():
        lines.append("")
        marks = []
        if v in graph.critical:
            marks.append("critical")
        if v in game.msp.terminal:
            marks.append("terminal")
        suffix = " (" + ", ".join(marks) + ")" if marks else ""
        lines.append(f"[{v}]{suffix}")
        lines.append(f"  value: {_fmt(playbook.values[v])}")
        flag = "  (exceeds v_max)" if risks[v] > 1.0 else ""
        lines.append(f"  risk: {_fmt(risks[v])}{flag}")
        profile = playbook.profiles[v]
        for role, name in ((Role.ATTACKER, "attacker"), (Role.DEFENDER, "defender")):
            chosen = profile.chosen(role)
            if chosen:
                body = "  ".join(f"{hid}={act}" for hid, act in sorted(chosen.items()))
                lines.append(f"  {name}: {body}")
        dist = playbook.policy.moves[v]
        body = "  ".join(f"{t}={_fmt(p)}" for t, p in sorted(dist.items()))
        lines.append(f"  policy: {body}")
    return "\n".join(lines) + "\n"
