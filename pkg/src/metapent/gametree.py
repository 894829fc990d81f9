"""Extensive-form tactic trees and their exact solvers.

Each tree is a finite perfect-information game between the attacker, the
defender and a chance player with a fixed policy. Every leaf names the
network node the tactic hands control to (staying put counts, via the
node's self-loop edge), so a solved tree induces a distribution over the
owning node's out-edges.

Two solution concepts are supported:

* backward induction, yielding a pure subgame-perfect profile where each
  player maximizes its own continuation value (ties broken by the
  lexicographically first action),
* defender commitment, which enumerates pure defender assignments over
  all defender decision nodes and keeps the one with the highest defender
  value against an attacker best response that breaks ties in the
  defender's favor.

Trees are plain data; solving never mutates them, and utility injection
returns a fresh game value.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterator, Mapping

from .errors import (
    IncompleteProfile,
    InvalidAction,
    UnknownNode,
    UtilityUnset,
)
from .macromdp import MacroProcess

PROB_TOL = 1e-9
UTILITY_REL_TOL = 1e-9


class Role(Enum):
    ATTACKER = "attacker"
    DEFENDER = "defender"
    CHANCE = "chance"
    LEAF = "leaf"


@dataclass
class GameNode:
    """One history vertex: a decision point, a chance move, or a leaf."""

    history_id: str
    role: Role
    actions: tuple[str, ...] = ()
    children: dict[str, "GameNode"] = field(default_factory=dict)
    chance: tuple[float, ...] | None = None
    outcome: str | None = None

    def is_leaf(self) -> bool:
        return self.role is Role.LEAF

    def chance_dist(self) -> dict[str, float]:
        if self.chance is None:
            raise InvalidAction(f"node '{self.history_id}' has no chance distribution")
        return dict(zip(self.actions, self.chance))


@dataclass
class MicroTacticGame:
    """Tactic tree for one network node plus its leaf utilities.

    ``utilities`` maps leaf history ids to ``(attacker, defender)`` pairs
    and stays empty until the network layer injects values; ``label``
    carries the template name the tree was instantiated from.
    """

    node: str
    root: GameNode
    utilities: dict[str, tuple[float, float]] = field(default_factory=dict)
    label: str = ""

    def walk(self) -> Iterator[GameNode]:
        """Preorder traversal, children in action order."""
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            for action in reversed(node.actions):
                stack.append(node.children[action])

    def leaves(self) -> list[GameNode]:
        return [n for n in self.walk() if n.is_leaf()]

    def decision_nodes(self, role: Role) -> list[GameNode]:
        return [n for n in self.walk() if n.role is role]

    def outcomes(self) -> set[str]:
        return {n.outcome for n in self.leaves() if n.outcome is not None}

    def with_utilities(self, utilities: Mapping[str, tuple[float, float]]) -> "MicroTacticGame":
        return replace(self, utilities={k: (float(a), float(d)) for k, (a, d) in utilities.items()})

    def validate(self, graph=None) -> list[str]:
        """Structural violations; pass a graph to also check leaf outcomes."""
        problems: list[str] = []
        seen_ids: set[str] = set()
        seen_objs: set[int] = set()
        stack = [self.root]
        leaf_ids: set[str] = set()
        while stack:
            n = stack.pop()
            where = f"node '{n.history_id}'"
            if id(n) in seen_objs:
                problems.append(f"{where}: aliased in the tree (not a tree)")
                continue
            seen_objs.add(id(n))
            if n.history_id in seen_ids:
                problems.append(f"{where}: duplicate history id")
            seen_ids.add(n.history_id)
            if n.is_leaf():
                leaf_ids.add(n.history_id)
                if n.outcome is None:
                    problems.append(f"{where}: leaf without outcome")
                elif graph is not None and (self.node, n.outcome) not in graph.edges:
                    problems.append(
                        f"{where}: outcome '{n.outcome}' is not an out-edge of '{self.node}'"
                    )
                if n.actions or n.children:
                    problems.append(f"{where}: leaf with actions")
                continue
            if not n.actions:
                problems.append(f"{where}: no actions")
            if len(set(n.actions)) != len(n.actions):
                problems.append(f"{where}: duplicate action labels")
            if set(n.children) != set(n.actions):
                problems.append(f"{where}: children do not match actions")
            else:
                stack.extend(n.children[a] for a in n.actions)
            if n.role is Role.CHANCE:
                if n.chance is None or len(n.chance) != len(n.actions):
                    problems.append(f"{where}: chance distribution missing or misaligned")
                else:
                    if any(p < 0 for p in n.chance):
                        problems.append(f"{where}: negative chance probability")
                    if abs(sum(n.chance) - 1.0) > PROB_TOL:
                        problems.append(f"{where}: chance probabilities sum to {sum(n.chance)!r}")
            elif n.chance is not None:
                problems.append(f"{where}: chance distribution on a non-chance node")
            if n.outcome is not None:
                problems.append(f"{where}: outcome on an internal node")
        for hid, (ua, ud) in sorted(self.utilities.items()):
            if hid not in leaf_ids:
                problems.append(f"utility for non-leaf id '{hid}'")
            if abs(ud + ua) > UTILITY_REL_TOL * max(1.0, abs(ua)):
                problems.append(f"leaf '{hid}': utilities are not zero-sum ({ua}, {ud})")
        return problems


@dataclass
class PlanProfile:
    """Behavioral plan for one tree: per decision node, a move distribution.

    Solvers emit degenerate distributions (pure choices); the chance table
    mirrors the tree's fixed randomness so the profile is self-contained.
    """

    attacker: dict[str, dict[str, float]] = field(default_factory=dict)
    defender: dict[str, dict[str, float]] = field(default_factory=dict)
    chance: dict[str, dict[str, float]] = field(default_factory=dict)

    def chosen(self, role: Role) -> dict[str, str]:
        """Most likely action per decision node (ties to the first label)."""
        table = self.attacker if role is Role.ATTACKER else self.defender
        out = {}
        for hid, dist in table.items():
            out[hid] = max(sorted(dist), key=lambda a: dist[a])
        return out

    def validate(self, game: MicroTacticGame) -> list[str]:
        problems = []
        for role, table in ((Role.ATTACKER, self.attacker), (Role.DEFENDER, self.defender)):
            for n in game.decision_nodes(role):
                dist = table.get(n.history_id)
                if dist is None:
                    problems.append(f"missing {role.value} entry for '{n.history_id}'")
                    continue
                if set(dist) - set(n.actions):
                    problems.append(f"'{n.history_id}': distribution over unknown actions")
                if abs(sum(dist.values()) - 1.0) > PROB_TOL:
                    problems.append(f"'{n.history_id}': probabilities sum to {sum(dist.values())!r}")
        return problems


def _leaf_utility(game: MicroTacticGame, node: GameNode) -> tuple[float, float]:
    try:
        return game.utilities[node.history_id]
    except KeyError:
        raise UtilityUnset(
            f"leaf '{node.history_id}' of node '{game.node}' has no utility"
        ) from None


def _induce(
    game: MicroTacticGame,
    pinned_defender: Mapping[str, str] | None,
    favor_defender_ties: bool,
) -> tuple[tuple[float, float], dict[str, str], dict[str, str]]:
    """Backward induction; returns root value and choices for both players.

    ``pinned_defender`` freezes the defender's action at the listed
    decision nodes. Off-path subtrees are still solved so the returned
    choice maps cover every decision node.
    """
    attacker_choice: dict[str, str] = {}
    defender_choice: dict[str, str] = {}

    def visit(n: GameNode) -> tuple[float, float]:
        if n.is_leaf():
            return _leaf_utility(game, n)
        values = {a: visit(n.children[a]) for a in n.actions}
        if n.role is Role.CHANCE:
            ua = sum(p * values[a][0] for a, p in zip(n.actions, n.chance))
            ud = sum(p * values[a][1] for a, p in zip(n.actions, n.chance))
            return (ua, ud)
        if n.role is Role.DEFENDER and pinned_defender is not None:
            try:
                act = pinned_defender[n.history_id]
            except KeyError:
                raise IncompleteProfile(
                    f"fixed defender profile missing decision node '{n.history_id}'"
                ) from None
            if act not in n.children:
                raise InvalidAction(f"'{act}' is not an action at '{n.history_id}'")
            defender_choice[n.history_id] = act
            return values[act]
        own = 0 if n.role is Role.ATTACKER else 1
        best = None
        for a in sorted(n.actions):
            v = values[a]
            if best is None or v[own] > values[best][own]:
                best = a
            elif favor_defender_ties and n.role is Role.ATTACKER and v[own] == values[best][own]:
                if v[1] > values[best][1]:
                    best = a
        if n.role is Role.ATTACKER:
            attacker_choice[n.history_id] = best
        else:
            defender_choice[n.history_id] = best
        return values[best]

    value = visit(game.root)
    return value, attacker_choice, defender_choice


def _profile_from_choices(
    game: MicroTacticGame, attacker: Mapping[str, str], defender: Mapping[str, str]
) -> PlanProfile:
    chance = {
        n.history_id: n.chance_dist() for n in game.decision_nodes(Role.CHANCE)
    }
    return PlanProfile(
        attacker={hid: {act: 1.0} for hid, act in sorted(attacker.items())},
        defender={hid: {act: 1.0} for hid, act in sorted(defender.items())},
        chance=chance,
    )


def solve_spne(
    game: MicroTacticGame, fixed_defender: Mapping[str, str] | None = None
) -> PlanProfile:
    """Pure subgame-perfect profile via backward induction.

    With ``fixed_defender`` the defender's moves are taken from the given
    pure assignment (a scripted defense) and only the attacker optimizes.
    """
    _, attacker, defender = _induce(game, fixed_defender, favor_defender_ties=False)
    return _profile_from_choices(game, attacker, defender)


def solve_stackelberg(game: MicroTacticGame) -> PlanProfile:
    """Pure defender commitment with a defender-favoring attacker response.

    Every pure assignment over defender decision nodes is scored against
    the attacker's best response; the first assignment (in lexicographic
    node/action order) attaining the best defender value wins, so the
    output is deterministic.
    """
    defender_nodes = sorted(game.decision_nodes(Role.DEFENDER), key=lambda n: n.history_id)
    if not defender_nodes:
        value, attacker, defender = _induce(game, None, favor_defender_ties=True)
        return _profile_from_choices(game, attacker, defender)
    ids = [n.history_id for n in defender_nodes]
    best = None
    for combo in itertools.product(*(sorted(n.actions) for n in defender_nodes)):
        pinned = dict(zip(ids, combo))
        value, attacker, defender = _induce(game, pinned, favor_defender_ties=True)
        if best is None or value[1] > best[0][1]:
            best = (value, attacker, defender)
    _, attacker, defender = best
    return _profile_from_choices(game, attacker, defender)


def _move_dist(profile: PlanProfile, node: GameNode) -> dict[str, float]:
    if node.role is Role.CHANCE:
        dist = profile.chance.get(node.history_id)
        return dist if dist is not None else node.chance_dist()
    table = profile.attacker if node.role is Role.ATTACKER else profile.defender
    try:
        dist = table[node.history_id]
    except KeyError:
        raise IncompleteProfile(
            f"profile has no entry for {node.role.value} node '{node.history_id}'"
        ) from None
    if set(dist) - set(node.actions):
        raise InvalidAction(f"profile at '{node.history_id}' uses unknown actions")
    return dist


def outcome_probabilities(game: MicroTacticGame, profile: PlanProfile) -> dict[str, float]:
    """Joint probability of reaching each leaf outcome under ``profile``.

    Every outcome of the tree appears in the result, zeros included, so
    the values form a distribution over the node's out-edge targets.
    The profile must cover every decision node, reachable or not.
    """
    for role, table in ((Role.ATTACKER, profile.attacker), (Role.DEFENDER, profile.defender)):
        for node in game.decision_nodes(role):
            if node.history_id not in table:
                raise IncompleteProfile(
                    f"profile has no entry for {role.value} node '{node.history_id}'"
                )
    result = {z: 0.0 for z in sorted(game.outcomes())}

    def descend(node: GameNode, prob: float) -> None:
        if node.is_leaf():
            result[node.outcome] += prob
            return
        dist = _move_dist(profile, node)
        for action in node.actions:
            p = dist.get(action, 0.0)
            if p:
                descend(node.children[action], prob * p)

    descend(game.root, 1.0)
    return result


def expected_utility(game: MicroTacticGame, profile: PlanProfile) -> tuple[float, float]:
    """Expected (attacker, defender) utility of playing ``profile``."""
    total = [0.0, 0.0]

    def descend(node: GameNode, prob: float) -> None:
        if node.is_leaf():
            ua, ud = _leaf_utility(game, node)
            total[0] += prob * ua
            total[1] += prob * ud
            return
        dist = _move_dist(profile, node)
        for action in node.actions:
            p = dist.get(action, 0.0)
            if p:
                descend(node.children[action], prob * p)

    descend(game.root, 1.0)
    return (total[0], total[1])


def set_outcome_utilities(
    game: MicroTacticGame,
    values: Mapping[str, float],
    msp: MacroProcess,
    node: str | None = None,
) -> MicroTacticGame:
    """Fresh game whose leaf utilities are movement values under ``values``.

    A leaf with outcome ``u`` is worth the expected one-step movement
    return of attempting the edge (node, u): reward plus discounted value
    of wherever the attempt lands. The defender's utility is the negative.
    """
    v = node if node is not None else game.node
    if v not in values:
        raise UnknownNode(f"no value entry for node '{v}'")
    utilities: dict[str, tuple[float, float]] = {}
    for leaf in game.leaves():
        u = leaf.outcome
        if u not in values:
            raise UnknownNode(f"no value entry for outcome '{u}'")
        action = (v, u)
        ua = 0.0
        for landed, p in msp.transition(v, action):
            ua += p * (msp.reward(v, action, landed) + msp.gamma * values[landed])
        utilities[leaf.history_id] = (ua, -ua)
    return replace(game, utilities=utilities)


_DOT_STYLE = {
    Role.ATTACKER: ("box", "lightcoral"),
    Role.DEFENDER: ("box", "lightskyblue"),
    Role.CHANCE: ("ellipse", "khaki"),
    Role.LEAF: ("ellipse", "palegreen"),
}


def to_dot(game: MicroTacticGame, profile: PlanProfile | None = None, title: str | None = None) -> str:
    """Graphviz rendering of the tree, equilibrium actions emphasized.

    Output is deterministic: preorder node listing, actions in tree order.
    """
    chosen: dict[str, str] = {}
    if profile is not None:
        chosen.update(profile.chosen(Role.ATTACKER))
        chosen.update(profile.chosen(Role.DEFENDER))
    lines = ["digraph mtg {"]
    label = title if title is not None else (game.label or game.node)
    lines.append(f'  label="{label}";')
    lines.append("  labelloc=t;")
    lines.append('  node [style=filled, fontname="Helvetica"];')
    for n in game.walk():
        shape, color = _DOT_STYLE[n.role]
        if n.is_leaf():
            text = f"{n.history_id}\\n-> {n.outcome}"
            util = game.utilities.get(n.history_id)
            if util is not None:
                text += f"\\nu_a={util[0]:.6g}"
            lines.append(f'  "{n.history_id}" [shape={shape}, fillcolor={color}, label="{text}"];')
            continue
        lines.append(
            f'  "{n.history_id}" [shape={shape}, fillcolor={color}, label="{n.history_id}"];'
        )
    for n in game.walk():
        if n.is_leaf():
            continue
        dist = n.chance_dist() if n.role is Role.CHANCE else None
        for action in n.actions:
            child = n.children[action]
            text = action if dist is None else f"{action} ({dist[action]:.6g})"
            attrs = [f'label="{text}"']
            if chosen.get(n.history_id) == action:
                attrs.append("penwidth=2.5")
                attrs.append("style=bold")
            lines.append(f'  "{n.history_id}" -> "{child.history_id}" [{", ".join(attrs)}];')
    lines.append("}")
    return "\n".join(lines) + "\n"
