"""Network-level movement process and exact policy evaluation.

States are graph nodes and actions are outgoing edges. A self-loop action
keeps the attacker in place with probability one; a move attempt succeeds
with the skill probability and otherwise leaves the attacker where it was.
Successful moves pay the target node's importance, and any step that ends
on the starting node pays the stay penalty (zero on terminal nodes, which
model absorbing critical assets as zero-reward self-loops).

Policy evaluation solves the linear Bellman system

    V(s) = sum_a pi(a|s) sum_s' T(s'|s,a) [R(s,a,s') + gamma V(s')]

directly for small state spaces and falls back to Gauss-Seidel sweeps for
very large ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidAction, InvalidPolicy, MetapentError
from .netgraph import NetworkGraph

PROB_TOL = 1e-9
RESIDUAL_TOL = 1e-8
DENSE_STATE_LIMIT = 2000
GS_TOL = 1e-10
GS_MAX_SWEEPS = 100_000


@dataclass(frozen=True)
class MacroProcess:
    """Movement MDP: topology plus skill, stay penalty and discounting."""

    graph: NetworkGraph
    skill: float
    stay_penalty: float
    gamma: float = 0.9
    terminal: frozenset[str] = frozenset()

    def validate(self) -> list[str]:
        problems = []
        if not 0.0 <= self.skill <= 1.0:
            problems.append(f"skill {self.skill} outside [0, 1]")
        if not self.stay_penalty < 0.0:
            problems.append(f"stay penalty {self.stay_penalty} must be negative")
        if not 0.0 <= self.gamma < 1.0:
            problems.append(f"gamma {self.gamma} outside [0, 1)")
        for t in sorted(self.terminal):
            if t not in self.graph.nodes:
                problems.append(f"terminal marker on undeclared node '{t}'")
        return problems

    def _check_action(self, s: str, action: tuple[str, str]) -> str:
        src, dst = action
        if src != s or (src, dst) not in self.graph.edges:
            raise InvalidAction(f"action {action} is not an out-edge of '{s}'")
        return dst

    def transition(self, s: str, action: tuple[str, str]) -> list[tuple[str, float]]:
        """Next-state distribution for taking ``action`` in ``s``.

        Staying is certain; a move lands on the target with the skill
        probability and bounces back otherwise. Zero-probability entries
        are dropped, so the rows always sum to exactly one.
        """
        dst = self._check_action(s, action)
        if dst == s:
            return [(s, 1.0)]
        c = float(self.skill)
        if c >= 1.0:
            return [(dst, 1.0)]
        if c <= 0.0:
            return [(s, 1.0)]
        return [(dst, c), (s, 1.0 - c)]

    def reward(self, s: str, action: tuple[str, str], landed: str) -> float:
        """Movement reward: target importance on success, stay penalty otherwise."""
        dst = self._check_action(s, action)
        if landed not in (s, dst):
            raise InvalidAction(f"state '{landed}' is not reachable by {action}")
        if landed != s:
            return self.graph.importance_of(landed)
        if s in self.terminal:
            return 0.0
        return float(self.stay_penalty)


@dataclass
class GlobalPolicy:
    """Per-state distribution over move targets (keys are out-edge targets)."""

    moves: dict[str, dict[str, float]]

    def move_dist(self, s: str) -> dict[str, float]:
        return self.moves[s]

    def validate(self, graph: NetworkGraph) -> list[str]:
        problems = []
        for s in graph.sorted_nodes():
            if s not in self.moves:
                problems.append(f"no distribution for state '{s}'")
                continue
            dist = self.moves[s]
            allowed = set(graph.targets(s))
            for tgt, p in sorted(dist.items()):
                if tgt not in allowed:
                    problems.append(f"state '{s}': support target '{tgt}' is not an out-edge")
                if p < -PROB_TOL:
                    problems.append(f"state '{s}': negative probability for '{tgt}'")
            if dist and abs(sum(dist.values()) - 1.0) > PROB_TOL:
                problems.append(f"state '{s}': probabilities sum to {sum(dist.values())!r}")
            if not dist and allowed:
                problems.append(f"state '{s}': empty distribution but out-edges exist")
        for s in sorted(set(self.moves) - graph.nodes):
            problems.append(f"distribution for undeclared state '{s}'")
        return problems


def uniform_policy(graph: NetworkGraph) -> GlobalPolicy:
    """Deterministic starting point: uniform over each state's out-edges."""
    moves: dict[str, dict[str, float]] = {}
    for s in graph.sorted_nodes():
        targets = graph.targets(s)
        moves[s] = {t: 1.0 / len(targets) for t in targets} if targets else {}
    return GlobalPolicy(moves)


def _policy_matrices(m: MacroProcess, pi: GlobalPolicy):
    states = m.graph.sorted_nodes()
    idx = {s: i for i, s in enumerate(states)}
    n = len(states)
    P = np.zeros((n, n))
    r = np.zeros(n)
    for s in states:
        i = idx[s]
        for tgt, p_act in sorted(pi.moves[s].items()):
            if p_act == 0.0:
                continue
            action = (s, tgt)
            for landed, p_t in m.transition(s, action):
                P[i, idx[landed]] += p_act * p_t
                r[i] += p_act * p_t * m.reward(s, action, landed)
    return states, P, r


def evaluate_policy(m: MacroProcess, pi: GlobalPolicy) -> dict[str, float]:
    """Exact value function of ``pi`` on ``m`` (Bellman residual <= 1e-8)."""
    problems = pi.validate(m.graph)
    if problems:
        raise InvalidPolicy("; ".join(problems))
    states, P, r = _policy_matrices(m, pi)
    n = len(states)
    if n <= DENSE_STATE_LIMIT:
        V = np.linalg.solve(np.eye(n) - m.gamma * P, r)
    else:
        V = _gauss_seidel(P, r, m.gamma)
    residual = float(np.max(np.abs(r + m.gamma * P @ V - V))) if n else 0.0
    if residual > RESIDUAL_TOL:
        raise MetapentError(f"policy evaluation residual {residual:.3e} exceeds {RESIDUAL_TOL}")
    return {s: float(V[i]) for i, s in enumerate(states)}


def _gauss_seidel(P: np.ndarray, r: np.ndarray, gamma: float) -> np.ndarray:
    n = len(r)
    V = np.zeros(n)
    for _ in range(GS_MAX_SWEEPS):
        delta = 0.0
        for i in range(n):
            new = r[i] + gamma * float(P[i] @ V)
            delta = max(delta, abs(new - V[i]))
            V[i] = new
        if delta <= GS_TOL:
            break
    return V


def bellman_residual(m: MacroProcess, pi: GlobalPolicy, values: dict[str, float]) -> float:
    """Max absolute Bellman residual of ``values`` under ``pi``."""
    states, P, r = _policy_matrices(m, pi)
    if not states:
        return 0.0
    V = np.array([values[s] for s in states])
    return float(np.max(np.abs(r + m.gamma * P @ V - V)))


def horizon_for(gamma: float, cutoff: float = 1e-4) -> int:
    """Smallest horizon H with gamma**H below ``cutoff`` (1 for gamma == 0)."""
    if gamma <= 0.0:
        return 1
    return max(1, math.ceil(math.log(cutoff) / math.log(gamma)))
