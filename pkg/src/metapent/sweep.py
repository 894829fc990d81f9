"""Experiment harness: solve a scenario across a skill grid, emit CSV rows.

Modes map onto the per-node solving step:

* ``fixed``  - the defender plays the scenario's scripted profile and
               only the attacker optimizes,
* ``purple`` - defender commitment (leader) against a best-responding
               attacker,
* ``spne``   - both sides optimize via backward induction.

Rows come back sorted by (mode, skill) no matter how they were computed;
workers only parallelize the solving, never the output order.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .errors import InvalidParameter, MetapentError
from .metasolver import MetaPlaybook, MetaSecurityGame, risk_score, solve_playbook
from .scenario import Scenario

MODES = ("fixed", "purple", "spne")
DEFAULT_GRID_SPEC = "0:1:0.1"
CSV_HEADER = "c_a,mode,entry_risk,entry_value,accuracy,iterations,converged"


@dataclass
class SweepRow:
    """One (skill, mode) result; numeric fields are None on a failed solve."""

    skill: float
    mode: str
    entry_risk: float | None
    entry_value: float | None
    accuracy: float | None
    iterations: int
    converged: bool
    error: str = ""


@dataclass
class Overrides:
    """Optional parameter overrides applied on top of the scenario file."""

    skill: float | None = None
    gamma: float | None = None
    stay_penalty: float | None = None
    v_max: float | None = None
    eps: float = 1e-6
    max_iter: int = 500
    explore_mode: str = "scripted"
    seed: int = 0
    p_discover: float = 0.5


def parse_grid(spec: str) -> list[float]:
    """Grid spec: either "start:stop:step" or a comma list of values."""
    spec = spec.strip()
    try:
        if ":" in spec:
            start_s, stop_s, step_s = spec.split(":")
            start, stop, step = float(start_s), float(stop_s), float(step_s)
            if step <= 0 or stop < start:
                raise ValueError
            values = []
            i = 0
            while True:
                v = round(start + i * step, 10)
                if v > stop + 1e-12:
                    break
                values.append(min(v, stop))
                i += 1
        else:
            values = [round(float(tok), 10) for tok in spec.split(",") if tok.strip()]
            if not values:
                raise ValueError
    except ValueError:
        raise InvalidParameter(f"bad grid spec '{spec}'") from None
    for v in values:
        if not 0.0 <= v <= 1.0:
            raise InvalidParameter(f"grid value {v} outside [0, 1]")
    return values


def solve_mode(
    scenario: Scenario, mode: str, overrides: Overrides | None = None
) -> tuple[MetaSecurityGame, MetaPlaybook]:
    """Build the meta game and solve it under the requested mode."""
    if mode not in MODES:
        raise InvalidParameter(f"unknown mode '{mode}'")
    ov = overrides or Overrides()
    game = scenario.build_game(
        skill=ov.skill,
        gamma=ov.gamma,
        stay_penalty=ov.stay_penalty,
        explore_mode=ov.explore_mode,
        seed=ov.seed,
        p_discover=ov.p_discover,
    )
    fixed = scenario.fixed_defender_by_node(game) if mode == "fixed" else None
    concept = "stackelberg" if mode == "purple" else "spne"
    playbook = solve_playbook(
        game, concept=concept, eps=ov.eps, max_iter=ov.max_iter, fixed_defender=fixed
    )
    return game, playbook


def effective_v_max(scenario: Scenario, overrides: Overrides | None) -> float:
    if overrides is not None and overrides.v_max is not None:
        return float(overrides.v_max)
    return scenario.v_max


def _sweep_point(args) -> SweepRow:
    scenario, mode, skill, overrides = args
    ov = Overrides(**{**overrides.__dict__, "skill": skill})
    v_max = effective_v_max(scenario, ov)
    try:
        game, playbook = solve_mode(scenario, mode, ov)
    except MetapentError as e:
        return SweepRow(skill, mode, None, None, None, 0, False, error=type(e).__name__)
    entry = game.msp.graph.entry
    risk = risk_score(playbook.values, entry, v_max)
    return SweepRow(
        skill=skill,
        mode=mode,
        entry_risk=risk,
        entry_value=playbook.values[entry],
        accuracy=scenario.accuracy_for_risk(risk),
        iterations=playbook.iterations,
        converged=playbook.converged,
    )


def run_sweep(
    scenario: Scenario,
    grid: list[float],
    modes: list[str],
    overrides: Overrides | None = None,
    jobs: int = 1,
) -> list[SweepRow]:
    """One solve per (mode, skill), deterministic (mode, skill) row order."""
    for mode in modes:
        if mode not in MODES:
            raise InvalidParameter(f"unknown mode '{mode}'")
    ov = overrides or Overrides()
    points = [(scenario, mode, skill, ov) for mode in sorted(modes) for skill in grid]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_point, points))
    else:
        rows = [_sweep_point(p) for p in points]
    rows.sort(key=lambda r: (r.mode, r.skill))
    return rows


def format_number(x: float | None) -> str:
    return "" if x is None else f"{x + 0.0:.10g}"  # +0.0 folds -0.0 into 0.0


def rows_to_csv(rows: list[SweepRow]) -> str:
    """CSV per the sweep contract: LF endings, '.' decimal separator."""
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(
            ",".join(
                (
                    format_number(r.skill),
                    r.mode,
                    format_number(r.entry_risk),
                    format_number(r.entry_value),
                    format_number(r.accuracy),
                    str(r.iterations),
                    "true" if r.converged else "false",
                )
            )
        )
    return "\n".join(lines) + "\n"
