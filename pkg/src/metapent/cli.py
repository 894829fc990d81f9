"""Command line front end: validate | solve | sweep | export-tree.

Exit codes: 0 success, 1 usage or I/O, 2 validation failure,
3 non-convergence, 4 knowledge-library gap. All output is deterministic
for a given scenario, flag set, and seed.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

from .errors import LibraryGap, MetapentError, ScenarioError
from .gametree import to_dot
from .knowledge import PropertySet, explore_node
from .metasolver import render_playbook, risk_table
from .scenario import Scenario, bundled_scenario_path, load_scenario, serialize_scenario
from .sweep import (
    DEFAULT_GRID_SPEC,
    MODES,
    Overrides,
    effective_v_max,
    format_number,
    parse_grid,
    rows_to_csv,
    run_sweep,
    solve_mode,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_NONCONVERGENCE = 3
EXIT_LIBRARY_GAP = 4

SCENARIO_DIR_ENV = "METAPENT_SCENARIO_DIR"


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; the contract says 1
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def resolve_scenario_path(arg: str) -> Path:
    """Literal path first, then $METAPENT_SCENARIO_DIR, then bundled data."""
    path = Path(arg)
    if path.is_file():
        return path
    env_dir = os.environ.get(SCENARIO_DIR_ENV)
    if env_dir:
        for candidate in (Path(env_dir) / arg, Path(env_dir) / f"{arg}.json"):
            if candidate.is_file():
                return candidate
    try:
        return bundled_scenario_path(arg)
    except FileNotFoundError:
        raise FileNotFoundError(f"scenario '{arg}' not found") from None


def _load(arg: str) -> Scenario:
    return load_scenario(resolve_scenario_path(arg))


def _add_override_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--skill", type=float, default=None, help="attacker skill override")
    sub.add_argument("--gamma", type=float, default=None, help="discount factor override")
    sub.add_argument("--stay-penalty", type=float, default=None, help="stay penalty override")
    sub.add_argument("--v-max", type=float, default=None, help="risk normalizer override")
    sub.add_argument("--eps", type=float, default=1e-6, help="convergence threshold")
    sub.add_argument("--max-iter", type=int, default=500, help="iteration cap")
    sub.add_argument("--explore", choices=("scripted", "stochastic"), default="scripted",
                     help="exploration mode for property discovery")
    sub.add_argument("--p-discover", type=float, default=0.5,
                     help="per-round discovery probability (stochastic exploration)")
    sub.add_argument("--seed", type=int, default=0, help="seed for stochastic exploration")


def _overrides(args, skill=None) -> Overrides:
    return Overrides(
        skill=skill if skill is not None else args.skill,
        gamma=args.gamma,
        stay_penalty=args.stay_penalty,
        v_max=args.v_max,
        eps=args.eps,
        max_iter=args.max_iter,
        explore_mode=args.explore,
        seed=args.seed,
        p_discover=args.p_discover,
    )


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def cmd_validate(args) -> int:
    path = resolve_scenario_path(args.scenario)
    try:
        scenario = load_scenario(path)
    except ScenarioError as e:
        for violation in e.violations:
            print(violation)
        return EXIT_VALIDATION
    print(
        f"ok: {scenario.name} "
        f"({len(scenario.graph.nodes)} nodes, {len(scenario.graph.edges)} edges, "
        f"{len(scenario.templates)} templates)"
    )
    if args.echo:
        sys.stdout.write(serialize_scenario(scenario))
    return EXIT_OK


def cmd_solve(args) -> int:
    scenario = _load(args.scenario)
    mode = args.mode or scenario.defender_mode
    overrides = _overrides(args)
    game, playbook = solve_mode(scenario, mode, overrides)
    v_max = effective_v_max(scenario, overrides)
    entry = game.msp.graph.entry
    header = {
        "scenario": scenario.name,
        "mode": mode,
        "skill": format_number(game.msp.skill),
        "gamma": format_number(game.msp.gamma),
        "stay_penalty": format_number(game.msp.stay_penalty),
        "v_max": format_number(v_max),
    }
    report = render_playbook(game, playbook, v_max, header)
    if args.out is None:
        sys.stdout.write(report)
    else:
        _write(args.out, report)
        risks = risk_table(playbook.values, v_max)
        print(f"entry {entry}: risk {format_number(risks[entry])}")
        for node in sorted(risks):
            print(f"{node},{format_number(risks[node])}")
    if args.figures:
        from .figures import render_risk_figure

        path = render_risk_figure(risk_table(playbook.values, v_max), args.figures)
        print(f"figure: {path}", file=sys.stderr)
    return EXIT_OK if playbook.converged else EXIT_NONCONVERGENCE


def cmd_sweep(args) -> int:
    scenario = _load(args.scenario)
    grid = parse_grid(args.grid)
    modes = [m.strip() for m in args.modes.split(",") if m.strip()]
    overrides = _overrides(args)
    rows = run_sweep(scenario, grid, modes, overrides, jobs=args.jobs)
    csv_text = rows_to_csv(rows)
    _write(args.out, csv_text)
    if args.figures:
        from .figures import render_sweep_figures

        for path in render_sweep_figures(rows, args.figures):
            print(f"figure: {path}", file=sys.stderr)
    errors = sorted({r.error for r in rows if r.error})
    for row in rows:
        if row.error:
            print(f"warning: skill {format_number(row.skill)} mode {row.mode}: {row.error}",
                  file=sys.stderr)
    if "LibraryGap" in errors:
        return EXIT_LIBRARY_GAP
    if errors:
        return EXIT_VALIDATION
    if any(not r.converged for r in rows):
        return EXIT_NONCONVERGENCE
    return EXIT_OK


def cmd_export_tree(args) -> int:
    scenario = _load(args.scenario)
    node = args.node
    if node not in scenario.graph.nodes:
        raise MetapentError(f"unknown node '{node}'")
    properties = dict(scenario.properties)
    if args.props is not None:
        predicates = [p.strip() for p in args.props.split(",") if p.strip()]
        lib = scenario.libraries[node]
        properties[node] = explore_node(PropertySet(node), lib.universe, predicates)
    scenario_props = replace(scenario, properties=properties)
    mode = args.mode or scenario.defender_mode
    overrides = _overrides(args)
    game, playbook = solve_mode(scenario_props, mode, overrides)
    dot = to_dot(game.mtgs[node], playbook.profiles[node],
                 title=f"{node}: {game.mtgs[node].label}")
    _write(args.out, dot)
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="metapent",
                     description="Meta-game penetration playbook solver and simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse and validate a scenario file")
    p.add_argument("scenario")
    p.add_argument("--echo", action="store_true", help="print the canonical serialization")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("solve", help="solve one playbook and export it")
    p.add_argument("scenario")
    p.add_argument("--mode", choices=MODES, default=None,
                   help="defender setup (default: the scenario's)")
    _add_override_flags(p)
    p.add_argument("-o", "--out", default=None, help="write the playbook export here")
    p.add_argument("--figures", default=None, metavar="DIR", help="render figures into DIR")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="solve across a skill grid, emit CSV")
    p.add_argument("scenario")
    p.add_argument("--grid", default=DEFAULT_GRID_SPEC, help="start:stop:step or comma list")
    p.add_argument("--modes", default="fixed,purple", help="comma list of modes")
    _add_override_flags(p)
    p.add_argument("--jobs", type=int, default=1, help="parallel workers")
    p.add_argument("-o", "--out", default=None, help="write CSV here (default stdout)")
    p.add_argument("--figures", default=None, metavar="DIR", help="render figures into DIR")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("export-tree", help="solve and export one node's tree as dot")
    p.add_argument("scenario")
    p.add_argument("--node", required=True)
    p.add_argument("--props", default=None,
                   help="comma list of predicates overriding the node's property set")
    p.add_argument("--mode", choices=MODES, default=None)
    _add_override_flags(p)
    p.add_argument("-o", "--out", default=None, help="write dot text here (default stdout)")
    p.set_defaults(func=cmd_export_tree)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except ScenarioError as e:
        for violation in e.violations:
            print(violation, file=sys.stderr)
        return EXIT_VALIDATION
    except LibraryGap as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_LIBRARY_GAP
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except MetapentError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
