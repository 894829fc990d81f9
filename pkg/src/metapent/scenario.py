"""Scenario files: one JSON document describing a whole experiment.

A scenario bundles the topology, the movement-process parameters, named
tactic-tree templates, per-node knowledge libraries and initial property
sets, optional exploration scripts, the defender setup, and the curve
mapping entry risk to model accuracy. Parsing is strict: unknown fields
are rejected and every violation is reported with its field location.

The document layout (all strings UTF-8, any file extension):

    {
      "name": str,
      "description": str?,                       # optional
      "graph": {"nodes": [id], "edges": [[u, v]], "entry": id,
                 "importance": {id: num}?, "critical": [id]?,
                 "terminal": [id]?},
      "areas": {area: {"nodes": [id]?, "subnets": {name: [id]}?}}?,
      "msp": {"skill": num, "stay_penalty": num, "gamma": num?, "v_max": num?},
      "templates": {name: {"node": id, "tree": TREE}},
      "libraries": {id: {"universe": [pred],
                          "entries": [{"properties": [pred], "template": name}]}},
      "properties": {id: [pred]},
      "exploration": {id: [pred]}?,
      "defender": {"mode": "fixed"|"purple",
                    "profiles": {template: {decision-id: action}}?},
      "accuracy_curve": [[risk, accuracy], ...]
    }

    TREE = {"id": str, "owner": "attacker"|"defender"|"chance"|"leaf",
            "actions": [str]?, "dist": [num]?,      # dist iff owner=chance
            "children": {action: TREE}?,            # iff not leaf
            "outcome": id?}                         # iff leaf

Terminal nodes model absorbing critical assets: they must carry exactly
one out-edge, the self-loop, and their stay reward is zero.
"""

from __future__ import annotations

import bisect
import json
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Iterable

from .errors import InvalidParameter, ScenarioError
from .gametree import GameNode, MicroTacticGame, Role
from .knowledge import KnowledgeLibrary, PropertySet, build_meta_game, canonical_key
from .macromdp import MacroProcess
from .metasolver import MetaSecurityGame
from .netgraph import NetworkGraph

DEFENDER_MODES = ("fixed", "purple")
DEFAULT_GAMMA = 0.9


@dataclass(frozen=True)
class Violation:
    location: str
    message: str

    def __str__(self) -> str:
        return f"{self.location}: {self.message}"


@dataclass
class Area:
    """Named grouping of nodes, optionally split into subnets."""

    nodes: tuple[str, ...] = ()
    subnets: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def all_nodes(self) -> list[str]:
        out = list(self.nodes)
        for members in self.subnets.values():
            out.extend(members)
        return out


@dataclass
class Scenario:
    """Fully validated experiment description."""

    name: str
    graph: NetworkGraph
    msp: MacroProcess
    v_max: float
    templates: dict[str, MicroTacticGame]
    libraries: dict[str, KnowledgeLibrary]
    properties: dict[str, PropertySet]
    exploration: dict[str, tuple[str, ...]]
    defender_mode: str
    defender_profiles: dict[str, dict[str, str]]
    accuracy_curve: tuple[tuple[float, float], ...]
    areas: dict[str, Area] = field(default_factory=dict)
    description: str = ""

    def accuracy_for_risk(self, risk: float) -> float:
        """Piecewise-linear model accuracy at the given entry risk.

        The curve is clamped at its endpoints, so risks beyond the last
        point (including scores above 1) return the final accuracy.
        """
        if not self.accuracy_curve:
            raise InvalidParameter("empty accuracy curve")
        if risk < 0:
            raise InvalidParameter("risk must be nonnegative")
        xs = [r for r, _ in self.accuracy_curve]
        ys = [a for _, a in self.accuracy_curve]
        if risk <= xs[0]:
            return ys[0]
        if risk >= xs[-1]:
            return ys[-1]
        i = bisect.bisect_right(xs, risk)
        x0, x1 = xs[i - 1], xs[i]
        y0, y1 = ys[i - 1], ys[i]
        return y0 + (y1 - y0) * (risk - x0) / (x1 - x0)

    def macro(self, *, skill=None, gamma=None, stay_penalty=None) -> MacroProcess:
        """Movement process with optional parameter overrides."""
        m = self.msp
        if skill is not None:
            m = replace(m, skill=float(skill))
        if gamma is not None:
            m = replace(m, gamma=float(gamma))
        if stay_penalty is not None:
            m = replace(m, stay_penalty=float(stay_penalty))
        return m

    def build_game(
        self,
        *,
        skill=None,
        gamma=None,
        stay_penalty=None,
        explore_mode: str = "scripted",
        seed: int = 0,
        p_discover: float = 0.5,
    ) -> MetaSecurityGame:
        """Explore, adapt, and assemble the meta game for this scenario."""
        return build_meta_game(
            self.graph,
            self.libraries,
            self.properties,
            self.macro(skill=skill, gamma=gamma, stay_penalty=stay_penalty),
            scripts=self.exploration,
            mode=explore_mode,
            seed=seed,
            p_discover=p_discover,
        )

    def fixed_defender_by_node(self, game: MetaSecurityGame) -> dict[str, dict[str, str]]:
        """Scripted defender actions keyed by node, via each tree's template."""
        return {
            v: dict(self.defender_profiles.get(mtg.label, {}))
            for v, mtg in game.mtgs.items()
        }


# ---------------------------------------------------------------------------
# parsing


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.violations: list[Violation] = []

    def err(self, loc: str, msg: str) -> None:
        self.violations.append(Violation(loc, msg))

    def obj(self, value, loc, required=(), optional=()):
        if not isinstance(value, dict):
            self.err(loc, f"expected an object, got {type(value).__name__}")
            return None
        known = set(required) | set(optional)
        for key in sorted(value):
            if key not in known:
                self.err(f"{loc}.{key}", "unknown field")
        ok = True
        for key in required:
            if key not in value:
                self.err(loc, f"missing required field '{key}'")
                ok = False
        return value if ok else None

    def str_(self, value, loc):
        if not isinstance(value, str):
            self.err(loc, f"expected a string, got {type(value).__name__}")
            return None
        return value

    def num(self, value, loc):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.err(loc, f"expected a number, got {type(value).__name__}")
            return None
        return float(value)

    def str_list(self, value, loc):
        if not isinstance(value, list):
            self.err(loc, f"expected a list, got {type(value).__name__}")
            return None
        out = []
        for i, item in enumerate(value):
            s = self.str_(item, f"{loc}[{i}]")
            if s is None:
                return None
            out.append(s)
        return out


def _parse_graph(p: _Parser, value) -> tuple[NetworkGraph | None, tuple[str, ...]]:
    spec = p.obj(value, "graph", required=("nodes", "edges", "entry"),
                 optional=("importance", "critical", "terminal"))
    if spec is None:
        return None, ()
    nodes = p.str_list(spec["nodes"], "graph.nodes") or []
    if len(set(nodes)) != len(nodes):
        p.err("graph.nodes", "duplicate node ids")
    edges = []
    raw_edges = spec["edges"]
    if not isinstance(raw_edges, list):
        p.err("graph.edges", "expected a list")
        raw_edges = []
    for i, pair in enumerate(raw_edges):
        loc = f"graph.edges[{i}]"
        if not (isinstance(pair, list) and len(pair) == 2):
            p.err(loc, "expected a [source, target] pair")
            continue
        u = p.str_(pair[0], f"{loc}[0]")
        v = p.str_(pair[1], f"{loc}[1]")
        if u is not None and v is not None:
            edges.append((u, v))
    if len(set(edges)) != len(edges):
        p.err("graph.edges", "duplicate edges")
    entry = p.str_(spec["entry"], "graph.entry") or ""
    importance = {}
    for node, raw in sorted((spec.get("importance") or {}).items()):
        val = p.num(raw, f"graph.importance.{node}")
        if val is not None:
            importance[node] = val
    critical = p.str_list(spec.get("critical", []), "graph.critical") or []
    terminal = p.str_list(spec.get("terminal", []), "graph.terminal") or []
    graph = NetworkGraph.build(nodes, edges, entry, importance, critical)
    for problem in graph.validate():
        p.err("graph", problem)
    node_set = set(nodes)
    for t in terminal:
        if t not in node_set:
            p.err("graph.terminal", f"terminal marker on undeclared node '{t}'")
        elif {e for e in edges if e[0] == t} != {(t, t)}:
            p.err("graph.terminal", f"terminal node '{t}' must have exactly the self-loop out-edge")
    return graph, tuple(sorted(set(terminal)))


def _parse_areas(p: _Parser, value, graph: NetworkGraph | None) -> dict[str, Area]:
    if value is None:
        return {}
    if not isinstance(value, dict):
        p.err("areas", "expected an object")
        return {}
    areas: dict[str, Area] = {}
    for name in sorted(value):
        loc = f"areas.{name}"
        spec = p.obj(value[name], loc, optional=("nodes", "subnets"))
        if spec is None:
            continue
        nodes = tuple(p.str_list(spec.get("nodes", []), f"{loc}.nodes") or ())
        subnets: dict[str, tuple[str, ...]] = {}
        raw_subnets = spec.get("subnets", {})
        if not isinstance(raw_subnets, dict):
            p.err(f"{loc}.subnets", "expected an object")
            raw_subnets = {}
        for sub in sorted(raw_subnets):
            members = p.str_list(raw_subnets[sub], f"{loc}.subnets.{sub}") or []
            subnets[sub] = tuple(members)
        area = Area(nodes=nodes, subnets=subnets)
        if graph is not None:
            for n in area.all_nodes():
                if n not in graph.nodes:
                    p.err(loc, f"references undeclared node '{n}'")
        areas[name] = area
    return areas


_OWNERS = {r.value: r for r in Role}


def _parse_tree(p: _Parser, value, loc: str, seen_ids: set[str]) -> GameNode | None:
    spec = p.obj(value, loc, required=("id", "owner"),
                 optional=("actions", "dist", "children", "outcome"))
    if spec is None:
        return None
    hid = p.str_(spec["id"], f"{loc}.id")
    owner_name = p.str_(spec["owner"], f"{loc}.owner")
    if hid is None or owner_name is None:
        return None
    if hid in seen_ids:
        p.err(f"{loc}.id", f"duplicate history id '{hid}'")
    seen_ids.add(hid)
    role = _OWNERS.get(owner_name)
    if role is None:
        p.err(f"{loc}.owner", f"unknown owner '{owner_name}'")
        return None
    if role is Role.LEAF:
        for extra in ("actions", "dist", "children"):
            if extra in spec:
                p.err(f"{loc}.{extra}", "not allowed on a leaf")
        outcome = p.str_(spec.get("outcome"), f"{loc}.outcome")
        return GameNode(history_id=hid, role=role, outcome=outcome)
    if "outcome" in spec:
        p.err(f"{loc}.outcome", "only allowed on a leaf")
    actions = tuple(p.str_list(spec.get("actions", []), f"{loc}.actions") or ())
    if not actions:
        p.err(f"{loc}.actions", "an internal node needs at least one action")
        return None
    children_spec = spec.get("children")
    if not isinstance(children_spec, dict):
        p.err(f"{loc}.children", "expected an object keyed by action")
        return None
    if set(children_spec) != set(actions):
        p.err(f"{loc}.children", "children keys must match the action list")
        return None
    chance = None
    if role is Role.CHANCE:
        raw = spec.get("dist")
        if not isinstance(raw, list) or len(raw) != len(actions):
            p.err(f"{loc}.dist", "chance node needs one probability per action")
            return None
        probs = [p.num(x, f"{loc}.dist[{i}]") for i, x in enumerate(raw)]
        if any(x is None for x in probs):
            return None
        chance = tuple(probs)
    elif "dist" in spec:
        p.err(f"{loc}.dist", "only allowed on a chance node")
    children = {}
    for action in actions:
        child = _parse_tree(p, children_spec[action], f"{loc}.children.{action}", seen_ids)
        if child is None:
            return None
        children[action] = child
    return GameNode(history_id=hid, role=role, actions=actions, children=children, chance=chance)


def _parse_templates(p: _Parser, value, graph: NetworkGraph | None) -> dict[str, MicroTacticGame]:
    if not isinstance(value, dict):
        p.err("templates", "expected an object")
        return {}
    templates: dict[str, MicroTacticGame] = {}
    for name in sorted(value):
        loc = f"templates.{name}"
        spec = p.obj(value[name], loc, required=("node", "tree"))
        if spec is None:
            continue
        node = p.str_(spec["node"], f"{loc}.node")
        if node is None:
            continue
        if graph is not None and node not in graph.nodes:
            p.err(f"{loc}.node", f"undeclared node '{node}'")
            continue
        root = _parse_tree(p, spec["tree"], f"{loc}.tree", set())
        if root is None:
            continue
        game = MicroTacticGame(node=node, root=root, label=name)
        for problem in game.validate(graph):
            p.err(f"{loc}.tree", problem)
        if graph is not None and game.outcomes() != set(graph.targets(node)):
            p.err(
                f"{loc}.tree",
                f"outcomes {sorted(game.outcomes())} must equal the out-edge targets "
                f"{sorted(set(graph.targets(node)))} of '{node}'",
            )
        templates[name] = game
    return templates


def _parse_libraries(
    p: _Parser, value, graph: NetworkGraph | None, templates: dict[str, MicroTacticGame]
) -> dict[str, KnowledgeLibrary]:
    if not isinstance(value, dict):
        p.err("libraries", "expected an object")
        return {}
    libraries: dict[str, KnowledgeLibrary] = {}
    for node in sorted(value):
        loc = f"libraries.{node}"
        if graph is not None and node not in graph.nodes:
            p.err(loc, f"library for undeclared node '{node}'")
            continue
        spec = p.obj(value[node], loc, required=("universe", "entries"))
        if spec is None:
            continue
        universe = p.str_list(spec["universe"], f"{loc}.universe")
        if universe is None:
            continue
        if len(set(universe)) != len(universe):
            p.err(f"{loc}.universe", "duplicate predicates")
        raw_entries = spec["entries"]
        if not isinstance(raw_entries, list):
            p.err(f"{loc}.entries", "expected a list")
            continue
        entries: dict[frozenset[str], MicroTacticGame] = {}
        for i, raw in enumerate(raw_entries):
            eloc = f"{loc}.entries[{i}]"
            espec = p.obj(raw, eloc, required=("properties", "template"))
            if espec is None:
                continue
            predicates = p.str_list(espec["properties"], f"{eloc}.properties")
            tname = p.str_(espec["template"], f"{eloc}.template")
            if predicates is None or tname is None:
                continue
            extra = set(predicates) - set(universe)
            if extra:
                p.err(f"{eloc}.properties", f"predicates outside the universe: {sorted(extra)}")
            template = templates.get(tname)
            if template is None:
                p.err(f"{eloc}.template", f"unknown template '{tname}'")
                continue
            if template.node != node:
                p.err(f"{eloc}.template", f"template '{tname}' is bound to node '{template.node}'")
                continue
            key = frozenset(predicates)
            if key in entries:
                p.err(eloc, f"duplicate canonical key {list(canonical_key(key))}")
                continue
            entries[key] = template
        libraries[node] = KnowledgeLibrary(node=node, universe=frozenset(universe), entries=entries)
    if graph is not None:
        for node in graph.sorted_nodes():
            if node not in libraries:
                p.err("libraries", f"no knowledge library for node '{node}'")
    return libraries


def _parse_properties(
    p: _Parser, value, loc: str, graph: NetworkGraph | None,
    libraries: dict[str, KnowledgeLibrary], require_all: bool,
) -> dict[str, list[str]]:
    if value is None:
        return {}
    if not isinstance(value, dict):
        p.err(loc, "expected an object")
        return {}
    out: dict[str, list[str]] = {}
    for node in sorted(value):
        nloc = f"{loc}.{node}"
        if graph is not None and node not in graph.nodes:
            p.err(nloc, f"undeclared node '{node}'")
            continue
        predicates = p.str_list(value[node], nloc)
        if predicates is None:
            continue
        lib = libraries.get(node)
        if lib is not None:
            extra = set(predicates) - set(lib.universe)
            if extra:
                p.err(nloc, f"predicates outside the universe: {sorted(extra)}")
        out[node] = predicates
    if require_all and graph is not None:
        for node in graph.sorted_nodes():
            if node not in out:
                p.err(loc, f"no property set for node '{node}'")
    return out


def _parse_defender(
    p: _Parser, value, templates: dict[str, MicroTacticGame]
) -> tuple[str, dict[str, dict[str, str]]]:
    spec = p.obj(value, "defender", required=("mode",), optional=("profiles",))
    if spec is None:
        return "fixed", {}
    mode = p.str_(spec["mode"], "defender.mode") or "fixed"
    if mode not in DEFENDER_MODES:
        p.err("defender.mode", f"must be one of {list(DEFENDER_MODES)}")
    profiles: dict[str, dict[str, str]] = {}
    raw_profiles = spec.get("profiles", {})
    if not isinstance(raw_profiles, dict):
        p.err("defender.profiles", "expected an object")
        raw_profiles = {}
    for tname in sorted(raw_profiles):
        loc = f"defender.profiles.{tname}"
        template = templates.get(tname)
        if template is None:
            p.err(loc, f"unknown template '{tname}'")
            continue
        raw = raw_profiles[tname]
        if not isinstance(raw, dict):
            p.err(loc, "expected an object mapping decision ids to actions")
            continue
        nodes_by_id = {n.history_id: n for n in template.decision_nodes(Role.DEFENDER)}
        profile: dict[str, str] = {}
        for hid in sorted(raw):
            action = p.str_(raw[hid], f"{loc}.{hid}")
            node = nodes_by_id.get(hid)
            if node is None:
                p.err(f"{loc}.{hid}", "not a defender decision node of this template")
                continue
            if action is not None and action not in node.actions:
                p.err(f"{loc}.{hid}", f"'{action}' is not an action at this node")
                continue
            if action is not None:
                profile[hid] = action
        profiles[tname] = profile
    if mode == "fixed":
        for tname in sorted(templates):
            missing = [
                n.history_id
                for n in templates[tname].decision_nodes(Role.DEFENDER)
                if n.history_id not in profiles.get(tname, {})
            ]
            if missing:
                p.err(
                    "defender.profiles",
                    f"fixed mode needs actions for {missing} of template '{tname}'",
                )
    return mode, profiles


def _parse_accuracy_curve(p: _Parser, value) -> tuple[tuple[float, float], ...]:
    if not isinstance(value, list) or not value:
        p.err("accuracy_curve", "expected a nonempty list of [risk, accuracy] pairs")
        return ()
    points = []
    for i, pair in enumerate(value):
        loc = f"accuracy_curve[{i}]"
        if not (isinstance(pair, list) and len(pair) == 2):
            p.err(loc, "expected a [risk, accuracy] pair")
            continue
        r = p.num(pair[0], f"{loc}[0]")
        a = p.num(pair[1], f"{loc}[1]")
        if r is None or a is None:
            continue
        if not 0.0 <= r <= 1.0:
            p.err(f"{loc}[0]", f"risk {r} outside [0, 1]")
        points.append((r, a))
    for (r0, a0), (r1, a1) in zip(points, points[1:]):
        if r1 <= r0:
            p.err("accuracy_curve", "risk keys must be strictly increasing")
            break
        if a1 > a0:
            p.err("accuracy_curve", "accuracy must be monotone nonincreasing in risk")
            break
    return tuple(points)


def parse_scenario(text: str, source: str = "<scenario>") -> Scenario:
    """Parse and validate a scenario document.

    Raises ``ScenarioError`` carrying every violation (with field
    locations, or line/column for JSON syntax errors).
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError([Violation(f"{source}:{e.lineno}:{e.colno}", f"invalid JSON: {e.msg}")])
    p = _Parser(source)
    spec = p.obj(
        doc, "scenario",
        required=("name", "graph", "msp", "templates", "libraries", "properties",
                  "defender", "accuracy_curve"),
        optional=("description", "areas", "exploration"),
    )
    if spec is None:
        raise ScenarioError(p.violations)

    name = p.str_(spec["name"], "name") or ""
    description = p.str_(spec.get("description", ""), "description") or ""
    graph, terminal = _parse_graph(p, spec["graph"])
    areas = _parse_areas(p, spec.get("areas"), graph)

    msp_spec = p.obj(spec["msp"], "msp", required=("skill", "stay_penalty"),
                     optional=("gamma", "v_max"))
    skill = stay_penalty = gamma = v_max = None
    if msp_spec is not None:
        skill = p.num(msp_spec["skill"], "msp.skill")
        stay_penalty = p.num(msp_spec["stay_penalty"], "msp.stay_penalty")
        gamma = p.num(msp_spec.get("gamma", DEFAULT_GAMMA), "msp.gamma")
        if "v_max" in msp_spec:
            v_max = p.num(msp_spec["v_max"], "msp.v_max")

    templates = _parse_templates(p, spec["templates"], graph)
    libraries = _parse_libraries(p, spec["libraries"], graph, templates)
    raw_props = _parse_properties(p, spec["properties"], "properties", graph, libraries, True)
    raw_scripts = _parse_properties(p, spec.get("exploration"), "exploration", graph, libraries, False)
    defender_mode, defender_profiles = _parse_defender(p, spec["defender"], templates)
    accuracy_curve = _parse_accuracy_curve(p, spec["accuracy_curve"])

    msp = None
    if graph is not None and skill is not None and stay_penalty is not None and gamma is not None:
        msp = MacroProcess(
            graph=graph,
            skill=skill,
            stay_penalty=stay_penalty,
            gamma=gamma,
            terminal=frozenset(terminal),
        )
        for problem in msp.validate():
            p.err("msp", problem)
        if v_max is None:
            v_max = max(graph.importance.values(), default=0.0)
        if not v_max > 0:
            p.err("msp.v_max", "v_max must be positive (set it or give some node importance)")

    if p.violations:
        raise ScenarioError(p.violations)
    return Scenario(
        name=name,
        description=description,
        graph=graph,
        msp=msp,
        v_max=float(v_max),
        templates=templates,
        libraries=libraries,
        properties={n: PropertySet.of(n, preds) for n, preds in raw_props.items()},
        exploration={n: tuple(script) for n, script in raw_scripts.items()},
        defender_mode=defender_mode,
        defender_profiles=defender_profiles,
        accuracy_curve=accuracy_curve,
        areas=areas,
    )


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    return parse_scenario(path.read_text(encoding="utf-8"), source=str(path))


def scenario_violations(text: str, source: str = "<scenario>") -> list[Violation]:
    """Validation-only entry point: every violation, or an empty list."""
    try:
        parse_scenario(text, source)
    except ScenarioError as e:
        return list(e.violations)
    return []


# ---------------------------------------------------------------------------
# serialization


def _tree_doc(node: GameNode) -> dict:
    doc: dict = {"id": node.history_id, "owner": node.role.value}
    if node.is_leaf():
        doc["outcome"] = node.outcome
        return doc
    doc["actions"] = list(node.actions)
    if node.chance is not None:
        doc["dist"] = list(node.chance)
    doc["children"] = {a: _tree_doc(node.children[a]) for a in node.actions}
    return doc


def serialize_scenario(s: Scenario) -> str:
    """Canonical JSON text: sorted sections, stable float repr, LF endings."""
    doc: dict = {"name": s.name}
    if s.description:
        doc["description"] = s.description
    graph_doc: dict = {
        "nodes": s.graph.sorted_nodes(),
        "edges": [list(e) for e in sorted(s.graph.edges)],
        "entry": s.graph.entry,
    }
    if s.graph.importance:
        graph_doc["importance"] = {k: s.graph.importance[k] for k in sorted(s.graph.importance)}
    if s.graph.critical:
        graph_doc["critical"] = sorted(s.graph.critical)
    if s.msp.terminal:
        graph_doc["terminal"] = sorted(s.msp.terminal)
    doc["graph"] = graph_doc
    if s.areas:
        areas_doc = {}
        for name in sorted(s.areas):
            area = s.areas[name]
            entry: dict = {}
            if area.nodes:
                entry["nodes"] = list(area.nodes)
            if area.subnets:
                entry["subnets"] = {k: list(v) for k, v in sorted(area.subnets.items())}
            areas_doc[name] = entry
        doc["areas"] = areas_doc
    doc["msp"] = {
        "skill": s.msp.skill,
        "stay_penalty": s.msp.stay_penalty,
        "gamma": s.msp.gamma,
        "v_max": s.v_max,
    }
    doc["templates"] = {
        name: {"node": t.node, "tree": _tree_doc(t.root)}
        for name, t in sorted(s.templates.items())
    }
    doc["libraries"] = {
        node: {
            "universe": sorted(lib.universe),
            "entries": [
                {"properties": list(canonical_key(key)), "template": lib.entries[key].label}
                for key in sorted(lib.entries, key=canonical_key)
            ],
        }
        for node, lib in sorted(s.libraries.items())
    }
    doc["properties"] = {
        node: sorted(props.predicates) for node, props in sorted(s.properties.items())
    }
    if s.exploration:
        doc["exploration"] = {node: list(script) for node, script in sorted(s.exploration.items())}
    defender_doc: dict = {"mode": s.defender_mode}
    if s.defender_profiles:
        defender_doc["profiles"] = {
            tname: {hid: act for hid, act in sorted(profile.items())}
            for tname, profile in sorted(s.defender_profiles.items())
        }
    doc["defender"] = defender_doc
    doc["accuracy_curve"] = [[r, a] for r, a in s.accuracy_curve]
    return json.dumps(doc, indent=2) + "\n"


# ---------------------------------------------------------------------------
# bundled data


def bundled_dir() -> Path:
    return Path(resources.files("metapent").joinpath("data"))


def bundled_scenario_path(name: str) -> Path:
    """Resolve a bundled scenario by bare name or file name."""
    base = bundled_dir()
    candidate = base / name
    if candidate.is_file():
        return candidate
    candidate = base / f"{name}.json"
    if candidate.is_file():
        return candidate
    raise FileNotFoundError(f"no bundled scenario named '{name}'")


def load_bundled(name: str) -> Scenario:
    return load_scenario(bundled_scenario_path(name))


# ---------------------------------------------------------------------------
# built-in impact trees


def _leaf(hid: str, outcome: str) -> GameNode:
    return GameNode(history_id=hid, role=Role.LEAF, outcome=outcome)


def _decision(hid: str, role: Role, children: dict[str, GameNode]) -> GameNode:
    return GameNode(
        history_id=hid, role=role, actions=tuple(children), children=dict(children)
    )


def _chance(hid: str, children: dict[str, GameNode], dist: Iterable[float]) -> GameNode:
    return GameNode(
        history_id=hid, role=Role.CHANCE, actions=tuple(children),
        children=dict(children), chance=tuple(dist),
    )


def builtin_impact_templates(node: str = "ai-center") -> dict[str, MicroTacticGame]:
    """The three terminal-asset tactic trees, with placeholder chance values.

    Roles and branch structure are fixed; scenario files override the
    uniform chance placeholders (and the joint solver supplies the leaf
    utilities), so these are shapes, not calibrated models.
    """
    erode = _decision("tactic-choice", Role.ATTACKER, {
        "alter-model-directly": _decision("integrity-response", Role.DEFENDER, {
            "integrity-check": _chance("alter-roll", {
                "reverted": _leaf("z-reverted", node),
                "persists": _leaf("z-altered", node),
            }, (0.5, 0.5)),
            "no-check": _leaf("z-altered-clean", node),
        }),
        "poison-training-data": _chance("poison-roll", {
            "filtered": _leaf("z-filtered", node),
            "corrupts": _leaf("z-poisoned", node),
        }, (0.5, 0.5)),
    })
    evade = _decision("tactic-choice", Role.ATTACKER, {
        "craft-adversarial-data": _decision("inference-response", Role.DEFENDER, {
            "adversarial-training": _chance("evade-roll", {
                "rejected": _leaf("z-rejected", node),
                "misclassified": _leaf("z-evaded", node),
            }, (0.5, 0.5)),
            "no-defense": _leaf("z-evaded-clean", node),
        }),
        "abort": _leaf("z-abort", node),
    })
    denial = _decision("tactic-choice", Role.ATTACKER, {
        "flood-requests": _decision("service-response", Role.DEFENDER, {
            "rate-limit": _chance("flood-roll", {
                "absorbed": _leaf("z-absorbed", node),
                "degraded": _leaf("z-degraded", node),
            }, (0.5, 0.5)),
            "no-limit": _leaf("z-service-down", node),
        }),
        "abort": _leaf("z-abort", node),
    })
    return {
        "erode-integrity": MicroTacticGame(node=node, root=erode, label="erode-integrity"),
        "evade-ml": MicroTacticGame(node=node, root=evade, label="evade-ml"),
        "denial-of-ml-service": MicroTacticGame(node=node, root=denial, label="denial-of-ml-service"),
    }
