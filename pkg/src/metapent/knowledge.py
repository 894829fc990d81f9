"""Symbolic node descriptions and the library that turns them into trees.

Each node carries a set of unary predicates drawn from a declared
universe ("is-windows", "can-bypassD", ...). A knowledge library keys a
tactic-tree template by the full predicate set it describes: an entry
matches exactly when every predicate in the set holds and every other
predicate of the universe is absent, which for conjunctions of literals
is plain set equality. Lookups that match nothing raise, loudly, because
a gap in the library is a modeling problem and not something to paper
over with a default.

Exploration is simulated: either a scripted list of discoveries or a
seeded stochastic process that keeps drawing undiscovered predicates
until a round comes up empty.
"""

from __future__ import annotations

import copy
import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import InvalidParameter, LibraryGap, MetapentError, UnknownPredicate
from .gametree import MicroTacticGame
from .macromdp import MacroProcess
from .metasolver import MetaSecurityGame
from .netgraph import NetworkGraph


@dataclass(frozen=True)
class Property:
    """One unary predicate applied to a node."""

    predicate: str
    subject: str


@dataclass(frozen=True)
class PropertySet:
    """Everything currently known (or assumed) about one node."""

    node: str
    predicates: frozenset[str] = frozenset()

    @classmethod
    def of(cls, node: str, predicates: Iterable[str] = ()) -> "PropertySet":
        return cls(node, frozenset(predicates))


def canonical_key(predicates: Iterable[str]) -> tuple[str, ...]:
    """Sorted-tuple form used to detect duplicate library entries."""
    return tuple(sorted(set(predicates)))


@dataclass
class KnowledgeLibrary:
    """Tactic-tree templates for one node, keyed by full property sets."""

    node: str
    universe: frozenset[str]
    entries: dict[frozenset[str], MicroTacticGame] = field(default_factory=dict)

    @classmethod
    def build(
        cls,
        node: str,
        universe: Iterable[str],
        entries: Iterable[tuple[Iterable[str], MicroTacticGame]],
    ) -> "KnowledgeLibrary":
        uni = frozenset(universe)
        table: dict[frozenset[str], MicroTacticGame] = {}
        for predicates, template in entries:
            key = frozenset(predicates)
            if key in table:
                raise MetapentError(
                    f"duplicate canonical key {canonical_key(key)} in library for '{node}'"
                )
            table[key] = template
        lib = cls(node=node, universe=uni, entries=table)
        problems = lib.validate()
        if problems:
            raise MetapentError("; ".join(problems))
        return lib

    def validate(self) -> list[str]:
        problems = []
        for key in sorted(self.entries, key=canonical_key):
            extra = key - self.universe
            if extra:
                problems.append(
                    f"library for '{self.node}': entry {canonical_key(key)} uses "
                    f"predicates outside the universe: {sorted(extra)}"
                )
            if self.entries[key].node != self.node:
                problems.append(
                    f"library for '{self.node}': entry {canonical_key(key)} references a "
                    f"template bound to '{self.entries[key].node}'"
                )
        return problems

    def adapt(self, props: PropertySet) -> MicroTacticGame:
        """Template whose key set-equals the property set, instantiated fresh.

        Set equality is the whole matching rule: the positives must all
        hold and everything else in the universe must be absent.
        """
        unknown = props.predicates - self.universe
        if unknown:
            raise UnknownPredicate(
                f"predicates {sorted(unknown)} are outside the universe of '{self.node}'"
            )
        template = self.entries.get(frozenset(props.predicates))
        if template is None:
            raise LibraryGap(self.node, props.predicates)
        return copy.deepcopy(template)


def explore_node(
    props: PropertySet,
    universe: Iterable[str],
    script: Iterable[str] = (),
    *,
    mode: str = "scripted",
    seed: int | str = 0,
    p_discover: float = 0.5,
) -> PropertySet:
    """Grow a property set by simulated discovery.

    Scripted mode adds each listed predicate that is not already known.
    Stochastic mode repeatedly discovers one random unknown predicate
    with probability ``p_discover`` per round and stops on the first
    empty round; the same seed always yields the same set.
    """
    uni = frozenset(universe)
    unknown = props.predicates - uni
    if unknown:
        raise UnknownPredicate(f"initial predicates {sorted(unknown)} are outside the universe")
    found = set(props.predicates)
    if mode == "scripted":
        for predicate in script:
            if predicate not in uni:
                raise UnknownPredicate(f"scripted predicate '{predicate}' is outside the universe")
            found.add(predicate)
    elif mode == "stochastic":
        if not 0.0 <= p_discover <= 1.0:
            raise InvalidParameter(f"p_discover {p_discover} outside [0, 1]")
        rng = random.Random(seed)
        while True:
            remaining = sorted(uni - found)
            if not remaining:
                break
            if rng.random() >= p_discover:
                break
            found.add(rng.choice(remaining))
    else:
        raise InvalidParameter(f"unknown exploration mode '{mode}'")
    return PropertySet(props.node, frozenset(found))


def build_meta_game(
    graph: NetworkGraph,
    libraries: Mapping[str, KnowledgeLibrary],
    properties: Mapping[str, PropertySet],
    msp: MacroProcess,
    scripts: Mapping[str, Iterable[str]] | None = None,
    *,
    mode: str = "scripted",
    seed: int = 0,
    p_discover: float = 0.5,
) -> MetaSecurityGame:
    """Explore every node, adapt its tree, and assemble the joint game.

    Per node: run the exploration step (script if present, or the seeded
    stochastic process), then look the grown property set up in that
    node's library. Library misses propagate as gaps naming the node.
    """
    mtgs: dict[str, MicroTacticGame] = {}
    for v in graph.sorted_nodes():
        lib = libraries.get(v)
        if lib is None:
            raise LibraryGap(v)
        props = properties.get(v, PropertySet(v))
        if mode == "stochastic":
            props = explore_node(
                props, lib.universe, mode="stochastic",
                seed=f"{seed}:{v}", p_discover=p_discover,
            )
        else:
            script = tuple((scripts or {}).get(v, ()))
            props = explore_node(props, lib.universe, script)
        mtgs[v] = lib.adapt(props)
    game = MetaSecurityGame(mtgs=mtgs, msp=msp)
    problems = game.validate()
    if problems:
        raise MetapentError("assembled meta game is invalid: " + "; ".join(problems))
    return game
