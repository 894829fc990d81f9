"""Directed network topology shared by every other layer.

Nodes are opaque string ids, edges are ordered pairs, and self-loops are
legal (they stand for continued activity on the same host). Edge listing
is lexicographic by target so downstream tie-breaking stays reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import UnknownNode


@dataclass(frozen=True)
class NetworkGraph:
    """Target topology: hosts, directed connections, entry foothold."""

    nodes: frozenset[str]
    edges: frozenset[tuple[str, str]]
    entry: str
    importance: dict[str, float] = field(default_factory=dict)
    critical: frozenset[str] = frozenset()

    @classmethod
    def build(
        cls,
        nodes: Iterable[str],
        edges: Iterable[tuple[str, str]],
        entry: str,
        importance: Mapping[str, float] | None = None,
        critical: Iterable[str] = (),
    ) -> "NetworkGraph":
        return cls(
            nodes=frozenset(nodes),
            edges=frozenset((u, v) for u, v in edges),
            entry=entry,
            importance={k: float(v) for k, v in (importance or {}).items()},
            critical=frozenset(critical),
        )

    def sorted_nodes(self) -> list[str]:
        return sorted(self.nodes)

    def importance_of(self, v: str) -> float:
        return float(self.importance.get(v, 0.0))

    def out_edges(self, v: str) -> list[tuple[str, str]]:
        """Outgoing edges of ``v``, ordered lexicographically by target."""
        if v not in self.nodes:
            raise UnknownNode(f"unknown node '{v}'")
        return sorted((u, w) for (u, w) in self.edges if u == v)

    def targets(self, v: str) -> list[str]:
        """Move destinations reachable from ``v`` (self included if looped)."""
        return [w for _, w in self.out_edges(v)]

    def validate(self) -> list[str]:
        """Return every invariant violation; an empty list means the graph is ok."""
        problems: list[str] = []
        for n in sorted(self.nodes):
            if not n:
                problems.append("empty node id")
        if self.entry not in self.nodes:
            problems.append(f"entry '{self.entry}' is not a declared node")
        for u, v in sorted(self.edges):
            if u not in self.nodes:
                problems.append(f"dangling edge ({u}, {v}): unknown source '{u}'")
            if v not in self.nodes:
                problems.append(f"dangling edge ({u}, {v}): unknown target '{v}'")
        for c in sorted(self.critical):
            if c not in self.nodes:
                problems.append(f"critical marker on undeclared node '{c}'")
        for n in sorted(self.importance):
            if n not in self.nodes:
                problems.append(f"importance for undeclared node '{n}'")
            elif self.importance[n] < 0:
                problems.append(f"negative importance for node '{n}'")
        return problems
