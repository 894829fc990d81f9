"""Exception types shared across the package."""

from __future__ import annotations


class MetapentError(Exception):
    """Base class for every error this package raises on purpose."""


class UnknownNode(MetapentError):
    """A node id that is not declared in the graph (or value table)."""


class InvalidAction(MetapentError):
    """An edge/action that is not available in the given state or tree node."""


class InvalidPolicy(MetapentError):
    """A movement policy whose support or normalization is broken."""


class InvalidParameter(MetapentError):
    """A numeric parameter outside its documented range."""


class UtilityUnset(MetapentError):
    """A tactic tree was solved before its leaf utilities were populated."""


class IncompleteProfile(MetapentError):
    """A plan profile is missing an entry for some decision node."""


class UnknownPredicate(MetapentError):
    """A property predicate outside the node's declared universe."""


class LibraryGap(MetapentError):
    """No knowledge-library entry matches a property set.

    Gaps are surfaced, never papered over with a fallback template; the
    unmatched set is kept on the exception so callers can report it.
    """

    def __init__(self, node: str, properties=None, message: str | None = None):
        self.node = node
        self.properties = frozenset(properties) if properties is not None else None
        if message is None:
            if self.properties is None:
                message = f"no knowledge library for node '{node}'"
            else:
                shown = "{" + ", ".join(sorted(self.properties)) + "}"
                message = f"no library entry for node '{node}' matching {shown}"
        super().__init__(message)


class ScenarioError(MetapentError):
    """A scenario document failed validation; carries every violation."""

    def __init__(self, violations):
        self.violations = list(violations)
        head = str(self.violations[0]) if self.violations else "invalid scenario"
        extra = f" (+{len(self.violations) - 1} more)" if len(self.violations) > 1 else ""
        super().__init__(head + extra)
