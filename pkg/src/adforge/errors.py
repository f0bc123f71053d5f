"""Exception types shared across the workbench."""

from __future__ import annotations


class AdforgeError(Exception):
    """Base class for all workbench errors."""

    code = "error"


class ParseError(AdforgeError):
    """Malformed DOT input. Carries the source position of the offence."""

    code = "parse_error"

    def __init__(self, line: int, column: int, message: str):
        self.line = line
        self.column = column
        self.message = message
        super().__init__(f"line {line}, column {column}: {message}")


class StructureError(AdforgeError):
    """Graph violates the attack-defense tree invariants."""

    code = "structure_error"


class NotFoundError(AdforgeError):
    """A referenced node, session, or file does not exist."""

    code = "not_found"


class ValidationError(AdforgeError):
    """Input rejected before any side effect took place."""

    code = "validation_error"


class PreconditionError(AdforgeError):
    """Operation requires state the session does not have yet."""

    code = "precondition_error"


class IllegalPhaseError(AdforgeError):
    """Operation not permitted in the session's current phase."""

    code = "illegal_phase"

    def __init__(self, phase, op: str):
        self.phase = phase
        self.op = op
        super().__init__(f"operation '{op}' not allowed in phase {getattr(phase, 'value', phase)}")


class BackendError(AdforgeError):
    """LLM backend failed after retries were exhausted."""

    code = "backend_error"

    def __init__(self, status: int, body: str):
        self.status = status
        self.body = body
        super().__init__(f"backend failed with status {status}: {body[:200]}")


class NoDotFoundError(AdforgeError):
    """An LLM reply contained no parseable DOT block."""

    code = "no_dot_found"


class EmptyTreeError(AdforgeError):
    """Scoring requires at least one attack node."""

    code = "empty_tree"


class UnknownCheckError(AdforgeError):
    """Steady-state check name is not declared."""

    code = "unknown_check"


class UnusableBranchError(AdforgeError):
    """Branch cannot be compiled: some attack nodes carry no commands."""

    code = "unusable_branch"

    def __init__(self, node_ids: list[str]):
        self.node_ids = list(node_ids)
        super().__init__(f"attack nodes without commands: {', '.join(self.node_ids)}")


class StageError(AdforgeError):
    """A stage hit a simulator fault; the run aborts."""

    code = "stage_error"
