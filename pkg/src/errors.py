"""
Error Types for HodgeBound

Every failure the toolkit raises on purpose derives from ToolkitError and
carries the command-line exit code it maps to:

- DomainError / HypothesisError / ParseError: bad input or a failed theorem
  hypothesis (exit 2)
- MeshValidationError / MeshQualityError: the mesh cannot be used (exit 3)
- SolverError: a numerical method did not deliver (exit 1)
"""

from typing import Any, Dict, List, Optional, Tuple


class ToolkitError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class DomainError(ToolkitError, ValueError):
    """An operation was called outside its preconditions."""

    exit_code = 2


class HypothesisError(ToolkitError, ValueError):
    """
    A theorem hypothesis does not hold for the supplied manifold class.

    Attributes:
        hypothesis: Short name of the violated hypothesis (e.g. "diameter D")
    """

    exit_code = 2

    def __init__(self, message: str, hypothesis: str = ""):
        super().__init__(message)
        self.hypothesis = hypothesis


class DegenerateDomainError(DomainError):
    """A Dirichlet subproblem has no interior degrees of freedom."""


class OverlapError(DomainError):
    """Decomposition domains share or couple degrees of freedom."""


class ParseError(ToolkitError, ValueError):
    """Malformed OFF input; `line` is 1-based."""

    exit_code = 2

    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class MeshValidationError(ToolkitError, ValueError):
    """
    The mesh is not a closed oriented 2-manifold.

    Attributes:
        edges: Offending edges as vertex pairs
    """

    exit_code = 3

    def __init__(self, message: str, edges: Optional[List[Tuple[int, int]]] = None):
        self.edges = list(edges or [])
        if self.edges:
            shown = ", ".join(f"({a},{b})" for a, b in self.edges[:20])
            more = "" if len(self.edges) <= 20 else f" and {len(self.edges) - 20} more"
            message = f"{message}: {shown}{more}"
        super().__init__(message)


class MeshQualityError(ToolkitError):
    """Mesh geometry makes the discrete operators unusable."""

    exit_code = 3


class AssemblyError(MeshQualityError):
    """A degenerate triangle was met during operator assembly."""

    def __init__(self, message: str, triangle: Optional[int] = None):
        super().__init__(message)
        self.triangle = triangle


class SolverError(ToolkitError, RuntimeError):
    """
    A numerical solver failed.

    Attributes:
        diagnostics: Partial results and settings at the point of failure
    """

    exit_code = 1

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})
