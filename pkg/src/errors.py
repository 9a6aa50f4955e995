"""
Exception hierarchy for the MOPS toolkit.

Every domain error derives from :class:`MopsError` and can render a JSON-ready
``witness()`` so the check runner can turn it into a failed record instead of
crashing the suite.
"""

from typing import Any, Dict, Optional


class MopsError(Exception):
    """Base class for all domain errors."""

    def witness(self) -> Dict[str, Any]:
        return {"error_type": type(self).__name__, "message": str(self)}


# ── Linear algebra ───────────────────────────────────────────────


class SingularMatrix(MopsError):
    """Raised when elimination hits an exact zero pivot."""


class NotSymmetric(MopsError):
    """Raised when a matrix or functional lacks the required symmetry."""


class ShapeMismatch(MopsError):
    """Raised on incompatible matrix or vector shapes."""


# ── Moments and families ─────────────────────────────────────────


class MomentUnavailable(MopsError):
    """Raised when a moment oracle cannot provide μ(h, k)."""

    def __init__(self, h: int, k: int, source: str = "") -> None:
        self.h = h
        self.k = k
        suffix = f" in {source}" if source else ""
        super().__init__(f"moment ({h}, {k}) unavailable{suffix}")

    def witness(self) -> Dict[str, Any]:
        data = super().witness()
        data["index"] = [self.h, self.k]
        return data


class NonPositiveMass(MopsError):
    """Raised when a modified functional would have a non-positive total mass."""


class NotQuasiDefinite(MopsError):
    """Raised when the MOPS does not exist (or is not positive definite) at a degree."""

    def __init__(self, degree: int, label: str = "", reason: str = "") -> None:
        self.degree = degree
        self.label = label
        self.reason = reason
        where = f" for {label}" if label else ""
        why = f": {reason}" if reason else ""
        super().__init__(f"not quasi-definite at degree {degree}{where}{why}")

    def witness(self) -> Dict[str, Any]:
        data = super().witness()
        data["degree"] = self.degree
        if self.label:
            data["family"] = self.label
        return data


class DecompositionMismatch(MopsError):
    """Raised when an extracted small family differs from the independently built one."""

    def __init__(self, message: str, detail: Optional[Dict[str, Any]] = None) -> None:
        self.detail = detail or {}
        super().__init__(message)

    def witness(self) -> Dict[str, Any]:
        data = super().witness()
        data.update(self.detail)
        return data


class InsufficientDepth(MopsError):
    """Raised when a computation needs a family (or Γ sequence) built deeper."""

    def __init__(self, required: int, available: int, what: str = "family") -> None:
        self.required = required
        self.available = available
        super().__init__(f"{what} needs depth {required}, only {available} available")

    def witness(self) -> Dict[str, Any]:
        data = super().witness()
        data["required"] = self.required
        data["available"] = self.available
        return data


class NotChristoffelPair(MopsError):
    """Raised when two families are not related by the stated linear modification."""

    def __init__(self, message: str, detail: Optional[Dict[str, Any]] = None) -> None:
        self.detail = detail or {}
        super().__init__(message)

    def witness(self) -> Dict[str, Any]:
        data = super().witness()
        data.update(self.detail)
        return data


class IdentityViolation(MopsError):
    """Raised by strict verifiers when an exact identity has a nonzero difference."""


# ── Configuration and I/O ────────────────────────────────────────


class ConfigError(MopsError):
    """Raised when the configuration file is missing or invalid."""


class ConfigInvalid(ConfigError):
    """A config value violates its constraint; ``path`` names the offending field."""

    def __init__(self, path: str, message: str) -> None:
        self.path = path
        super().__init__(f"{path}: {message}")

    def witness(self) -> Dict[str, Any]:
        data = super().witness()
        data["field"] = self.path
        return data


class IoFailure(MopsError):
    """Raised when a report cannot be written or read."""
