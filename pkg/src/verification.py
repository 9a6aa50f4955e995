"""
Per-identity verification records shared by every checking module.

A record names the check, the identity, its indices and the outcome; failures
carry an exact witness (difference matrix as ``"p/q"`` strings, difference
polynomials as triples, or the error that prevented the check).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional

from .constants import STATUS_FAIL, STATUS_PASS, STATUS_SKIPPED
from .errors import MopsError
from .observability.logging import get_logger
from .polynomial import PolyVector
from .ratlinalg import RatMatrix

logger = get_logger("verification")


@dataclass
class CheckRecord:
    """Outcome of one exact identity check."""

    check: str
    identity: str
    indices: Dict[str, Any] = field(default_factory=dict)
    status: str = STATUS_PASS
    witness: Optional[Dict[str, Any]] = None

    @property
    def passed(self) -> bool:
        return self.status == STATUS_PASS

    @property
    def failed(self) -> bool:
        return self.status == STATUS_FAIL

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "check": self.check,
            "identity": self.identity,
            "indices": dict(self.indices),
            "status": self.status,
        }
        if self.witness is not None:
            data["witness"] = self.witness
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CheckRecord":
        return cls(
            check=data["check"],
            identity=data["identity"],
            indices=dict(data.get("indices", {})),
            status=data["status"],
            witness=data.get("witness"),
        )


def _finish(record: CheckRecord) -> CheckRecord:
    if record.failed:
        logger.warning(
            "identity failed: %s %s",
            record.identity,
            record.indices,
            extra={"check": record.check, "identity": record.identity},
        )
    return record


def compare_matrices(
    check: str, identity: str, indices: Dict[str, Any], lhs: RatMatrix, rhs: RatMatrix
) -> CheckRecord:
    """Pass iff ``lhs == rhs`` exactly; the witness is ``lhs - rhs``."""
    if lhs.shape != rhs.shape:
        return _finish(
            CheckRecord(
                check,
                identity,
                indices,
                STATUS_FAIL,
                {"error_type": "ShapeMismatch", "lhs_shape": list(lhs.shape), "rhs_shape": list(rhs.shape)},
            )
        )
    diff = lhs - rhs
    if diff.is_zero():
        return CheckRecord(check, identity, indices, STATUS_PASS)
    return _finish(CheckRecord(check, identity, indices, STATUS_FAIL, {"difference": diff.to_strings()}))


def compare_vectors(
    check: str, identity: str, indices: Dict[str, Any], lhs: PolyVector, rhs: PolyVector
) -> CheckRecord:
    """Pass iff the polynomial vectors agree coefficient by coefficient."""
    if len(lhs) != len(rhs):
        return _finish(
            CheckRecord(
                check,
                identity,
                indices,
                STATUS_FAIL,
                {"error_type": "ShapeMismatch", "lhs_length": len(lhs), "rhs_length": len(rhs)},
            )
        )
    diff = lhs - rhs
    if diff.is_zero():
        return CheckRecord(check, identity, indices, STATUS_PASS)
    return _finish(CheckRecord(check, identity, indices, STATUS_FAIL, {"difference": diff.to_triples()}))


def flag_record(
    check: str,
    identity: str,
    indices: Dict[str, Any],
    ok: bool,
    witness: Optional[Dict[str, Any]] = None,
) -> CheckRecord:
    return _finish(CheckRecord(check, identity, indices, STATUS_PASS if ok else STATUS_FAIL, None if ok else witness))


def error_record(check: str, identity: str, indices: Dict[str, Any], exc: MopsError) -> CheckRecord:
    return _finish(CheckRecord(check, identity, indices, STATUS_FAIL, exc.witness()))


def skipped_record(check: str, reason: str) -> CheckRecord:
    return CheckRecord(check, "skipped", {}, STATUS_SKIPPED, {"reason": reason})


def all_passed(records: Iterable[CheckRecord]) -> bool:
    return all(not r.failed for r in records)


def failures(records: Iterable[CheckRecord]) -> List[CheckRecord]:
    return [r for r in records if r.failed]
