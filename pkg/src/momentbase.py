"""
Moment functionals and the weight families built on them.

Every weight is represented only through its normalized moments
μ(h, k) = ∫x^h y^k W / ∫W, so common transcendental factors cancel and every
value is an exact rational. Derived functionals (Christoffel modification,
quadratic pushforward and pullback) are new oracles over their parent.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

from .constants import FAMILY_BALL, FAMILY_CUSTOM, FAMILY_SIMPLEX, FAMILY_SQUARE, WEIGHT_FAMILIES
from .errors import (
    ConfigInvalid,
    MomentUnavailable,
    NonPositiveMass,
    NotSymmetric,
    ShapeMismatch,
)
from .observability.logging import get_logger
from .observability.metrics import MetricsCollector
from .polynomial import BivariatePolynomial, PolyVector
from .ratlinalg import RatMatrix, format_rational, parse_rational

logger = get_logger("momentbase")

Oracle = Callable[[int, int], Fraction]
RationalLike = Union[int, Fraction, str]


class Symmetry(str, Enum):
    NONE = "none"
    CENTRAL = "central"
    X = "x"
    Y = "y"
    XY = "xy"

    def forces_zero(self, h: int, k: int) -> bool:
        """True when this symmetry makes μ(h, k) vanish."""
        if self is Symmetry.XY:
            return bool(h % 2 or k % 2)
        if self is Symmetry.X:
            return bool(h % 2)
        if self is Symmetry.Y:
            return bool(k % 2)
        if self is Symmetry.CENTRAL:
            return bool((h + k) % 2)
        return False


class MomentFunctional:
    """Memoizing moment oracle normalized to μ(0, 0) = 1."""

    def __init__(
        self,
        oracle: Oracle,
        symmetry: Symmetry = Symmetry.NONE,
        description: str = "",
    ) -> None:
        self._oracle = oracle
        self.symmetry = symmetry
        self.description = description
        self._memo: Dict[Tuple[int, int], Fraction] = {}
        self._lock = threading.Lock()

    @property
    def is_xy_symmetric(self) -> bool:
        return self.symmetry is Symmetry.XY

    def moment(self, h: int, k: int) -> Fraction:
        if h < 0 or k < 0:
            raise ValueError(f"moment indices must be >= 0, got ({h}, {k})")
        key = (h, k)
        with self._lock:
            hit = self._memo.get(key)
        if hit is not None:
            return hit
        if self.symmetry.forces_zero(h, k):
            value = Fraction(0)
        else:
            value = Fraction(self._oracle(h, k))
            MetricsCollector().inc("moments_computed_total")
        with self._lock:
            self._memo[key] = value
        return value

    __call__ = moment

    def apply(self, p: BivariatePolynomial) -> Fraction:
        """Value of the functional on a polynomial."""
        return sum((c * self.moment(i, j) for (i, j), c in p.terms.items()), Fraction(0))

    def __repr__(self) -> str:
        return f"MomentFunctional({self.description or 'anonymous'}, symmetry={self.symmetry.value})"


def moment(F: MomentFunctional, h: int, k: int) -> Fraction:
    return F.moment(h, k)


# ── Built-in families ────────────────────────────────────────────


def square_legendre() -> MomentFunctional:
    """Uniform weight on [-1, 1]²."""

    def oracle(h: int, k: int) -> Fraction:
        return Fraction(1, (h + 1) * (k + 1))

    return MomentFunctional(oracle, Symmetry.XY, "square-legendre")


def _check_exponent(name: str, value: Fraction) -> None:
    if value <= -1:
        raise ConfigInvalid(f"weight.{name}", f"must be > -1, got {format_rational(value)}")


def ball(mu: RationalLike) -> MomentFunctional:
    """(1 - x² - y²)^μ on the unit disk, via the polar split radius × angle.

    Radial ratio R(m+1)/R(m) = (m+1)/(m+μ+2) for R(m) = ∫ r^{2m+1}(1-r²)^μ dr;
    angular ratios A(h+1,k)/A(h,k) = (2h+1)/(2h+2k+2) and
    A(h,k+1)/A(h,k) = (2k+1)/(2h+2k+2) for A(h,k) = ∫ cos^{2h} sin^{2k}.
    """
    m = parse_rational(mu)
    _check_exponent("mu", m)

    def oracle(h2: int, k2: int) -> Fraction:
        h, k = h2 // 2, k2 // 2
        radial = Fraction(1)
        for t in range(h + k):
            radial *= Fraction(t + 1) / (t + m + 2)
        angular = Fraction(1)
        for s in range(h):
            angular *= Fraction(2 * s + 1, 2 * s + 2)
        for t in range(k):
            angular *= Fraction(2 * t + 1, 2 * h + 2 * t + 2)
        return radial * angular

    return MomentFunctional(oracle, Symmetry.XY, f"ball(mu={format_rational(m)})")


def simplex(a: RationalLike, b: RationalLike, c: RationalLike) -> MomentFunctional:
    """u^a v^b (1-u-v)^c on the triangle u, v ≥ 0, u + v ≤ 1 (Dirichlet integral)."""
    qa, qb, qc = parse_rational(a), parse_rational(b), parse_rational(c)
    for name, q in (("a", qa), ("b", qb), ("c", qc)):
        _check_exponent(name, q)
    total = qa + qb + qc + 3

    def oracle(h: int, k: int) -> Fraction:
        value = Fraction(1)
        for t in range(h):
            value *= qa + 1 + t
        for t in range(k):
            value *= qb + 1 + t
        for t in range(h + k):
            value /= total + t
        return value

    label = f"simplex(a={format_rational(qa)}, b={format_rational(qb)}, c={format_rational(qc)})"
    return MomentFunctional(oracle, Symmetry.NONE, label)


def custom(
    table: Sequence[Tuple[int, int, Union[str, int, Fraction]]],
    symmetry: Symmetry = Symmetry.NONE,
    description: str = "custom",
) -> MomentFunctional:
    """Functional given by an explicit moment table, normalized by its (0, 0) entry.

    Entries forced to zero by ``symmetry`` may be omitted.

    Raises:
        MomentUnavailable: if the table has no (0, 0) entry.
        NonPositiveMass: if the (0, 0) entry is not positive.
    """
    raw: Dict[Tuple[int, int], Fraction] = {}
    for h, k, v in table:
        raw[(int(h), int(k))] = parse_rational(v)
    if (0, 0) not in raw:
        raise MomentUnavailable(0, 0, description)
    mass = raw[(0, 0)]
    if mass <= 0:
        raise NonPositiveMass(f"{description}: total mass {format_rational(mass)} is not positive")

    def oracle(h: int, k: int) -> Fraction:
        if (h, k) not in raw:
            raise MomentUnavailable(h, k, description)
        return raw[(h, k)] / mass

    return MomentFunctional(oracle, symmetry, description)


# ── Derived functionals ──────────────────────────────────────────


def christoffel(F: MomentFunctional, a: Union[int, Fraction], b: Union[int, Fraction]) -> MomentFunctional:
    """Moments of (a x + b y)·W, renormalized.

    Raises:
        NonPositiveMass: if a·μ(1,0) + b·μ(0,1) ≤ 0.
    """
    qa, qb = Fraction(a), Fraction(b)
    norm = qa * F.moment(1, 0) + qb * F.moment(0, 1)
    if norm <= 0:
        raise NonPositiveMass(
            f"christoffel({F.description}, {format_rational(qa)}, {format_rational(qb)}): "
            f"normalization {format_rational(norm)} is not positive"
        )

    def oracle(h: int, k: int) -> Fraction:
        return (qa * F.moment(h + 1, k) + qb * F.moment(h, k + 1)) / norm

    label = f"christoffel({F.description}, {format_rational(qa)}, {format_rational(qb)})"
    return MomentFunctional(oracle, Symmetry.NONE, label)


def christoffel_norm(F: MomentFunctional, a: Union[int, Fraction], b: Union[int, Fraction]) -> Fraction:
    """Normalization constant a·μ(1,0) + b·μ(0,1) of the modification."""
    return Fraction(a) * F.moment(1, 0) + Fraction(b) * F.moment(0, 1)


def quad_pushforward(F: MomentFunctional, i: int, j: int) -> MomentFunctional:
    """Moments of W^{(i,j)} under u = x², v = y².

    Raises:
        NotSymmetric: if ``F`` is not xy-symmetric.
        NonPositiveMass: if μ_F(2i, 2j) ≤ 0.
    """
    if not F.is_xy_symmetric:
        raise NotSymmetric(f"quadratic pushforward needs an xy-symmetric functional, got {F}")
    if i not in (0, 1) or j not in (0, 1):
        raise ValueError(f"parity flags must be 0 or 1, got ({i}, {j})")
    norm = F.moment(2 * i, 2 * j)
    if norm <= 0:
        raise NonPositiveMass(f"pushforward({F.description}, {i}, {j}): mass {format_rational(norm)}")

    def oracle(h: int, k: int) -> Fraction:
        return F.moment(2 * h + 2 * i, 2 * k + 2 * j) / norm

    return MomentFunctional(oracle, Symmetry.NONE, f"pushforward({F.description}, {i}, {j})")


def quad_pullback(G: MomentFunctional) -> MomentFunctional:
    """xy-symmetric functional with μ(2h, 2k) = G(h, k)."""

    def oracle(h: int, k: int) -> Fraction:
        return G.moment(h // 2, k // 2)

    return MomentFunctional(oracle, Symmetry.XY, f"pullback({G.description})")


def is_xy_symmetric_table(F: MomentFunctional, degree: int) -> bool:
    """Scan μ(h, k), h + k ≤ degree, for the xy-symmetric vanishing pattern."""
    for total in range(degree + 1):
        for h in range(total + 1):
            k = total - h
            if (h % 2 or k % 2) and F.moment(h, k) != 0:
                return False
    return True


# ── Gram matrices ────────────────────────────────────────────────

PolyLike = Union[PolyVector, Sequence[Sequence[BivariatePolynomial]], BivariatePolynomial, int, Fraction]


def _as_rows(A: PolyLike) -> List[List[BivariatePolynomial]]:
    if isinstance(A, PolyVector):
        return [[p] for p in A]
    if isinstance(A, BivariatePolynomial):
        return [[A]]
    if isinstance(A, (int, Fraction)):
        return [[BivariatePolynomial.constant(A)]]
    return [list(r) for r in A]


def _pairing(F: MomentFunctional, p: BivariatePolynomial, q: BivariatePolynomial) -> Fraction:
    total = Fraction(0)
    qt = q.terms
    for (i1, j1), c1 in p.terms.items():
        for (i2, j2), c2 in qt.items():
            total += c1 * c2 * F.moment(i1 + i2, j1 + j2)
    return total


def gram(F: MomentFunctional, A: PolyLike, B: PolyLike) -> RatMatrix:
    """Matrix of functional values of A·Bᵀ (vectors are single-column matrices)."""
    ra, rb = _as_rows(A), _as_rows(B)
    width = len(ra[0]) if ra else (len(rb[0]) if rb else 1)
    if any(len(r) != width for r in ra + rb):
        raise ShapeMismatch("gram needs polynomial matrices with equal column counts")
    out: List[List[Fraction]] = []
    for row_a in ra:
        out.append(
            [sum((_pairing(F, a, b) for a, b in zip(row_a, row_b)), Fraction(0)) for row_b in rb]
        )
    return RatMatrix.from_rows(out, cols=len(rb))


# ── Weight specifications ────────────────────────────────────────


@dataclass
class WeightSpec:
    """Weight entry of a run config."""

    family: str
    mu: Optional[Fraction] = None
    a: Optional[Fraction] = None
    b: Optional[Fraction] = None
    c: Optional[Fraction] = None
    moments: List[Tuple[int, int, Fraction]] = field(default_factory=list)
    symmetry: Symmetry = Symmetry.NONE

    def validate(self) -> None:
        """Raise ConfigInvalid naming the first bad field."""
        if self.family not in WEIGHT_FAMILIES:
            raise ConfigInvalid("weight.family", f"unknown family {self.family!r}")
        if self.family == FAMILY_BALL:
            if self.mu is None:
                raise ConfigInvalid("weight.mu", "required for the ball family")
            _check_exponent("mu", self.mu)
        elif self.family == FAMILY_SIMPLEX:
            for name in ("a", "b", "c"):
                value = getattr(self, name)
                if value is None:
                    raise ConfigInvalid(f"weight.{name}", "required for the simplex family")
                _check_exponent(name, value)
        elif self.family == FAMILY_CUSTOM and not self.moments:
            raise ConfigInvalid("weight.moments", "custom weights need a moment table")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "WeightSpec":
        def rational(name: str) -> Optional[Fraction]:
            if data.get(name) is None:
                return None
            try:
                return parse_rational(data[name])
            except ValueError as exc:
                raise ConfigInvalid(f"weight.{name}", str(exc)) from exc

        table: List[Tuple[int, int, Fraction]] = []
        for pos, entry in enumerate(data.get("moments") or []):
            try:
                h, k, v = entry
                table.append((int(h), int(k), parse_rational(v)))
            except (TypeError, ValueError) as exc:
                raise ConfigInvalid(f"weight.moments[{pos}]", f"expected [h, k, \"p/q\"]: {exc}") from exc
        try:
            symmetry = Symmetry(data.get("symmetry", "none"))
        except ValueError as exc:
            raise ConfigInvalid("weight.symmetry", str(exc)) from exc
        spec = cls(
            family=str(data.get("family", "")),
            mu=rational("mu"),
            a=rational("a"),
            b=rational("b"),
            c=rational("c"),
            moments=table,
            symmetry=symmetry,
        )
        spec.validate()
        return spec

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"family": self.family}
        for name in ("mu", "a", "b", "c"):
            value = getattr(self, name)
            if value is not None:
                data[name] = format_rational(value)
        if self.moments:
            data["moments"] = [[h, k, format_rational(v)] for h, k, v in self.moments]
        if self.family == FAMILY_CUSTOM:
            data["symmetry"] = self.symmetry.value
        return data


def from_weight_spec(spec: WeightSpec) -> MomentFunctional:
    spec.validate()
    if spec.family == FAMILY_SQUARE:
        return square_legendre()
    if spec.family == FAMILY_BALL:
        return ball(spec.mu)  # type: ignore[arg-type]
    if spec.family == FAMILY_SIMPLEX:
        return simplex(spec.a, spec.b, spec.c)  # type: ignore[arg-type]
    logger.debug("custom moment table with %d entries", len(spec.moments))
    return custom(spec.moments, spec.symmetry)
