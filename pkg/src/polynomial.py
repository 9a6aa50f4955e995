"""
Sparse bivariate polynomials with exact rational coefficients.

A polynomial is a map ``(i, j) -> Fraction`` for the monomial ``x^i y^j``;
zero coefficients are never stored. ``PolyVector`` is the column vector of
polynomials that plays the role of a degree slice (𝕏_n, ℙ_n, 𝕊_n).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Mapping, Sequence, Tuple, Union, overload

import sympy

from .errors import ShapeMismatch
from .ratlinalg import RatMatrix, format_rational, parse_rational

Exponent = Tuple[int, int]
Scalar = Union[int, Fraction]

NEG_INF = float("-inf")


class BivariatePolynomial:
    """Immutable sparse polynomial in two variables."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Exponent, Scalar] | None = None) -> None:
        clean: Dict[Exponent, Fraction] = {}
        for (i, j), c in (terms or {}).items():
            if i < 0 or j < 0:
                raise ValueError(f"negative exponent ({i}, {j})")
            q = Fraction(c)
            if q:
                clean[(int(i), int(j))] = q
        self._terms = clean

    @classmethod
    def _wrap(cls, terms: Dict[Exponent, Fraction]) -> "BivariatePolynomial":
        p = cls.__new__(cls)
        p._terms = {e: c for e, c in terms.items() if c}
        return p

    # ── Constructors ─────────────────────────────────────────────

    @classmethod
    def zero(cls) -> "BivariatePolynomial":
        return cls._wrap({})

    @classmethod
    def constant(cls, c: Scalar) -> "BivariatePolynomial":
        return cls._wrap({(0, 0): Fraction(c)})

    @classmethod
    def one(cls) -> "BivariatePolynomial":
        return cls.constant(1)

    @classmethod
    def monomial(cls, i: int, j: int, c: Scalar = 1) -> "BivariatePolynomial":
        return cls({(i, j): c})

    @classmethod
    def x(cls) -> "BivariatePolynomial":
        return cls.monomial(1, 0)

    @classmethod
    def y(cls) -> "BivariatePolynomial":
        return cls.monomial(0, 1)

    @classmethod
    def from_triples(cls, triples: Iterable[Sequence[object]]) -> "BivariatePolynomial":
        """Inverse of :meth:`to_triples`; coefficients are ``"p/q"`` strings."""
        terms: Dict[Exponent, Fraction] = {}
        for t in triples:
            i, j, c = t
            key = (int(i), int(j))  # type: ignore[call-overload]
            terms[key] = terms.get(key, Fraction(0)) + parse_rational(c)  # type: ignore[arg-type]
        return cls(terms)

    # ── Inspection ───────────────────────────────────────────────

    @property
    def terms(self) -> Dict[Exponent, Fraction]:
        return dict(self._terms)

    def coefficient(self, i: int, j: int) -> Fraction:
        return self._terms.get((i, j), Fraction(0))

    @property
    def degree(self) -> Union[int, float]:
        """Total degree; ``-inf`` for the zero polynomial."""
        if not self._terms:
            return NEG_INF
        return max(i + j for i, j in self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def exponents(self) -> List[Exponent]:
        return sorted(self._terms, key=lambda e: (-(e[0] + e[1]), -e[0]))

    # ── Arithmetic ───────────────────────────────────────────────

    @staticmethod
    def _coerce(other: object) -> "BivariatePolynomial | None":
        if isinstance(other, BivariatePolynomial):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return BivariatePolynomial.constant(other)
        return None

    def __add__(self, other: object) -> "BivariatePolynomial":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self._terms)
        for e, c in o._terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return BivariatePolynomial._wrap(out)

    __radd__ = __add__

    def __neg__(self) -> "BivariatePolynomial":
        return BivariatePolynomial._wrap({e: -c for e, c in self._terms.items()})

    def __sub__(self, other: object) -> "BivariatePolynomial":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: object) -> "BivariatePolynomial":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other: object) -> "BivariatePolynomial":
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            s = Fraction(other)
            return BivariatePolynomial._wrap({e: c * s for e, c in self._terms.items()})
        if not isinstance(other, BivariatePolynomial):
            return NotImplemented
        out: Dict[Exponent, Fraction] = {}
        for (i1, j1), c1 in self._terms.items():
            for (i2, j2), c2 in other._terms.items():
                key = (i1 + i2, j1 + j2)
                out[key] = out.get(key, Fraction(0)) + c1 * c2
        return BivariatePolynomial._wrap(out)

    __rmul__ = __mul__

    def shift(self, i: int, j: int) -> "BivariatePolynomial":
        """Multiply by the monomial ``x^i y^j``."""
        return BivariatePolynomial._wrap({(a + i, b + j): c for (a, b), c in self._terms.items()})

    def divmod_monomial(self, i: int, j: int) -> Tuple["BivariatePolynomial", "BivariatePolynomial"]:
        """Exact division by ``x^i y^j``: returns (quotient, remainder)."""
        quot: Dict[Exponent, Fraction] = {}
        rem: Dict[Exponent, Fraction] = {}
        for (a, b), c in self._terms.items():
            if a >= i and b >= j:
                quot[(a - i, b - j)] = c
            else:
                rem[(a, b)] = c
        return BivariatePolynomial._wrap(quot), BivariatePolynomial._wrap(rem)

    def halve_exponents(self) -> "BivariatePolynomial":
        """Substitute x² → u, y² → v.

        Raises:
            ValueError: if any stored exponent is odd.
        """
        out: Dict[Exponent, Fraction] = {}
        for (a, b), c in self._terms.items():
            if a % 2 or b % 2:
                raise ValueError(f"odd exponent ({a}, {b}) cannot be halved")
            out[(a // 2, b // 2)] = c
        return BivariatePolynomial._wrap(out)

    def double_exponents(self) -> "BivariatePolynomial":
        """Substitute u → x², v → y²."""
        return BivariatePolynomial._wrap({(2 * a, 2 * b): c for (a, b), c in self._terms.items()})

    def evaluate(self, x: Scalar, y: Scalar) -> Fraction:
        xq, yq = Fraction(x), Fraction(y)
        return sum((c * xq**a * yq**b for (a, b), c in self._terms.items()), Fraction(0))

    # ── Comparison ───────────────────────────────────────────────

    def __eq__(self, other: object) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._terms == o._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    # ── Serialization / rendering ────────────────────────────────

    def to_triples(self) -> List[List[object]]:
        return [[a, b, format_rational(self._terms[(a, b)])] for a, b in self.exponents()]

    def format(self, variables: Tuple[str, str] = ("x", "y")) -> str:
        if not self._terms:
            return "0"
        parts: List[str] = []
        for a, b in self.exponents():
            c = self._terms[(a, b)]
            mono = "*".join(
                f"{v}^{p}" if p > 1 else v for v, p in zip(variables, (a, b)) if p > 0
            )
            mag = abs(c)
            if not mono:
                body = format_rational(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{format_rational(mag)}*{mono}"
            sign = "-" if c < 0 else "+"
            parts.append(f"{sign} {body}" if parts else (f"-{body}" if c < 0 else body))
        return " ".join(parts)

    def to_sympy(self, variables: Tuple[str, str] = ("x", "y")) -> sympy.Expr:
        sx, sy = sympy.symbols(variables)
        return sympy.Add(
            *(
                sympy.Rational(c.numerator, c.denominator) * sx**a * sy**b
                for (a, b), c in self._terms.items()
            )
        )

    def latex(self, variables: Tuple[str, str] = ("x", "y")) -> str:
        return sympy.latex(self.to_sympy(variables), order="grlex")  # type: ignore[no-any-return]

    def __repr__(self) -> str:
        return f"BivariatePolynomial({self.format()})"


Poly = BivariatePolynomial


class PolyVector(Sequence[BivariatePolynomial]):
    """Ordered column of polynomials."""

    __slots__ = ("_entries",)

    def __init__(self, entries: Iterable[BivariatePolynomial] = ()) -> None:
        self._entries: Tuple[BivariatePolynomial, ...] = tuple(entries)

    @classmethod
    def zeros(cls, n: int) -> "PolyVector":
        return cls(BivariatePolynomial.zero() for _ in range(max(n, 0)))

    @classmethod
    def monomials(cls, n: int) -> "PolyVector":
        """Canonical basis 𝕏_n = (x^n, x^{n-1}y, ..., y^n); empty for n < 0."""
        return cls(BivariatePolynomial.monomial(n - j, j) for j in range(n + 1))

    @classmethod
    def from_triples(cls, data: Iterable[Iterable[Sequence[object]]]) -> "PolyVector":
        return cls(BivariatePolynomial.from_triples(t) for t in data)

    def __len__(self) -> int:
        return len(self._entries)

    @overload
    def __getitem__(self, idx: int) -> BivariatePolynomial: ...

    @overload
    def __getitem__(self, idx: slice) -> "PolyVector": ...

    def __getitem__(self, idx):  # type: ignore[no-untyped-def]
        if isinstance(idx, slice):
            return PolyVector(self._entries[idx])
        return self._entries[idx]

    def __iter__(self) -> Iterator[BivariatePolynomial]:
        return iter(self._entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PolyVector):
            return NotImplemented
        return self._entries == other._entries

    def __hash__(self) -> int:
        return hash(self._entries)

    def _check_len(self, other: "PolyVector") -> None:
        if len(self) != len(other):
            raise ShapeMismatch(f"vector lengths {len(self)} and {len(other)} differ")

    def __add__(self, other: "PolyVector") -> "PolyVector":
        self._check_len(other)
        return PolyVector(a + b for a, b in zip(self, other))

    def __sub__(self, other: "PolyVector") -> "PolyVector":
        self._check_len(other)
        return PolyVector(a - b for a, b in zip(self, other))

    def __neg__(self) -> "PolyVector":
        return PolyVector(-a for a in self)

    def __mul__(self, factor: object) -> "PolyVector":
        if isinstance(factor, (BivariatePolynomial, int, Fraction)) and not isinstance(factor, bool):
            return PolyVector(a * factor for a in self)
        return NotImplemented

    __rmul__ = __mul__

    def __rmatmul__(self, matrix: object) -> "PolyVector":
        if not isinstance(matrix, RatMatrix):
            return NotImplemented
        if matrix.cols != len(self):
            raise ShapeMismatch(f"matrix {matrix.shape} cannot act on a vector of length {len(self)}")
        out: List[BivariatePolynomial] = []
        for i in range(matrix.rows):
            acc: Dict[Exponent, Fraction] = {}
            for coef, poly in zip(matrix.row(i), self._entries):
                if not coef:
                    continue
                for e, c in poly._terms.items():
                    acc[e] = acc.get(e, Fraction(0)) + coef * c
            out.append(BivariatePolynomial._wrap(acc))
        return PolyVector(out)

    def shift(self, i: int, j: int) -> "PolyVector":
        return PolyVector(a.shift(i, j) for a in self)

    def halve_exponents(self) -> "PolyVector":
        return PolyVector(a.halve_exponents() for a in self)

    def double_exponents(self) -> "PolyVector":
        return PolyVector(a.double_exponents() for a in self)

    def is_zero(self) -> bool:
        return all(a.is_zero() for a in self)

    def to_triples(self) -> List[List[List[object]]]:
        return [a.to_triples() for a in self]

    def format(self, variables: Tuple[str, str] = ("x", "y")) -> List[str]:
        return [a.format(variables) for a in self]

    def __repr__(self) -> str:
        return f"PolyVector({self.format()})"
