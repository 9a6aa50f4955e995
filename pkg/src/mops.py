"""
Monic orthogonal polynomial systems of a moment functional.

Slice n is obtained by orthogonalizing each x^{n-j}y^j against the monomial
basis of Π_{n-1}. The basis is graded, so every degree solves against a
leading principal block of one moment matrix. Recurrence coefficients come
from Gram identities:

    x_k ℙ_n = L_{n,k} ℙ_{n+1} + D_{n,k} ℙ_n + C_{n,k} ℙ_{n-1}
    D_{n,k} = ⟨x_k ℙ_n, ℙ_n⟩ 𝐇_n⁻¹,   C_{n,k} = 𝐇_n L_{n-1,k}ᵀ 𝐇_{n-1}⁻¹

For xy-symmetric functionals every D vanishes and C is written Γ_{n,k}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from .errors import (
    IdentityViolation,
    InsufficientDepth,
    NotQuasiDefinite,
    NotSymmetric,
    SingularMatrix,
)
from .momentbase import MomentFunctional, gram
from .observability.logging import get_logger
from .polynomial import BivariatePolynomial, PolyVector
from .ratlinalg import BlockMatrix, RatMatrix, invert, is_positive_definite, rank, solve
from .structmat import L
from .verification import CheckRecord, compare_vectors, flag_record

logger = get_logger("mops")

Exponent = Tuple[int, int]


def _graded_exponents(max_degree: int) -> List[Exponent]:
    """Exponents of 𝕏_0, 𝕏_1, ..., 𝕏_{max_degree} in canonical order."""
    return [(d - j, j) for d in range(max_degree + 1) for j in range(d + 1)]


def variable(k: int) -> BivariatePolynomial:
    if k == 1:
        return BivariatePolynomial.x()
    if k == 2:
        return BivariatePolynomial.y()
    raise ValueError(f"variable index must be 1 or 2, got {k}")


@dataclass
class MopsFamily:
    """Slices ℙ_0..ℙ_N of a MOPS with their Gram matrices 𝐇_n."""

    functional: MomentFunctional
    slices: List[PolyVector]
    grams: List[RatMatrix]
    label: str = ""
    _inverse_grams: Dict[int, RatMatrix] = field(default_factory=dict, repr=False, compare=False)

    @property
    def max_degree(self) -> int:
        return len(self.slices) - 1

    def require(self, n: int) -> None:
        if n > self.max_degree:
            raise InsufficientDepth(n, self.max_degree, f"family {self.label!r}")

    def slice(self, n: int) -> PolyVector:
        """ℙ_n; the empty vector for n < 0."""
        if n < 0:
            return PolyVector()
        self.require(n)
        return self.slices[n]

    def gram_matrix(self, n: int) -> RatMatrix:
        if n < 0:
            return RatMatrix.zeros(0, 0)
        self.require(n)
        return self.grams[n]

    def inverse_gram(self, n: int) -> RatMatrix:
        if n not in self._inverse_grams:
            self._inverse_grams[n] = invert(self.gram_matrix(n))
        return self._inverse_grams[n]

    def truncated(self, N: int) -> "MopsFamily":
        self.require(N)
        return MopsFamily(self.functional, self.slices[: N + 1], self.grams[: N + 1], self.label)


# ── Construction ─────────────────────────────────────────────────


def build_mops(F: MomentFunctional, N: int, label: Optional[str] = None) -> MopsFamily:
    """Build the MOPS of ``F`` through degree ``N``.

    Raises:
        NotQuasiDefinite: naming the first degree whose moment matrix is
            singular or whose Gram matrix is not positive definite.
    """
    if N < 0:
        raise ValueError(f"max degree must be >= 0, got {N}")
    name = label or F.description
    basis = _graded_exponents(N - 1)
    moments = [[F.moment(a + c, b + d) for (c, d) in basis] for (a, b) in basis]

    slices: List[PolyVector] = []
    grams: List[RatMatrix] = []
    for n in range(N + 1):
        dim = n * (n + 1) // 2
        lead = [(n - j, j) for j in range(n + 1)]
        if dim == 0:
            vec = PolyVector([BivariatePolynomial.one()])
        else:
            block = RatMatrix.from_rows([row[:dim] for row in moments[:dim]])
            rhs = RatMatrix.from_rows(
                [[-F.moment(a + c, b + d) for (c, d) in lead] for (a, b) in basis[:dim]]
            )
            try:
                coeffs = solve(block, rhs)
            except SingularMatrix as exc:
                raise NotQuasiDefinite(n, name, "singular moment matrix") from exc
            entries = []
            for col, (c, d) in enumerate(lead):
                terms: Dict[Exponent, Fraction] = {(c, d): Fraction(1)}
                for r in range(dim):
                    terms[basis[r]] = coeffs[r, col]
                entries.append(BivariatePolynomial(terms))
            vec = PolyVector(entries)
        h = gram(F, vec, vec)
        if not is_positive_definite(h):
            raise NotQuasiDefinite(n, name, "Gram matrix is not positive definite")
        slices.append(vec)
        grams.append(h)
        logger.debug("built slice %d of %s", n, name, extra={"degree": n, "family": name})
    return MopsFamily(F, slices, grams, name)


# ── Recurrence coefficients ──────────────────────────────────────


def symmetric_gamma(fam: MopsFamily, n: int, k: int) -> RatMatrix:
    """Γ_{n,k} = 𝐒_n L_{n-1,k}ᵀ 𝐒_{n-1}⁻¹ of an xy-symmetric family.

    Γ_{0,k} is the empty 1×0 matrix.

    Raises:
        NotSymmetric: if the family's functional is not xy-symmetric.
    """
    if not fam.functional.is_xy_symmetric:
        raise NotSymmetric(f"Γ form needs an xy-symmetric functional, got {fam.functional}")
    return lower_coefficient(fam, n, k)


def lower_coefficient(fam: MopsFamily, n: int, k: int) -> RatMatrix:
    """C_{n,k} = 𝐇_n L_{n-1,k}ᵀ 𝐇_{n-1}⁻¹ for any family (1×0 at n = 0)."""
    if n <= 0:
        return RatMatrix.zeros(n + 1, n)
    return fam.gram_matrix(n) @ L(n - 1, k).T @ fam.inverse_gram(n - 1)


def diagonal_coefficient(fam: MopsFamily, n: int, k: int) -> RatMatrix:
    """D_{n,k} = ⟨x_k ℙ_n, ℙ_n⟩ 𝐇_n⁻¹."""
    pn = fam.slice(n)
    return gram(fam.functional, pn * variable(k), pn) @ fam.inverse_gram(n)


def recurrence_residual(fam: MopsFamily, n: int, k: int, D: RatMatrix, C: RatMatrix) -> PolyVector:
    """x_k ℙ_n − L_{n,k} ℙ_{n+1} − D ℙ_n − C ℙ_{n-1}; zero iff the relation holds."""
    lhs = fam.slice(n) * variable(k)
    rhs = L(n, k) @ fam.slice(n + 1) + D @ fam.slice(n) + C @ fam.slice(n - 1)
    return lhs - rhs


def three_term(fam: MopsFamily, n: int, k: int, verify: bool = True) -> Tuple[RatMatrix, RatMatrix]:
    """(D_{n,k}, C_{n,k}) of the general three-term relation.

    With ``verify`` the family must reach degree n + 1 and the relation is
    checked as an exact polynomial identity.

    Raises:
        IdentityViolation: if verification finds a nonzero residual.
    """
    D = diagonal_coefficient(fam, n, k)
    C = lower_coefficient(fam, n, k)
    if verify:
        residual = recurrence_residual(fam, n, k, D, C)
        if not residual.is_zero():
            raise IdentityViolation(
                f"three-term relation fails for {fam.label} at n={n}, k={k}: "
                f"residual {residual.format()}"
            )
    return D, C


def verify_symmetric_recurrence(fam: MopsFamily, n: int, k: int) -> CheckRecord:
    """Check x_k 𝕊_n = L_{n,k} 𝕊_{n+1} + Γ_{n,k} 𝕊_{n-1} as polynomials."""
    gamma = symmetric_gamma(fam, n, k)
    return compare_vectors(
        "orthogonality",
        "x_k S_n = L_n S_n+1 + G_n S_n-1",
        {"n": n, "k": k},
        fam.slice(n) * variable(k),
        L(n, k) @ fam.slice(n + 1) + gamma @ fam.slice(n - 1),
    )


def verify_gamma_rank(fam: MopsFamily, n: int, k: int) -> CheckRecord:
    """Γ_{n,k} has full column rank n."""
    r = rank(symmetric_gamma(fam, n, k))
    return flag_record(
        "orthogonality", "rank Gamma_n,k = n", {"n": n, "k": k}, r == n, {"rank": r, "expected": n}
    )


# ── Verification ─────────────────────────────────────────────────


def is_monic_slice(vec: PolyVector, n: int) -> bool:
    """Entry j has leading term exactly x^{n-j}y^j and nothing else of degree n."""
    if len(vec) != n + 1:
        return False
    for j, p in enumerate(vec):
        top = {e: c for e, c in p.terms.items() if e[0] + e[1] >= n}
        if top != {(n - j, j): Fraction(1)}:
            return False
    return True


def verify_orthogonality(fam: MopsFamily, check: str = "orthogonality") -> List[CheckRecord]:
    """Exact cross-Gram, positive-definiteness and monicity records for the family."""
    F = fam.functional
    records: List[CheckRecord] = []
    N = fam.max_degree
    for n in range(N + 1):
        pn = fam.slices[n]
        records.append(
            flag_record(check, "monic slice", {"n": n, "family": fam.label}, is_monic_slice(pn, n))
        )
        h = gram(F, pn, pn)
        ok = h.is_symmetric() and is_positive_definite(h)
        records.append(
            flag_record(
                check,
                "H_n positive definite",
                {"n": n, "family": fam.label},
                ok,
                {"gram": h.to_strings()},
            )
        )
        for m in range(n + 1, N + 1):
            cross = gram(F, pn, fam.slices[m])
            records.append(
                flag_record(
                    check,
                    "<P_n, P_m> = 0",
                    {"n": n, "m": m, "family": fam.label},
                    cross.is_zero(),
                    {"difference": cross.to_strings()},
                )
            )
    return records


def rebuild_from_recurrence(
    fam: MopsFamily, gammas: Optional[Dict[Tuple[int, int], RatMatrix]] = None
) -> List[PolyVector]:
    """Regenerate 𝕊_0..𝕊_N from 𝕊_0, 𝕊_1 and the Γ matrices alone.

    Rows of the k = 1 relation give entries 0..n of 𝕊_{n+1}; the last row of
    the k = 2 relation gives entry n+1.
    """
    N = fam.max_degree
    if gammas is None:
        gammas = {(n, k): symmetric_gamma(fam, n, k) for n in range(1, N) for k in (1, 2)}
    rebuilt = [fam.slice(0)]
    if N >= 1:
        rebuilt.append(fam.slice(1))
    for n in range(1, N):
        prev = rebuilt[n - 1]
        via_x = rebuilt[n] * variable(1) - gammas[(n, 1)] @ prev
        via_y = rebuilt[n] * variable(2) - gammas[(n, 2)] @ prev
        rebuilt.append(PolyVector(list(via_x) + [via_y[n]]))
    return rebuilt


def parity_violations(fam: MopsFamily) -> List[Dict[str, Any]]:
    """Terms of 𝕊_{n,k} whose exponents break x^{≡n−k} y^{≡k} (mod 2)."""
    bad: List[Dict[str, Any]] = []
    for n, vec in enumerate(fam.slices):
        for k, p in enumerate(vec):
            for a, b in p.terms:
                if (a - (n - k)) % 2 or (b - k) % 2:
                    bad.append({"n": n, "k": k, "exponent": [a, b]})
    return bad


def block_jacobi(fam: MopsFamily, k: int, N: int) -> BlockMatrix:
    """Truncated block tridiagonal operator of x_k on block rows/cols 0..N."""
    fam.require(N)
    sizes = [n + 1 for n in range(N + 1)]
    blocks: Dict[Tuple[int, int], RatMatrix] = {}
    for n in range(N + 1):
        blocks[(n, n)] = diagonal_coefficient(fam, n, k)
        if n < N:
            blocks[(n, n + 1)] = L(n, k)
        if n >= 1:
            blocks[(n, n - 1)] = lower_coefficient(fam, n, k)
    return BlockMatrix.build(sizes, sizes, blocks)


def family_to_dict(fam: MopsFamily, *, with_coefficients: bool = False) -> Dict[str, Any]:
    data: Dict[str, Any] = {
        "label": fam.label,
        "max_degree": fam.max_degree,
        "slices": [vec.to_triples() for vec in fam.slices],
        "grams": [h.to_strings() for h in fam.grams],
    }
    if with_coefficients:
        coeffs = []
        for n in range(fam.max_degree + 1):
            for k in (1, 2):
                coeffs.append(
                    {
                        "n": n,
                        "k": k,
                        "D": diagonal_coefficient(fam, n, k).to_strings(),
                        "C": lower_coefficient(fam, n, k).to_strings(),
                    }
                )
        data["recurrence"] = coeffs
    return data
