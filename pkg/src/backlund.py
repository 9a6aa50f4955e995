"""
Coefficient relations between a symmetric family and its four small families.

Everything here is expressed through the Γ_{n,k} matrices of the symmetric
three-term relation x_k 𝕊_n = L_{n,k} 𝕊_{n+1} + Γ_{n,k} 𝕊_{n-1}. Matrices with
negative indices are zero (or empty) of the natural shape, so no formula
special-cases small n.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Tuple

from .constants import PARITY_CLASSES
from .errors import InsufficientDepth, NotChristoffelPair
from .momentbase import christoffel_norm
from .mops import MopsFamily, block_jacobi, symmetric_gamma, three_term, variable
from .observability.logging import get_logger
from .quadratic import QuadDecomposition
from .ratlinalg import BlockMatrix, RatMatrix, format_rational
from .structmat import J, L
from .verification import CheckRecord, compare_matrices, compare_vectors

logger = get_logger("backlund")

Parity = Tuple[int, int]


def first_partner(k: int) -> Parity:
    """(2−k, k−1): the family reached from (0,0) by multiplying with x_k."""
    return (2 - k, k - 1)


def second_partner(k: int) -> Parity:
    """(k−1, 2−k): the family that reaches (1,1) by multiplying with x_k."""
    return (k - 1, 2 - k)


# ── Γ sequence ───────────────────────────────────────────────────


@dataclass
class GammaSequence:
    """Γ_{n,k} of an xy-symmetric family for 1 ≤ n ≤ depth."""

    source: MopsFamily
    gammas: Dict[Tuple[int, int], RatMatrix]
    depth: int

    def __call__(self, n: int, k: int) -> RatMatrix:
        if n <= 0:
            return RatMatrix.zeros(n + 1, n)
        if n > self.depth:
            raise InsufficientDepth(n, self.depth, "Gamma sequence")
        return self.gammas[(n, k)]


def gamma_sequence(symfam: MopsFamily, depth: int) -> GammaSequence:
    """Γ_{n,k} = 𝐒_n L_{n-1,k}ᵀ 𝐒_{n-1}⁻¹ for 1 ≤ n ≤ depth, k ∈ {1, 2}."""
    symfam.require(depth)
    gammas = {(n, k): symmetric_gamma(symfam, n, k) for n in range(1, depth + 1) for k in (1, 2)}
    return GammaSequence(symfam, gammas, depth)


# ── Bäcklund-type formulas ───────────────────────────────────────


def backlund_coeffs(G: GammaSequence, i: int, j: int, n: int, k: int) -> Tuple[RatMatrix, RatMatrix]:
    """(D̂, Ĉ) of the small family (i, j) at degree n, from Γ alone.

    Raises:
        InsufficientDepth: if a needed Γ index exceeds the sequence depth.
    """
    # base index of the big relation: 2n for (0,0), 2n+2 for (1,1), 2n+1 otherwise
    s = {(0, 0): 2 * n, (1, 1): 2 * n + 2, (1, 0): 2 * n + 1, (0, 1): 2 * n + 1}[(i, j)]
    jn = J(n, i, j)
    jprev = J(n - 1, i, j)
    middle = L(s, k) @ G(s + 1, k) + G(s, k) @ L(s - 1, k)
    D = jn @ middle @ jn.T
    C = jn @ G(s, k) @ G(s - 1, k) @ jprev.T
    return D, C


def gamma_hat(G: GammaSequence, tag: Parity, n: int, k: int) -> RatMatrix:
    """Γ̂^{tag}_{n,k} of the short relations between small families."""
    a, b = first_partner(k), second_partner(k)
    if tag == (0, 0):
        return J(n, 0, 0) @ G(2 * n, k) @ J(n - 1, *a).T
    if tag == (0, 1):
        return J(n - 1, 1, 1) @ G(2 * n, k) @ J(n - 1, *b).T
    if tag == (1, 1):
        return J(n, *b) @ G(2 * n + 1, k) @ J(n - 1, 1, 1).T
    if tag == (1, 0):
        return J(n, *a) @ G(2 * n + 1, k) @ J(n, 0, 0).T
    raise ValueError(f"unknown family tag {tag}")


# ── Christoffel connection ───────────────────────────────────────


def christoffel_connection(
    fam: MopsFamily, fam_star: MopsFamily, a: Fraction | int, b: Fraction | int, n: int
) -> Tuple[RatMatrix, RatMatrix]:
    """(M_n, N_n) linking a family and its modification by λ = a x + b y.

    Both short relations are checked as polynomial identities:
    ℙ_n = ℙ*_n + M_n ℙ*_{n-1} and λ ℙ*_n = (a L_{n,1} + b L_{n,2}) ℙ_{n+1} + N_n ℙ_n.

    Raises:
        NotChristoffelPair: if either relation leaves a nonzero residual.
    """
    qa, qb = Fraction(a), Fraction(b)
    c = christoffel_norm(fam.functional, qa, qb)
    fam.require(n + 1)
    fam_star.require(n)
    if n >= 1:
        shift_t = L(n - 1, 1).T * qa + L(n - 1, 2).T * qb
        M = fam.gram_matrix(n) @ shift_t @ fam_star.inverse_gram(n - 1) * (1 / c)
    else:
        M = RatMatrix.zeros(1, 0)
    N = fam_star.gram_matrix(n) @ fam.inverse_gram(n) * c

    first = fam.slice(n) - fam_star.slice(n) - M @ fam_star.slice(n - 1)
    lam = variable(1) * qa + variable(2) * qb
    shift = L(n, 1) * qa + L(n, 2) * qb
    second = fam_star.slice(n) * lam - shift @ fam.slice(n + 1) - N @ fam.slice(n)
    if not first.is_zero() or not second.is_zero():
        raise NotChristoffelPair(
            f"{fam_star.label} is not the ({format_rational(qa)}x + {format_rational(qb)}y) "
            f"modification of {fam.label} at n={n}",
            {"n": n, "first_residual": first.to_triples(), "second_residual": second.to_triples()},
        )
    return M, N


def _label(parity: Parity) -> str:
    return f"({parity[0]},{parity[1]})"


def case_study_coefficients(decomp: QuadDecomposition, n_max: int) -> List[Dict[str, Any]]:
    """Coefficient tables of the four small families of a decomposition.

    One ``recurrence`` entry (D̂_{n,k}, Ĉ_{n,k}) per family for n ≤ n_max, and
    one ``connection`` entry (M_n, N_n) per x_k-modified pair for n < n_max.
    Matrices are ``"p/q"`` rows.
    """
    small = decomp.small
    entries: List[Dict[str, Any]] = []
    for parity in PARITY_CLASSES:
        for n in range(n_max + 1):
            for k in (1, 2):
                D, C = three_term(small[parity], n, k, verify=False)
                entries.append(
                    {
                        "kind": "recurrence",
                        "family": _label(parity),
                        "n": n,
                        "k": k,
                        "D": D.to_strings(),
                        "C": C.to_strings(),
                    }
                )
    for k in (1, 2):
        a, b = (1, 0) if k == 1 else (0, 1)
        pairs = (((0, 0), first_partner(k)), (second_partner(k), (1, 1)))
        for n in range(n_max):
            for source, target in pairs:
                M, N = christoffel_connection(small[source], small[target], a, b, n)
                entries.append(
                    {
                        "kind": "connection",
                        "pair": f"{_label(source)}->{_label(target)}",
                        "n": n,
                        "k": k,
                        "M": M.to_strings(),
                        "N": N.to_strings(),
                    }
                )
    return entries


# ── Block factors ────────────────────────────────────────────────


@dataclass
class BlockFactor:
    """Truncated block bidiagonal factor.

    L kinds keep identity diagonal blocks and sub-diagonal blocks at (m, m−1)
    for m = 1..T; U kinds keep diagonal blocks and super-diagonal L_{m,k} at
    (m, m+1) for m = 0..T−1.
    """

    kind: str
    k: int
    diagonal: List[RatMatrix]
    off_diagonal: List[RatMatrix] = field(default_factory=list)

    @property
    def truncation(self) -> int:
        return len(self.diagonal) - 1

    def to_block_matrix(self) -> BlockMatrix:
        sizes = [m + 1 for m in range(self.truncation + 1)]
        blocks: Dict[Tuple[int, int], RatMatrix] = {(m, m): d for m, d in enumerate(self.diagonal)}
        lower = self.kind.startswith("L")
        for m, off in enumerate(self.off_diagonal):
            blocks[(m + 1, m) if lower else (m, m + 1)] = off
        return BlockMatrix.build(sizes, sizes, blocks)


def block_factors(G: GammaSequence, k: int, T: int) -> Dict[str, BlockFactor]:
    """L0, L1, U0, U1 for the variable x_k, truncated to block rows 0..T.

    Raises:
        InsufficientDepth: unless Γ reaches index 2T+2.
    """
    if G.depth < 2 * T + 2:
        raise InsufficientDepth(2 * T + 2, G.depth, "block factors")
    eye = [RatMatrix.identity(m + 1) for m in range(T + 1)]
    supers = [L(m, k) for m in range(T)]
    return {
        "L0": BlockFactor("L0", k, eye, [gamma_hat(G, (0, 0), m, k) for m in range(1, T + 1)]),
        "L1": BlockFactor("L1", k, eye, [gamma_hat(G, (1, 1), m, k) for m in range(1, T + 1)]),
        "U0": BlockFactor("U0", k, [gamma_hat(G, (0, 1), m + 1, k) for m in range(T + 1)], supers),
        "U1": BlockFactor("U1", k, [gamma_hat(G, (1, 0), m, k) for m in range(T + 1)], supers),
    }


def factor_products(factors: Dict[str, BlockFactor], k: int) -> Dict[Parity, BlockMatrix]:
    """The four products keyed by the family whose Jacobi operator they equal."""
    m = {name: f.to_block_matrix() for name, f in factors.items()}
    return {
        (0, 0): m["L0"] @ m["U1"],
        (1, 1): m["U0"] @ m["L1"],
        first_partner(k): m["U1"] @ m["L0"],
        second_partner(k): m["L1"] @ m["U0"],
    }


# ── Verification suites ──────────────────────────────────────────


def verify_backlund(G: GammaSequence, decomp: QuadDecomposition, n_max: int) -> List[CheckRecord]:
    """Γ-built (D̂, Ĉ) against the three-term coefficients of each small family."""
    records: List[CheckRecord] = []
    for parity, fam in decomp.small.items():
        for k in (1, 2):
            for n in range(n_max + 1):
                D_hat, C_hat = backlund_coeffs(G, *parity, n, k)
                D, C = three_term(fam, n, k, verify=False)
                idx = {"family": list(parity), "n": n, "k": k}
                records.append(compare_matrices("backlund", "D_hat = D", idx, D_hat, D))
                records.append(compare_matrices("backlund", "C_hat = C", idx, C_hat, C))
    return records


def verify_small_three_term(G: GammaSequence, decomp: QuadDecomposition, n_max: int) -> List[CheckRecord]:
    """x_k P̂_n = L_{n,k} P̂_{n+1} + D̂ P̂_n + Ĉ P̂_{n-1} as polynomial identities."""
    records: List[CheckRecord] = []
    for parity, fam in decomp.small.items():
        for k in (1, 2):
            for n in range(min(n_max, fam.max_degree - 1) + 1):
                D_hat, C_hat = backlund_coeffs(G, *parity, n, k)
                records.append(
                    compare_vectors(
                        "backlund",
                        "x_k P_n = L P_n+1 + D_hat P_n + C_hat P_n-1",
                        {"family": list(parity), "n": n, "k": k},
                        fam.slice(n) * variable(k),
                        L(n, k) @ fam.slice(n + 1) + D_hat @ fam.slice(n) + C_hat @ fam.slice(n - 1),
                    )
                )
    return records


def verify_short_relations(G: GammaSequence, decomp: QuadDecomposition, n_max: int) -> List[CheckRecord]:
    """The four Γ̂ short relations between small families."""
    records: List[CheckRecord] = []
    small = decomp.small
    for k in (1, 2):
        a, b = first_partner(k), second_partner(k)
        xk = variable(k)
        for n in range(n_max + 1):
            idx = {"n": n, "k": k}
            records.append(
                compare_vectors(
                    "gamma_hat",
                    "P00_n = Pa_n + G00_n Pa_n-1",
                    idx,
                    small[(0, 0)].slice(n),
                    small[a].slice(n) + gamma_hat(G, (0, 0), n, k) @ small[a].slice(n - 1),
                )
            )
            if n >= 1:
                records.append(
                    compare_vectors(
                        "gamma_hat",
                        "x_k P11_n-1 = L_n-1 Pb_n + G01_n Pb_n-1",
                        idx,
                        small[(1, 1)].slice(n - 1) * xk,
                        L(n - 1, k) @ small[b].slice(n)
                        + gamma_hat(G, (0, 1), n, k) @ small[b].slice(n - 1),
                    )
                )
            records.append(
                compare_vectors(
                    "gamma_hat",
                    "Pb_n = P11_n + G11_n P11_n-1",
                    idx,
                    small[b].slice(n),
                    small[(1, 1)].slice(n) + gamma_hat(G, (1, 1), n, k) @ small[(1, 1)].slice(n - 1),
                )
            )
            if n < n_max:
                records.append(
                    compare_vectors(
                        "gamma_hat",
                        "x_k Pa_n = L_n P00_n+1 + G10_n P00_n",
                        idx,
                        small[a].slice(n) * xk,
                        L(n, k) @ small[(0, 0)].slice(n + 1)
                        + gamma_hat(G, (1, 0), n, k) @ small[(0, 0)].slice(n),
                    )
                )
    return records


def verify_big_family_relations(
    G: GammaSequence, decomp: QuadDecomposition, n_max: int
) -> List[CheckRecord]:
    """Short relations and three-term relations of the big families."""
    check = "big_family_relations"
    big = decomp.big_vector
    records: List[CheckRecord] = []
    for k in (1, 2):
        a, b = first_partner(k), second_partner(k)
        xk = variable(k)
        for n in range(n_max + 1):
            idx = {"n": n, "k": k}
            e, o = 2 * n, 2 * n + 1
            records.append(
                compare_vectors(
                    check,
                    "P00_n = L_2n Pa_n + G_2n Pa_n-1",
                    idx,
                    big((0, 0), n),
                    L(e, k) @ big(a, n) + G(e, k) @ big(a, n - 1),
                )
            )
            records.append(
                compare_vectors(
                    check,
                    "x_k P11_n-1 = L_2n Pb_n + G_2n Pb_n-1",
                    idx,
                    big((1, 1), n - 1) * xk,
                    L(e, k) @ big(b, n) + G(e, k) @ big(b, n - 1),
                )
            )
            records.append(
                compare_vectors(
                    check,
                    "Pb_n = L_2n+1 P11_n + G_2n+1 P11_n-1",
                    idx,
                    big(b, n),
                    L(o, k) @ big((1, 1), n) + G(o, k) @ big((1, 1), n - 1),
                )
            )
            records.append(
                compare_vectors(
                    check,
                    "x_k P11_n-1 three-term",
                    idx,
                    big((1, 1), n - 1) * xk,
                    L(e, k) @ L(o, k) @ big((1, 1), n)
                    + (L(e, k) @ G(o, k) + G(e, k) @ L(e - 1, k)) @ big((1, 1), n - 1)
                    + G(e, k) @ G(e - 1, k) @ big((1, 1), n - 2),
                )
            )
            if n == n_max:
                continue
            records.append(
                compare_vectors(
                    check,
                    "x_k Pa_n = L_2n+1 P00_n+1 + G_2n+1 P00_n",
                    idx,
                    big(a, n) * xk,
                    L(o, k) @ big((0, 0), n + 1) + G(o, k) @ big((0, 0), n),
                )
            )
            records.append(
                compare_vectors(
                    check,
                    "x_k P00_n three-term",
                    idx,
                    big((0, 0), n) * xk,
                    L(e, k) @ L(o, k) @ big((0, 0), n + 1)
                    + (L(e, k) @ G(o, k) + G(e, k) @ L(e - 1, k)) @ big((0, 0), n)
                    + G(e, k) @ G(e - 1, k) @ big((0, 0), n - 1),
                )
            )
            for parity in ((1, 0), (0, 1)):
                records.append(
                    compare_vectors(
                        check,
                        f"x_k P{parity[0]}{parity[1]}_n three-term",
                        idx,
                        big(parity, n) * xk,
                        L(o, k) @ L(o + 1, k) @ big(parity, n + 1)
                        + (L(o, k) @ G(o + 1, k) + G(o, k) @ L(e, k)) @ big(parity, n)
                        + G(o, k) @ G(e, k) @ big(parity, n - 1),
                    )
                )
    return records


def _connection_records(
    check: str,
    fam: MopsFamily,
    fam_star: MopsFamily,
    k: int,
    n: int,
    expected_m: RatMatrix,
    expected_n: RatMatrix,
    pair: str,
) -> List[CheckRecord]:
    a, b = (1, 0) if k == 1 else (0, 1)
    M, N = christoffel_connection(fam, fam_star, a, b, n)
    idx = {"pair": pair, "n": n, "k": k}
    return [
        compare_matrices(check, "M_n = Gamma_hat", idx, M, expected_m),
        compare_matrices(check, "N_n = Gamma_hat", idx, N, expected_n),
    ]


def verify_christoffel_connections(
    G: GammaSequence, decomp: QuadDecomposition, n_max: int
) -> List[CheckRecord]:
    """Connection matrices of the x_k-modified pairs against the matching Γ̂.

    For (0,0) → (2−k,k−1): M_n = Γ̂^{(0,0)}_{n,k}, N_n = Γ̂^{(1,0)}_{n,k}.
    For (k−1,2−k) → (1,1): M_n = Γ̂^{(1,1)}_{n,k}, N_n = Γ̂^{(0,1)}_{n+1,k}.
    The N check needs degree n+1 of the source family, so it stops one short.
    """
    check = "christoffel_connection"
    small = decomp.small
    records: List[CheckRecord] = []
    for k in (1, 2):
        a, b = first_partner(k), second_partner(k)
        for n in range(n_max):
            records.extend(
                _connection_records(
                    check,
                    small[(0, 0)],
                    small[a],
                    k,
                    n,
                    gamma_hat(G, (0, 0), n, k),
                    gamma_hat(G, (1, 0), n, k),
                    f"00->{a[0]}{a[1]}",
                )
            )
            records.extend(
                _connection_records(
                    check,
                    small[b],
                    small[(1, 1)],
                    k,
                    n,
                    gamma_hat(G, (1, 1), n, k),
                    gamma_hat(G, (0, 1), n + 1, k),
                    f"{b[0]}{b[1]}->11",
                )
            )
    return records


def verify_block_factors(G: GammaSequence, decomp: QuadDecomposition, T: int) -> List[CheckRecord]:
    """Compare the factor products with the Jacobi operators on blocks 0..T−1."""
    check = "lu_factorization"
    records: List[CheckRecord] = []
    for k in (1, 2):
        products = factor_products(block_factors(G, k, T), k)
        for parity, product in products.items():
            jacobi = block_jacobi(decomp.small[parity], k, T)
            for r in range(T):
                for c in range(T):
                    records.append(
                        compare_matrices(
                            check,
                            "factor product = block Jacobi",
                            {"family": list(parity), "k": k, "row": r, "col": c},
                            product.block(r, c),
                            jacobi.block(r, c),
                        )
                    )
    logger.debug("block factor records: %d", len(records), extra={"check": check})
    return records

