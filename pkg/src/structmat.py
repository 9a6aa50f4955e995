"""
Structural 0/1 matrices L_{n,k} and J_n^{(i,j)}.

``L_{n,k}`` is the (n+1)×(n+2) selection with ``L_{n,k} 𝕏_{n+1} = x_k 𝕏_n``;
``J_n^{(i,j)}`` is the (n+1)×(2n+1+i+j) compaction with ones at ``(h, 2h+j)``.
Negative degrees give correctly shaped empty matrices.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, List

from .constants import PARITY_CLASSES
from .polynomial import BivariatePolynomial, PolyVector
from .ratlinalg import RatMatrix, format_rational, rank
from .verification import CheckRecord, compare_matrices, compare_vectors, flag_record

JBuilder = Callable[[int, int, int], RatMatrix]


@dataclass(frozen=True)
class LMatrix:
    n: int
    k: int
    matrix: RatMatrix


@dataclass(frozen=True)
class JMatrix:
    n: int
    i: int
    j: int
    matrix: RatMatrix


def _check_k(k: int) -> None:
    if k not in (1, 2):
        raise ValueError(f"variable index must be 1 or 2, got {k}")


def _check_parity(i: int, j: int) -> None:
    if i not in (0, 1) or j not in (0, 1):
        raise ValueError(f"parity flags must be 0 or 1, got ({i}, {j})")


@lru_cache(maxsize=None)
def build_L(n: int, k: int) -> LMatrix:
    """L_{n,1} = [I | 0], L_{n,2} = [0 | I]."""
    if n < 0:
        raise ValueError(f"degree must be >= 0, got {n}")
    _check_k(k)
    rows, cols = n + 1, n + 2
    entries = [0] * (rows * cols)
    for r in range(rows):
        entries[r * cols + r + k - 1] = 1
    return LMatrix(n, k, RatMatrix(rows, cols, tuple(entries)))  # type: ignore[arg-type]


@lru_cache(maxsize=None)
def build_J(n: int, i: int, j: int) -> JMatrix:
    if n < 0:
        raise ValueError(f"degree must be >= 0, got {n}")
    _check_parity(i, j)
    rows, cols = n + 1, 2 * n + 1 + i + j
    entries = [0] * (rows * cols)
    for h in range(rows):
        entries[h * cols + 2 * h + j] = 1
    return JMatrix(n, i, j, RatMatrix(rows, cols, tuple(entries)))  # type: ignore[arg-type]


def L(n: int, k: int) -> RatMatrix:
    """Matrix of L_{n,k}; empty (0×max(n+2,0)) for negative ``n``."""
    if n < 0:
        _check_k(k)
        return RatMatrix.zeros(0, n + 2)
    return build_L(n, k).matrix


def J(n: int, i: int, j: int) -> RatMatrix:
    """Matrix of J_n^{(i,j)}; empty for negative ``n``."""
    if n < 0:
        _check_parity(i, j)
        return RatMatrix.zeros(0, 2 * n + 1 + i + j)
    return build_J(n, i, j).matrix


# ── Identities ───────────────────────────────────────────────────


def verify_JL_identities(n_max: int, *, j_builder: JBuilder = J) -> List[CheckRecord]:
    """Check the four J–L identities for 0 ≤ n ≤ n_max and k ∈ {1, 2}.

    ``j_builder`` lets tests inject a corrupted J to make sure failures surface.
    """
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    records: List[CheckRecord] = []
    for n in range(n_max + 1):
        for k in (1, 2):
            idx = {"n": n, "k": k}
            a, b = 2 - k, k - 1
            records.append(
                compare_matrices(
                    "jl_identities",
                    "J00_n L_2n = J(2-k,k-1)_n",
                    idx,
                    j_builder(n, 0, 0) @ L(2 * n, k),
                    j_builder(n, a, b),
                )
            )
            records.append(
                compare_matrices(
                    "jl_identities",
                    "J11_n L_2n+2 = L_n J(k-1,2-k)_n+1",
                    idx,
                    j_builder(n, 1, 1) @ L(2 * n + 2, k),
                    L(n, k) @ j_builder(n + 1, b, a),
                )
            )
            records.append(
                compare_matrices(
                    "jl_identities",
                    "J(k-1,2-k)_n L_2n+1 = J11_n",
                    idx,
                    j_builder(n, b, a) @ L(2 * n + 1, k),
                    j_builder(n, 1, 1),
                )
            )
            records.append(
                compare_matrices(
                    "jl_identities",
                    "J(2-k,k-1)_n L_2n+1 = L_n J00_n+1",
                    idx,
                    j_builder(n, a, b) @ L(2 * n + 1, k),
                    L(n, k) @ j_builder(n + 1, 0, 0),
                )
            )
    return records


def verify_L_shift(n_max: int) -> List[CheckRecord]:
    """Check L_{n,k} 𝕏_{n+1} = x_k 𝕏_n as polynomial vectors."""
    records: List[CheckRecord] = []
    for n in range(n_max + 1):
        for k in (1, 2):
            xk = BivariatePolynomial.x() if k == 1 else BivariatePolynomial.y()
            records.append(
                compare_vectors(
                    "jl_identities",
                    "L_n X_n+1 = x_k X_n",
                    {"n": n, "k": k},
                    L(n, k) @ PolyVector.monomials(n + 1),
                    PolyVector.monomials(n) * xk,
                )
            )
    return records


def verify_structure(n_max: int, *, j_builder: JBuilder = J) -> List[CheckRecord]:
    """Rank of L_{n,k} and the shape of Jᵀ J for 0 ≤ n ≤ n_max.

    L_{n,k} has full row rank n+1; for every parity class J Jᵀ = I and Jᵀ J is
    a diagonal 0/1 projector with trace n+1.
    """
    records: List[CheckRecord] = []
    for n in range(n_max + 1):
        for k in (1, 2):
            rk = rank(L(n, k))
            records.append(
                flag_record(
                    "jl_identities",
                    "rank L_n,k = n+1",
                    {"n": n, "k": k},
                    rk == n + 1,
                    {"rank": rk, "expected": n + 1},
                )
            )
        for i, j in PARITY_CLASSES:
            jn = j_builder(n, i, j)
            idx = {"n": n, "family": [i, j]}
            records.append(
                compare_matrices(
                    "jl_identities", "J_n J_n^T = I", idx, jn @ jn.T, RatMatrix.identity(n + 1)
                )
            )
            proj = jn.T @ jn
            off_diagonal = [
                (r, c) for r in range(proj.rows) for c in range(proj.cols) if r != c and proj[r, c] != 0
            ]
            trace = sum((proj[d, d] for d in range(proj.rows)), Fraction(0))
            records.append(
                flag_record(
                    "jl_identities",
                    "J_n^T J_n diagonal with trace n+1",
                    idx,
                    not off_diagonal and trace == n + 1,
                    {"off_diagonal": [list(p) for p in off_diagonal], "trace": format_rational(trace)},
                )
            )
    return records
