"""
Quadratic decomposition of xy-symmetric MOPS.

An xy-symmetric family splits along the parity of its slice entries:

    𝕊_{2n}(x, y)   = ℙ_n^{(0,0)}(x², y²) + x y ℙ_{n-1}^{(1,1)}(x², y²)
    𝕊_{2n+1}(x, y) = x ℙ_n^{(1,0)}(x², y²) + y ℙ_n^{(0,1)}(x², y²)

The big vectors ℙ^{(i,j)} keep zeros at the other parity's slots; the small
vectors P̂_n^{(i,j)} = J_n^{(i,j)} ℙ_n^{(i,j)} are the MOPS of the pushforward
functionals. The converse assembles a symmetric MOPS from four small families.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Tuple

from .constants import PARITY_CLASSES
from .errors import DecompositionMismatch, InsufficientDepth, NotQuasiDefinite, NotSymmetric
from .momentbase import (
    MomentFunctional,
    ball,
    christoffel,
    gram,
    quad_pullback,
    quad_pushforward,
    simplex,
)
from .mops import MopsFamily, build_mops, parity_violations, verify_orthogonality
from .observability.logging import get_logger
from .polynomial import BivariatePolynomial, PolyVector
from .ratlinalg import RatMatrix, format_rational, is_positive_definite, parse_rational
from .structmat import J
from .verification import CheckRecord, compare_matrices, compare_vectors, flag_record

logger = get_logger("quadratic")

Parity = Tuple[int, int]

# symmetry factor carried by each parity class
FACTORS: Dict[Parity, Tuple[int, int]] = {(0, 0): (0, 0), (1, 1): (1, 1), (1, 0): (1, 0), (0, 1): (0, 1)}
FACTOR_NAMES: Dict[Parity, str] = {(0, 0): "1", (1, 1): "xy", (1, 0): "x", (0, 1): "y"}


def big_size(i: int, j: int, n: int) -> int:
    """Length of ℙ_n^{(i,j)}: 2n+1+i+j, clamped at 0."""
    return max(2 * n + 1 + i + j, 0)


def factor(parity: Parity) -> BivariatePolynomial:
    a, b = FACTORS[parity]
    return BivariatePolynomial.monomial(a, b)


@dataclass
class QuadDecomposition:
    """A symmetric family together with its four small and four big families."""

    symmetric: MopsFamily
    small: Dict[Parity, MopsFamily]
    big: Dict[Parity, List[PolyVector]]
    max_small_degree: int
    records: List[CheckRecord] = field(default_factory=list)

    def big_vector(self, parity: Parity, n: int) -> PolyVector:
        """ℙ_n^{(i,j)}; the zero vector of the right size for n < 0."""
        if n < 0:
            return PolyVector.zeros(big_size(*parity, n))
        if n > self.max_small_degree:
            raise InsufficientDepth(n, self.max_small_degree, f"big family {parity}")
        return self.big[parity][n]


# ── Zip split / shrink / inflate ─────────────────────────────────


def zip_split(v: PolyVector) -> Tuple[PolyVector, PolyVector]:
    """(even slots kept, odd slots kept); both have the original length."""
    zero = BivariatePolynomial.zero()
    even = PolyVector(p if idx % 2 == 0 else zero for idx, p in enumerate(v))
    odd = PolyVector(p if idx % 2 == 1 else zero for idx, p in enumerate(v))
    return even, odd


def _strip(vec: PolyVector, parity: Parity, where: str) -> PolyVector:
    """Divide every entry by the parity factor and substitute x² → u, y² → v."""
    a, b = FACTORS[parity]
    out = []
    for idx, p in enumerate(vec):
        quot, rem = p.divmod_monomial(a, b)
        if not rem.is_zero():
            raise DecompositionMismatch(
                f"{where}: entry {idx} is not divisible by {FACTOR_NAMES[parity]}",
                {"entry": idx, "remainder": rem.to_triples()},
            )
        try:
            out.append(quot.halve_exponents())
        except ValueError as exc:
            raise DecompositionMismatch(
                f"{where}: entry {idx} is not a polynomial in x², y²",
                {"entry": idx, "polynomial": p.to_triples()},
            ) from exc
    return PolyVector(out)


def shrink(big: PolyVector, parity: Parity, n: int) -> PolyVector:
    return J(n, *parity) @ big


def inflate(small: PolyVector, parity: Parity, n: int) -> PolyVector:
    return J(n, *parity).T @ small


def extract_big_families(symfam: MopsFamily, N: int) -> Dict[Parity, List[PolyVector]]:
    """Big vectors ℙ_n^{(i,j)}, n = 0..N, read off 𝕊_0..𝕊_{2N+2}."""
    symfam.require(2 * N + 2)
    big: Dict[Parity, List[PolyVector]] = {p: [] for p in PARITY_CLASSES}
    for n in range(N + 1):
        even, _ = zip_split(symfam.slice(2 * n))
        big[(0, 0)].append(_strip(even, (0, 0), f"S_{2 * n}"))
        _, odd = zip_split(symfam.slice(2 * n + 2))
        big[(1, 1)].append(_strip(odd, (1, 1), f"S_{2 * n + 2}"))
        even, odd = zip_split(symfam.slice(2 * n + 1))
        big[(1, 0)].append(_strip(even, (1, 0), f"S_{2 * n + 1}"))
        big[(0, 1)].append(_strip(odd, (0, 1), f"S_{2 * n + 1}"))
    return big


def reconstruct_symmetric(decomp: QuadDecomposition, s: int) -> PolyVector:
    """Rebuild 𝕊_s from the big families."""
    if s % 2 == 0:
        n = s // 2
        return decomp.big_vector((0, 0), n).double_exponents() + (
            decomp.big_vector((1, 1), n - 1).double_exponents() * factor((1, 1))
        )
    n = (s - 1) // 2
    return decomp.big_vector((1, 0), n).double_exponents() * factor((1, 0)) + (
        decomp.big_vector((0, 1), n).double_exponents() * factor((0, 1))
    )


def _reconstructible(decomp: QuadDecomposition, s: int) -> bool:
    m = decomp.max_small_degree
    if s % 2 == 0:
        return s // 2 <= m and s // 2 - 1 <= m
    return (s - 1) // 2 <= m


# ── Decomposition ────────────────────────────────────────────────


def decompose(symfam: MopsFamily, N: int) -> QuadDecomposition:
    """Split an xy-symmetric family into its four small families up to degree N.

    The family must reach degree 2N+2, since P̂_N^{(1,1)} lives in 𝕊_{2N+2}.

    Raises:
        NotSymmetric: if the functional is not xy-symmetric.
        InsufficientDepth: if the family is too shallow.
        DecompositionMismatch: if an extracted small family differs from the
            MOPS of the corresponding pushforward functional.
    """
    F = symfam.functional
    if not F.is_xy_symmetric:
        raise NotSymmetric(f"decomposition needs an xy-symmetric functional, got {F}")
    symfam.require(2 * N + 2)
    big = extract_big_families(symfam, N)
    small: Dict[Parity, MopsFamily] = {}
    for parity in PARITY_CLASSES:
        push = quad_pushforward(F, *parity)
        reference = build_mops(push, N, label=f"P{parity[0]}{parity[1]}[{F.description}]")
        extracted = [shrink(big[parity][n], parity, n) for n in range(N + 1)]
        for n, vec in enumerate(extracted):
            if vec != reference.slice(n):
                raise DecompositionMismatch(
                    f"small family {parity} differs from the pushforward MOPS at degree {n}",
                    {
                        "family": list(parity),
                        "n": n,
                        "difference": (vec - reference.slice(n)).to_triples(),
                    },
                )
        small[parity] = reference
    logger.info(
        "decomposed %s to small degree %d",
        symfam.label,
        N,
        extra={"family": symfam.label, "degree": N},
    )
    return QuadDecomposition(symfam, small, big, N)


def verify_decomposition(decomp: QuadDecomposition, check: str = "decomposition") -> List[CheckRecord]:
    """Reconstruction, Gram shrink, zero-slot and Gram split records."""
    F = decomp.symmetric.functional
    records: List[CheckRecord] = []
    for s in range(decomp.symmetric.max_degree + 1):
        if not _reconstructible(decomp, s):
            continue
        records.append(
            compare_vectors(
                check,
                "S_n = reconstruction from big families",
                {"n": s},
                decomp.symmetric.slice(s),
                reconstruct_symmetric(decomp, s),
            )
        )

    lifted: Dict[Tuple[Parity, int], RatMatrix] = {}
    for parity in PARITY_CLASSES:
        scale = F.moment(2 * parity[0], 2 * parity[1])
        fac = factor(parity)
        for n in range(decomp.max_small_degree + 1):
            idx = {"family": list(parity), "n": n}
            big_vec = decomp.big_vector(parity, n).double_exponents() * fac
            big_gram = gram(F, big_vec, big_vec)
            lifted[(parity, n)] = big_gram
            jn = J(n, *parity)
            records.append(
                compare_matrices(
                    check,
                    "mu(2i,2j) Phat_n = J P_n J^T",
                    idx,
                    decomp.small[parity].gram_matrix(n) * scale,
                    jn @ big_gram @ jn.T,
                )
            )
            zero_slots = [t for t in range(big_size(*parity, n)) if t % 2 != parity[1]]
            leak = [
                [t, u]
                for t in zero_slots
                for u in range(big_gram.cols)
                if big_gram[t, u] != 0 or big_gram[u, t] != 0
            ]
            records.append(
                flag_record(check, "big Gram zero at empty slots", idx, not leak, {"entries": leak})
            )

    m = decomp.max_small_degree
    for n in range(m + 1):
        s_gram = decomp.symmetric.gram_matrix(2 * n)
        prev = (
            lifted[((1, 1), n - 1)]
            if n >= 1
            else RatMatrix.zeros(s_gram.rows, s_gram.cols)
        )
        records.append(
            compare_matrices(
                check, "S_2n Gram = P00_n + P11_n-1", {"n": n}, s_gram, lifted[((0, 0), n)] + prev
            )
        )
        records.append(
            compare_matrices(
                check,
                "S_2n+1 Gram = P10_n + P01_n",
                {"n": n},
                decomp.symmetric.gram_matrix(2 * n + 1),
                lifted[((1, 0), n)] + lifted[((0, 1), n)],
            )
        )

    bad = parity_violations(decomp.symmetric)
    records.append(flag_record(check, "parity structure of S_n", {}, not bad, {"violations": bad}))
    return records


# ── Assembly ──────────────────────────────────────────────────────


def small_functionals(G: MomentFunctional) -> Dict[Parity, MomentFunctional]:
    """Ŵ, uŴ, vŴ and uvŴ as moment functionals."""
    g10 = christoffel(G, 1, 0)
    return {
        (0, 0): G,
        (1, 0): g10,
        (0, 1): christoffel(G, 0, 1),
        (1, 1): christoffel(g10, 0, 1),
    }


def assemble_symmetric(G: MomentFunctional, N: int) -> QuadDecomposition:
    """Assemble the symmetric MOPS of quad_pullback(G) through degree N.

    Raises:
        NotQuasiDefinite: naming the modification whose MOPS does not exist.
    """
    if N < 0:
        raise ValueError(f"max degree must be >= 0, got {N}")
    m = (N + 1) // 2
    small: Dict[Parity, MopsFamily] = {}
    for parity, functional in small_functionals(G).items():
        label = f"{FACTOR_NAMES[parity]}*G[{G.description}]"
        small[parity] = build_mops(functional, m, label=label)
    big = {
        parity: [inflate(fam.slice(n), parity, n) for n in range(m + 1)]
        for parity, fam in small.items()
    }
    pulled = quad_pullback(G)
    shell = QuadDecomposition(MopsFamily(pulled, [], [], ""), small, big, m)
    slices = [reconstruct_symmetric(shell, s) for s in range(N + 1)]
    grams = []
    for s, vec in enumerate(slices):
        h = gram(pulled, vec, vec)
        if not is_positive_definite(h):
            raise NotQuasiDefinite(s, pulled.description, "assembled Gram matrix not positive definite")
        grams.append(h)
    symfam = MopsFamily(pulled, slices, grams, f"assembled[{G.description}]")
    decomp = QuadDecomposition(symfam, small, big, m)
    decomp.records = verify_orthogonality(symfam, check="converse_roundtrip")
    return decomp


# ── Ball / simplex case study ────────────────────────────────────

_XU_EXPONENTS: Dict[Parity, Tuple[str, str]] = {
    (0, 0): ("-1/2", "-1/2"),
    (1, 0): ("1/2", "-1/2"),
    (0, 1): ("-1/2", "1/2"),
    (1, 1): ("1/2", "1/2"),
}


def _weight_label(parity: Parity, mu: str) -> str:
    a, b = _XU_EXPONENTS[parity]
    return f"u^({a}) v^({b}) (1-u-v)^({mu})"


def _row_label(parity: Parity, n: int, k: int) -> Tuple[str, Tuple[int, int]]:
    """Symmetric-family entry carrying P̂_{n,k}^{(i,j)}."""
    if parity == (0, 0):
        return f"S_{{{2 * n},{2 * k}}}", (2 * n, 2 * k)
    if parity == (1, 1):
        return f"S_{{{2 * n + 2},{2 * k + 1}}}", (2 * n + 2, 2 * k + 1)
    if parity == (1, 0):
        return f"S_{{{2 * n + 1},{2 * k}}}", (2 * n + 1, 2 * k)
    return f"S_{{{2 * n + 1},{2 * k + 1}}}", (2 * n + 1, 2 * k + 1)


@dataclass
class XuCaseStudy:
    mu: str
    max_degree: int
    decomposition: QuadDecomposition
    records: List[CheckRecord]
    rows: List[Dict[str, Any]]


def xu_case_study(mu: Any, N: int, check: str = "xu_case_study") -> XuCaseStudy:
    """Even-even ball polynomials against simplex polynomials, plus the three leftovers.

    Checks S_{2n,2k}(x, y) = P_{n,k}(x², y²) for n ≤ N, where P is the MOPS of
    (uv)^{-1/2}(1-u-v)^μ, and certifies the other three small families as the
    MOPS of the simplex weights with exponents ±1/2.
    """
    ball_f = ball(mu)
    mu_text = format_rational(parse_rational(mu))
    symfam = build_mops(ball_f, 2 * N + 2)
    decomp = decompose(symfam, N)
    records: List[CheckRecord] = []

    even_simplex = build_mops(simplex("-1/2", "-1/2", mu_text), N)
    for n in range(N + 1):
        for k in range(n + 1):
            records.append(
                compare_vectors(
                    check,
                    "S_2n,2k(x,y) = P_n,k(x^2,y^2)",
                    {"n": n, "k": k},
                    PolyVector([symfam.slice(2 * n)[2 * k]]),
                    PolyVector([even_simplex.slice(n)[k].double_exponents()]),
                )
            )

    for parity in ((1, 0), (0, 1), (1, 1)):
        a, b = _XU_EXPONENTS[parity]
        weight = simplex(a, b, mu_text)
        target = build_mops(weight, N)
        extracted = decomp.small[parity]
        for n in range(N + 1):
            records.append(
                compare_vectors(
                    check,
                    "leftover family = simplex MOPS",
                    {"family": list(parity), "n": n},
                    extracted.slice(n),
                    target.slice(n),
                )
            )
        certified = MopsFamily(
            weight,
            list(extracted.slices),
            [gram(weight, v, v) for v in extracted.slices],
            _weight_label(parity, mu_text),
        )
        records.extend(verify_orthogonality(certified, check=check))

    rows: List[Dict[str, Any]] = []
    for n in range(N + 1):
        for parity in PARITY_CLASSES:
            vec = decomp.small[parity].slice(n)
            for k, p in enumerate(vec):
                label, (s, e) = _row_label(parity, n, k)
                rows.append(
                    {
                        "symmetric": label,
                        "factor": FACTOR_NAMES[parity],
                        "family": f"({parity[0]},{parity[1]})",
                        "weight": _weight_label(parity, mu_text),
                        "polynomial": p.format(("u", "v")),
                        "polynomial_latex": p.latex(("u", "v")),
                        "symmetric_polynomial": symfam.slice(s)[e].format(),
                    }
                )
    logger.info("case study mu=%s N=%d: %d records", mu_text, N, len(records))
    return XuCaseStudy(mu_text, N, decomp, records, rows)

