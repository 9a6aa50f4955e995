"""Tests for the quadratic decomposition of xy-symmetric families and its converse."""

from fractions import Fraction

import pytest

from src.errors import DecompositionMismatch, InsufficientDepth, NotQuasiDefinite, NotSymmetric
from src.momentbase import custom, simplex
from src.mops import MopsFamily, build_mops
from src.polynomial import BivariatePolynomial, PolyVector
from src.quadratic import (
    assemble_symmetric,
    big_size,
    decompose,
    factor,
    inflate,
    reconstruct_symmetric,
    shrink,
    small_functionals,
    verify_decomposition,
    xu_case_study,
    zip_split,
)
from src.verification import all_passed, failures

P = BivariatePolynomial
# small families live in (u, v); they are stored with x standing for u and y for v
u, v = P.x(), P.y()
zero = P.zero()


def _with_slice(fam: MopsFamily, n: int, vec: PolyVector) -> MopsFamily:
    slices = list(fam.slices)
    slices[n] = vec
    return MopsFamily(fam.functional, slices, list(fam.grams), "tampered")


# ── Zip split / shrink / inflate ─────────────────────────────────


class TestZipSplit:
    @pytest.mark.unit
    def test_keeps_lengths(self):
        a, b, c = P.monomial(2, 0), P.monomial(1, 1), P.monomial(0, 2)
        even, odd = zip_split(PolyVector([a, b, c]))
        assert even == PolyVector([a, zero, c])
        assert odd == PolyVector([zero, b, zero])

    @pytest.mark.unit
    def test_empty(self):
        even, odd = zip_split(PolyVector())
        assert len(even) == len(odd) == 0

    @pytest.mark.unit
    def test_big_sizes(self):
        assert big_size(0, 0, 1) == 3
        assert big_size(1, 1, 0) == 3
        assert big_size(1, 0, 2) == 6
        assert big_size(0, 0, -1) == 0
        assert big_size(1, 1, -1) == 1

    @pytest.mark.unit
    def test_factors(self):
        assert factor((0, 0)) == P.one()
        assert factor((1, 1)) == P.monomial(1, 1)
        assert factor((0, 1)) == P.monomial(0, 1)

    @pytest.mark.unit
    def test_shrink_then_inflate_restores_big_vector(self, square_decomposition):
        for parity in ((0, 0), (1, 1), (1, 0), (0, 1)):
            for n in range(4):
                big = square_decomposition.big_vector(parity, n)
                assert inflate(shrink(big, parity, n), parity, n) == big


# ── Decomposition ────────────────────────────────────────────────


class TestDecompose:
    @pytest.mark.unit
    def test_small_families_of_square(self, square_decomposition):
        small = square_decomposition.small
        third = Fraction(1, 3)
        assert small[(0, 0)].slice(1) == PolyVector([u - third, v - third])
        assert small[(1, 0)].slice(1) == PolyVector([u - Fraction(3, 5), v - third])
        assert small[(0, 1)].slice(1) == PolyVector([u - third, v - Fraction(3, 5)])
        assert small[(1, 1)].slice(0) == PolyVector([P.one()])

    @pytest.mark.unit
    def test_second_degree_is_a_tensor_product(self, square_decomposition):
        p2 = u * u - Fraction(6, 7) * u + Fraction(3, 35)
        q2 = v * v - Fraction(6, 7) * v + Fraction(3, 35)
        third = Fraction(1, 3)
        assert square_decomposition.small[(0, 0)].slice(2) == PolyVector(
            [p2, (u - third) * (v - third), q2]
        )

    @pytest.mark.unit
    def test_big_vectors_keep_zero_slots(self, square_decomposition):
        third = Fraction(1, 3)
        assert square_decomposition.big_vector((0, 0), 1) == PolyVector([u - third, zero, v - third])
        assert square_decomposition.big_vector((1, 1), 0) == PolyVector([zero, P.one(), zero])
        assert square_decomposition.big_vector((1, 1), -1) == PolyVector([zero])
        assert len(square_decomposition.big_vector((0, 0), -1)) == 0
        with pytest.raises(InsufficientDepth):
            square_decomposition.big_vector((0, 0), 4)

    @pytest.mark.unit
    def test_reconstruction(self, square_family, square_decomposition):
        for s in range(8):
            assert reconstruct_symmetric(square_decomposition, s) == square_family.slice(s)

    @pytest.mark.unit
    def test_verification_passes(self, square_decomposition):
        records = verify_decomposition(square_decomposition)
        assert records
        assert all_passed(records)
        identities = {r.identity for r in records}
        assert "mu(2i,2j) Phat_n = J P_n J^T" in identities
        assert "S_2n Gram = P00_n + P11_n-1" in identities

    @pytest.mark.unit
    def test_needs_depth(self, square_family):
        with pytest.raises(InsufficientDepth):
            decompose(square_family, 4)

    @pytest.mark.unit
    def test_needs_symmetry(self):
        fam = build_mops(simplex(0, 0, 0), 2)
        with pytest.raises(NotSymmetric):
            decompose(fam, 0)

    @pytest.mark.unit
    def test_wrong_parity_term(self, square_family):
        x, y = P.x(), P.y()
        s2 = square_family.slice(2)
        broken = _with_slice(square_family.truncated(2), 2, PolyVector([s2[0], x * y + x, s2[2]]))
        with pytest.raises(DecompositionMismatch) as info:
            decompose(broken, 0)
        assert info.value.witness()["entry"] == 1

    @pytest.mark.unit
    def test_extracted_family_must_match_pushforward(self, square_family):
        x = P.x()
        s2 = square_family.slice(2)
        half = Fraction(1, 2)
        broken = _with_slice(square_family.truncated(4), 2, PolyVector([x * x - half, s2[1], s2[2]]))
        with pytest.raises(DecompositionMismatch) as info:
            decompose(broken, 1)
        witness = info.value.witness()
        assert witness["family"] == [0, 0]
        assert witness["n"] == 1


# ── Assembly ─────────────────────────────────────────────────────


class TestAssemble:
    @pytest.mark.unit
    def test_small_functionals(self, square_push):
        fs = small_functionals(square_push)
        assert fs[(0, 0)] is square_push
        assert fs[(1, 0)].moment(1, 0) == Fraction(3, 5)
        assert fs[(1, 1)].moment(1, 1) == Fraction(9, 25)

    @pytest.mark.unit
    def test_round_trip_recovers_square_family(self, square_family, square_push):
        assembled = assemble_symmetric(square_push, 6)
        for s in range(7):
            assert assembled.symmetric.slice(s) == square_family.slice(s)
        assert all_passed(assembled.records)
        assert {r.check for r in assembled.records} == {"converse_roundtrip"}

    @pytest.mark.unit
    def test_degenerate_functional(self):
        # point mass at (1/2, 1/2)
        table = [(h, t - h, Fraction(1, 2 ** t)) for t in range(7) for h in range(t + 1)]
        with pytest.raises(NotQuasiDefinite) as info:
            assemble_symmetric(custom(table, description="point"), 2)
        assert info.value.degree == 1

    @pytest.mark.unit
    def test_negative_degree(self, square_push):
        with pytest.raises(ValueError):
            assemble_symmetric(square_push, -1)


# ── Ball / simplex case study ────────────────────────────────────


class TestCaseStudy:
    @pytest.mark.unit
    def test_disk_small_degree_one(self):
        study = xu_case_study(0, 1)
        assert study.mu == "0"
        assert study.records
        assert not failures(study.records)
        row = next(r for r in study.rows if r["symmetric"] == "S_{2,0}")
        assert row["polynomial"] == "u - 1/4"
        assert row["symmetric_polynomial"] == "x^2 - 1/4"
        assert row["factor"] == "1"
        assert row["weight"] == "u^(-1/2) v^(-1/2) (1-u-v)^(0)"
        assert "\\frac{1}{4}" in row["polynomial_latex"]

    @pytest.mark.unit
    def test_rows_cover_every_family(self):
        study = xu_case_study("1/2", 1)
        assert {r["family"] for r in study.rows} == {"(0,0)", "(1,1)", "(1,0)", "(0,1)"}
        # degrees 0 and 1 of four families: 1 + 2 entries each
        assert len(study.rows) == 4 * 3
        assert all(r["weight"].endswith("(1-u-v)^(1/2)") for r in study.rows)

    @pytest.mark.slow
    def test_deeper_disk(self):
        study = xu_case_study("-1/2", 3)
        assert not failures(study.records)
