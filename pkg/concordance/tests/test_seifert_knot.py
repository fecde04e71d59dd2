"""Tests for Seifert-matrix invariants: Alexander polynomial, signatures, Arf."""

import random

import pytest

from concordance.src.errors import ArfNonzero, DegeneratePairing, OmegaIsOne
from concordance.src.exact_algebra import (IntegerMatrix, SignatureResult,
                                           parse_root, root_of_unity)
from concordance.src.seifert_knot import (LaurentPoly, QuadraticRefinement,
                                          SeifertMatrix, alexander_polynomial,
                                          arf, arf_via_determinant, block_sum,
                                          classical_genus_lower_bound,
                                          evaluate_laurent, is_symplectic_basis,
                                          levine_tristram_profile, lt_form,
                                          lt_signature_nullity, mirror,
                                          reverse, seifert_genus,
                                          symplectic_basis,
                                          symplectic_basis_null_e)

J0 = [[3, 2], [1, 3]]


def random_seifert(rng: random.Random, size: int, moves: int = 3) -> SeifertMatrix:
    """A hyperbolic block sum plus a random symmetric matrix, moved by unimodular congruence."""
    rows = [[0] * size for _ in range(size)]
    for i in range(0, size, 2):
        rows[i][i + 1] = 1
    for i in range(size):
        for j in range(i, size):
            c = rng.randint(-2, 2)
            rows[i][j] += c
            if i != j:
                rows[j][i] += c
    m = IntegerMatrix.of(rows, size)
    for _ in range(moves):
        i, j = rng.sample(range(size), 2)
        p = [[int(r == c) for c in range(size)] for r in range(size)]
        p[i][j] = rng.choice([-1, 1])
        pm = IntegerMatrix.of(p, size)
        m = pm.transpose() @ m @ pm
    if any(abs(v) > 3 for row in m.entries for v in row):
        return SeifertMatrix(IntegerMatrix.of(rows, size))
    return SeifertMatrix(m)


# ── Seifert matrices ────────────────────────────────────────────────────────


@pytest.mark.unit
class TestSeifertMatrix:
    """Validation and constructions."""

    def test_non_square(self):
        """Non-square input is a ValueError."""
        with pytest.raises(ValueError, match="square"):
            SeifertMatrix(IntegerMatrix.of([[1, 2, 3], [4, 5, 6]]))

    def test_odd_size(self):
        """Odd sizes are a ValueError."""
        with pytest.raises(ValueError, match="even"):
            SeifertMatrix.of([[1]])

    def test_not_unimodular(self):
        """A symmetric matrix has A - A^T = 0."""
        with pytest.raises(DegeneratePairing):
            SeifertMatrix.of([[1, 0], [0, 1]])

    def test_unknot(self):
        """The empty matrix has genus 0 and trivial Alexander polynomial."""
        u = SeifertMatrix.unknot()
        assert u.size == 0
        assert seifert_genus(u) == 0
        assert alexander_polynomial(u).coeffs == (1,)
        assert arf(u) == 0

    def test_block_sum(self, trefoil, nine_forty_six):
        """Connected sum is the block sum, genus adds."""
        s = block_sum(trefoil, nine_forty_six)
        assert s.size == 4
        assert seifert_genus(s) == 2
        assert s.to_lists()[2:] == [[0, 0, 0, 1], [0, 0, 2, 0]]

    def test_mirror_and_reverse(self, trefoil):
        """Mirror negates, reverse transposes."""
        assert mirror(trefoil).to_lists() == [[1, -1], [0, 1]]
        assert reverse(trefoil).to_lists() == [[-1, 0], [1, -1]]


# ── Alexander polynomial ────────────────────────────────────────────────────


@pytest.mark.unit
class TestAlexanderPolynomial:
    """Normalized det(A - t A^T)."""

    @pytest.mark.parametrize(
        "rows,text",
        [
            ([[-1, 1], [0, -1]], "t^2 - t + 1"),
            ([[0, 1], [2, 0]], "2t^2 - 5t + 2"),
            (J0, "7t^2 - 13t + 7"),
        ],
    )
    def test_known_knots(self, rows, text):
        """Trefoil, 9_46 and the genus-one J0."""
        assert str(alexander_polynomial(SeifertMatrix.of(rows))) == text

    def test_sum_multiplies(self, trefoil):
        """Delta of a connected sum is the product."""
        poly = alexander_polynomial(block_sum(trefoil, trefoil))
        assert poly.coeffs == (1, -2, 3, -2, 1)

    def test_vanishes_at_sixth_root(self, trefoil):
        """The trefoil polynomial vanishes at exp(2 pi i / 6)."""
        value = evaluate_laurent(alexander_polynomial(trefoil), parse_root("1/6"))
        assert value.is_zero()

    @pytest.mark.property
    def test_random_symmetry(self):
        """Delta(1) = +-1 and the coefficients are palindromic."""
        rng = random.Random(11)
        for _ in range(30):
            poly = alexander_polynomial(random_seifert(rng, rng.choice([2, 4, 6])))
            assert abs(sum(poly.coeffs)) == 1
            assert poly.coeffs == tuple(reversed(poly.coeffs))


@pytest.mark.unit
class TestLaurentPoly:
    """Normalization up to units."""

    def test_from_terms(self):
        """Negative exponents are shifted away."""
        poly = LaurentPoly.from_terms({-1: 1, 0: -1, 1: 1})
        assert poly.coeffs == (1, -1, 1)
        assert poly.terms() == {0: 1, 1: -1, 2: 1}
        assert poly.degree == 2

    def test_sign_normalization(self):
        """The leading coefficient is made positive."""
        assert LaurentPoly((0, -2, 5, -2, 0)).coeffs == (2, -5, 2)

    def test_zero(self):
        """The zero polynomial prints as 0."""
        zero = LaurentPoly((0, 0))
        assert zero.is_zero()
        assert zero.degree == -1
        assert str(zero) == "0"
        assert str(LaurentPoly.from_terms({})) == "0"

    def test_str_with_constant(self):
        """Monomials with coefficient one omit the coefficient."""
        assert str(LaurentPoly((-1, 0, 1))) == "t^2 - 1"


# ── Levine-Tristram signatures ──────────────────────────────────────────────


@pytest.mark.unit
class TestLevineTristram:
    """Signatures and nullities at roots of unity."""

    @pytest.mark.parametrize(
        "point,expected",
        [("1/2", (-2, 0)), ("1/3", (-2, 0)), ("1/6", (-1, 1)), ("1/12", (0, 0))],
    )
    def test_trefoil(self, trefoil, point, expected):
        """The right-handed trefoil jumps at 60 degrees."""
        res = lt_signature_nullity(trefoil, parse_root(point))
        assert (res.signature, res.nullity) == expected

    def test_nine_forty_six(self, nine_forty_six):
        """9_46 has vanishing signature function."""
        for point in ("1/2", "1/3", "1/5", "2/5"):
            assert lt_signature_nullity(nine_forty_six, parse_root(point)) == SignatureResult(0, 0, 2)

    @pytest.mark.parametrize("point", ["1/2", "1/3", "1/5", "2/5", "1/15", "2/15", "4/15", "7/15"])
    def test_j0_positive(self, point):
        """J0 has signature +2 beyond its root near 21.8 degrees."""
        assert lt_signature_nullity(SeifertMatrix.of(J0), parse_root(point)).signature == 2

    def test_j0_small_angle(self):
        """J0 has signature 0 at 18 degrees."""
        assert lt_signature_nullity(SeifertMatrix.of(J0), parse_root("1/20")) == SignatureResult(0, 0, 2)

    def test_omega_one(self, trefoil):
        """w = 1 is rejected."""
        with pytest.raises(OmegaIsOne):
            lt_form(trefoil, root_of_unity(0, 1))

    def test_mirror_negates(self, trefoil):
        """sigma(-A) = -sigma(A)."""
        assert lt_signature_nullity(mirror(trefoil), parse_root("1/2")).signature == 2

    def test_reverse_preserves(self, trefoil):
        """sigma(A^T) = sigma(A)."""
        assert lt_signature_nullity(reverse(trefoil), parse_root("1/3")).signature == -2

    def test_profile(self, trefoil):
        """The 6th-root profile lists both primitive roots."""
        profile = levine_tristram_profile(trefoil, 6)
        assert [str(w) for w, _ in profile] == ["1/6", "5/6"]
        assert all(r == SignatureResult(-1, 1, 2) for _, r in profile)

    def test_profile_needs_d_at_least_two(self, trefoil):
        """d = 1 has no nontrivial roots."""
        with pytest.raises(OmegaIsOne):
            levine_tristram_profile(trefoil, 1)

    def test_genus_bound(self, trefoil):
        """The trefoil bound is 1, attained at -1."""
        bound, point = classical_genus_lower_bound(trefoil, [parse_root("1/2")])
        assert bound == 1
        assert str(point) == "1/2"

    def test_genus_bound_unknot(self):
        """No point gives a positive bound for the unknot."""
        assert classical_genus_lower_bound(SeifertMatrix.unknot(), [parse_root("1/2")]) == (0, None)


@pytest.mark.property
def test_conjugate_point_agrees():
    """sigma and eta at conj(w) equal those at w."""
    rng = random.Random(5)
    for _ in range(25):
        a = random_seifert(rng, rng.choice([2, 4]))
        d = rng.choice([3, 4, 5, 8])
        k = rng.choice([k for k in range(1, d) if root_of_unity(k, d).d == d])
        w = root_of_unity(k, d)
        assert lt_signature_nullity(a, w.conj()) == lt_signature_nullity(a, w)


@pytest.mark.property
def test_signature_additive_under_sum():
    """sigma(A + B) = sigma(A) + sigma(B) for block sums."""
    rng = random.Random(17)
    for _ in range(15):
        a, b = random_seifert(rng, 2), random_seifert(rng, 2)
        w = parse_root(rng.choice(["1/2", "1/3", "2/5"]))
        left = lt_signature_nullity(block_sum(a, b), w)
        sa, sb = lt_signature_nullity(a, w), lt_signature_nullity(b, w)
        assert left.signature == sa.signature + sb.signature
        assert left.nullity == sa.nullity + sb.nullity


# ── Arf invariant ───────────────────────────────────────────────────────────


@pytest.mark.unit
class TestArf:
    """Arf invariant and symplectic bases."""

    def test_trefoil(self, trefoil):
        """Arf(trefoil) = 1 by both methods."""
        assert arf(trefoil) == 1
        assert arf_via_determinant(trefoil) == 1

    def test_nine_forty_six(self, nine_forty_six):
        """Arf(9_46) = 0."""
        assert arf(nine_forty_six) == 0
        assert arf_via_determinant(nine_forty_six) == 0

    def test_null_e_basis_refused_for_arf_one(self, trefoil):
        """No symplectic basis with q(e_i) = 0 exists when Arf = 1."""
        with pytest.raises(ArfNonzero):
            symplectic_basis_null_e(trefoil)

    def test_null_e_basis_of_two_trefoils(self, trefoil):
        """T # T has Arf 0 although each pair of the standard basis has q = 1."""
        tt = block_sum(trefoil, trefoil)
        basis = symplectic_basis_null_e(tt)
        ref = QuadraticRefinement.from_seifert(tt)
        assert is_symplectic_basis(ref, basis)
        assert all(ref.q(e) == 0 for e, _ in basis)

    def test_symplectic_basis_of_nine_forty_six(self, nine_forty_six):
        """The Gram-Schmidt basis is symplectic."""
        ref = QuadraticRefinement.from_seifert(nine_forty_six)
        assert is_symplectic_basis(ref, symplectic_basis(ref))

    def test_is_symplectic_basis_rejects(self, nine_forty_six):
        """Wrong length or a non-dual pair fail the check."""
        ref = QuadraticRefinement.from_seifert(nine_forty_six)
        assert not is_symplectic_basis(ref, [])
        assert not is_symplectic_basis(ref, [((1, 0), (1, 0))])


@pytest.mark.property
def test_arf_methods_agree():
    """The basis formula and the determinant criterion agree on 60 random matrices."""
    rng = random.Random(2024)
    for _ in range(60):
        a = random_seifert(rng, rng.choice([2, 4, 6, 8]))
        assert arf(a) == arf_via_determinant(a)


@pytest.mark.property
def test_arf_majority_vote():
    """Arf = 1 iff q takes the value 1 on more than half of the vectors."""
    rng = random.Random(31)
    for _ in range(40):
        a = random_seifert(rng, rng.choice([2, 4, 6]))
        ref = QuadraticRefinement.from_seifert(a)
        ones = sum(ref.q(x) for x in ref.vectors())
        assert arf(a) == int(ones > 2 ** (a.size - 1))


@pytest.mark.property
def test_arf_congruence_invariant():
    """Arf(P^T A P) = Arf(A) for unimodular P."""
    rng = random.Random(77)
    for _ in range(30):
        a = random_seifert(rng, rng.choice([2, 4, 6]), moves=0)
        n = a.size
        p = [[int(r == c) for c in range(n)] for r in range(n)]
        i, j = rng.sample(range(n), 2)
        p[i][j] = rng.randint(-2, 2)
        pm = IntegerMatrix.of(p, n)
        moved = SeifertMatrix(pm.transpose() @ a.matrix @ pm)
        assert arf(moved) == arf(a)


@pytest.mark.property
def test_null_e_postconditions():
    """Arf-0 matrices get a symplectic basis with every q(e_i) = 0."""
    rng = random.Random(8)
    found = 0
    while found < 50:
        a = random_seifert(rng, rng.choice([2, 4, 6, 8]))
        if arf(a):
            continue
        ref = QuadraticRefinement.from_seifert(a)
        basis = symplectic_basis_null_e(a)
        assert is_symplectic_basis(ref, basis)
        assert all(ref.q(e) == 0 for e, _ in basis)
        found += 1


@pytest.mark.property
@pytest.mark.parametrize("size", [2, 4, 6])
def test_quadratic_refinement_identity(size):
    """q(x + y) = q(x) + q(y) + x.y for every pair of vectors."""
    a = random_seifert(random.Random(size), size)
    ref = QuadraticRefinement.from_seifert(a)
    vectors = list(ref.vectors())
    for x in vectors:
        for y in vectors:
            s = tuple((u + v) % 2 for u, v in zip(x, y))
            assert ref.q(s) == (ref.q(x) + ref.q(y) + ref.dot(x, y)) % 2
