"""Tests for linking forms, subgroup enumeration and orthogonal splittings."""

import random

import pytest
from sympy import Matrix, Rational as SymRational

from concordance.src.errors import DegenerateForm, GroupTooLarge
from concordance.src.exact_algebra import IntegerMatrix, rational
from concordance.src.linking_form import (Character, LinkingForm, Metabolizer,
                                          Subgroup,
                                          direct_sum, enumerate_metabolizers,
                                          from_presentation, from_seifert,
                                          has_metabolic_linking_form,
                                          is_prime_power, is_pure,
                                          isotropic_subgroups, min_generators,
                                          orthogonal_splittings, pair,
                                          prime_of, prime_power_characters,
                                          quotient_min_generators)
from concordance.src.settings import Settings


def random_presentation(rng: random.Random, n: int, max_det: int = 60) -> IntegerMatrix:
    """Random symmetric matrix with 1 < |det| <= max_det."""
    while True:
        rows = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                rows[i][j] = rows[j][i] = rng.randint(-6, 6)
        m = IntegerMatrix.of(rows, n)
        if 1 < abs(m.det()) <= max_det:
            return m


def frac(q) -> SymRational:
    return q - (q.p // q.q)


@pytest.fixture
def lf946(nine_forty_six) -> LinkingForm:
    """Z3 + Z3 with the hyperbolic pairing."""
    return from_seifert(nine_forty_six)


# ── Helpers ─────────────────────────────────────────────────────────────────


@pytest.mark.unit
@pytest.mark.parametrize("n,expected", [(1, False), (2, True), (9, True), (12, False), (125, True), (0, False)])
def test_is_prime_power(n, expected):
    """Prime powers exclude 1."""
    assert is_prime_power(n) is expected


@pytest.mark.unit
def test_prime_of():
    """prime_of returns p and rejects composites."""
    assert prime_of(27) == 3
    with pytest.raises(ValueError):
        prime_of(12)
    with pytest.raises(ValueError):
        prime_of(1)


# ── Construction ────────────────────────────────────────────────────────────


@pytest.mark.unit
class TestConstruction:
    """Building linking forms."""

    def test_nine_forty_six(self, lf946):
        """A + A^T = [[0, 3], [3, 0]] gives Z3 + Z3."""
        assert lf946.presentation.to_lists() == [[0, 3], [3, 0]]
        assert lf946.invariant_factors == (3, 3)
        assert lf946.order == 9
        assert lf946.exponent == 3
        assert min_generators(lf946) == 2

    def test_trefoil(self, trefoil):
        """The trefoil has H = Z3."""
        lf = from_seifert(trefoil)
        assert lf.invariant_factors == (3,)

    def test_not_symmetric(self):
        """Presentations must be symmetric."""
        with pytest.raises(ValueError, match="symmetric"):
            from_presentation(IntegerMatrix.of([[1, 2], [3, 4]]))

    def test_not_square(self):
        """Presentations must be square."""
        with pytest.raises(ValueError, match="square"):
            from_presentation(IntegerMatrix.of([[1, 2]]))

    def test_degenerate(self):
        """det(B) = 0 is refused."""
        with pytest.raises(DegenerateForm):
            from_presentation(IntegerMatrix.of([[1, 1], [1, 1]]))

    def test_unimodular_is_trivial(self):
        """A unimodular presentation gives the trivial group."""
        lf = from_presentation(IntegerMatrix.of([[0, 1], [1, 0]]))
        assert lf.order == 1
        assert lf.rank == 0
        assert list(lf.elements()) == [()]

    def test_element_length(self, lf946):
        """Elements need one coordinate per invariant factor."""
        with pytest.raises(ValueError):
            lf946.element([1])
        assert lf946.element([4, -1]) == (1, 2)


# ── Pairing ─────────────────────────────────────────────────────────────────


@pytest.mark.unit
class TestPairing:
    """The Q/Z valued pairing."""

    def test_hyperbolic_values(self, lf946):
        """The presentation basis pairs to 1/3 across and 0 on itself."""
        e = lf946.snf_element((1, 0))
        f = lf946.snf_element((0, 1))
        assert pair(lf946, e, f) == rational(1, 3)
        assert pair(lf946, e, e) == 0
        assert pair(lf946, f, f) == 0

    def test_cyclic(self):
        """Z9 presented by [9] has pair(1, 1) = 1/9."""
        lf = from_presentation(IntegerMatrix.of([[9]]))
        assert lf.pair((1,), (1,)) == rational(1, 9)
        assert lf.pair((3,), (3,)) == 0
        assert lf.character_values((2,)) == (rational(2, 9),)

    def test_character_value(self, lf946):
        """d * pair as an element of Z_d."""
        e = lf946.snf_element((1, 0))
        f = lf946.snf_element((0, 1))
        assert lf946.character_value(e, f, 3) == 1
        assert lf946.character_value(e, lf946.scale(2, f), 9) == 6

    def test_character_value_bad_level(self, lf946):
        """The level must be a multiple of the order of x."""
        e = lf946.snf_element((1, 0))
        f = lf946.snf_element((0, 1))
        with pytest.raises(ValueError, match="not a multiple"):
            lf946.character_value(e, f, 2)

    def test_vector_round_trip(self, lf946):
        """snf_element inverts presentation_vector."""
        for x in lf946.elements():
            assert lf946.snf_element(lf946.presentation_vector(x)) == x


@pytest.mark.property
def test_pairing_matches_inverse_matrix():
    """pair(x, y) = v_x^T B^-1 v_y mod 1 on 30 random presentations."""
    rng = random.Random(61)
    for _ in range(30):
        b = random_presentation(rng, rng.choice([1, 2, 3]))
        lf = from_presentation(b)
        inv = Matrix(b.to_lists()).inv()
        elems = list(lf.elements())
        sample = rng.sample(elems, min(len(elems), 12))
        for x in sample:
            for y in sample:
                vx = Matrix(lf.presentation_vector(x))
                vy = Matrix(lf.presentation_vector(y))
                expected = frac((vx.T * inv * vy)[0, 0])
                got = lf.pair(x, y)
                assert (int(got.numerator), int(got.denominator)) == (expected.p, expected.q)


@pytest.mark.property
def test_pairing_symmetric_and_nondegenerate():
    """Every nonzero element pairs nontrivially with something."""
    rng = random.Random(62)
    for _ in range(25):
        lf = from_presentation(random_presentation(rng, rng.choice([1, 2]), max_det=40))
        elems = list(lf.elements())
        for x in elems:
            assert all(lf.pair(x, y) == lf.pair(y, x) for y in elems)
            if x != lf.zero:
                assert any(lf.pair_scaled(x, y) for y in elems)


# ── Direct sums ─────────────────────────────────────────────────────────────


@pytest.mark.unit
class TestDirectSum:
    """Orthogonal direct sums and their injections."""

    def test_split_inverts_combine(self, trefoil, lf946):
        """(x, y) -> combine -> split is the identity."""
        ds = direct_sum(from_seifert(trefoil), lf946)
        assert ds.form.order == 27
        for x in ds.left.elements():
            for y in ds.right.elements():
                assert ds.split(ds.combine(x, y)) == (x, y)

    def test_injections_are_isometric_and_orthogonal(self, trefoil, lf946):
        """Summands keep their pairing and pair trivially with each other."""
        ds = direct_sum(from_seifert(trefoil), lf946)
        for x in ds.left.elements():
            for x2 in ds.left.elements():
                assert ds.form.pair(ds.inject_left(x), ds.inject_left(x2)) == ds.left.pair(x, x2)
            for y in ds.right.elements():
                assert ds.form.pair(ds.inject_left(x), ds.inject_right(y)) == 0


# ── Subgroups ───────────────────────────────────────────────────────────────


@pytest.mark.unit
class TestSubgroup:
    """Subgroup operations."""

    def test_elements_and_equality(self, lf946):
        """Subgroups compare by their element sets."""
        e = lf946.snf_element((1, 0))
        a = Subgroup(lf946, [e])
        b = Subgroup(lf946, [lf946.scale(2, e)])
        assert a == b
        assert len({a, b}) == 1
        assert a.order == 3
        assert e in a

    def test_perp(self, lf946):
        """<e> is its own orthogonal complement."""
        e = lf946.snf_element((1, 0))
        sub = Subgroup(lf946, [e])
        assert sub.perp() == sub
        assert sub.is_isotropic()
        assert not sub.is_nondegenerate()

    def test_whole_group(self, lf946):
        """The whole group is nondegenerate, not isotropic, 2-generated."""
        whole = lf946.whole()
        assert whole.order == 9
        assert whole.is_nondegenerate()
        assert not whole.is_isotropic()
        assert whole.min_generators == 2
        assert whole.p_rank(3) == 2
        assert whole.perp() == lf946.trivial()
        assert len(whole.canonical_generators()) == 2

    def test_is_pure(self, lf946):
        """<3> in Z9 is not a summand; <e> in Z3 + Z3 is."""
        z9 = from_presentation(IntegerMatrix.of([[9]]))
        assert not is_pure(Subgroup(z9, [(3,)]), z9.whole())
        assert is_pure(Subgroup(z9, [(1,)]), z9.whole())
        assert is_pure(Subgroup(lf946, [lf946.snf_element((1, 0))]), lf946.whole())

    def test_quotient_min_generators(self, lf946):
        """(Z3 + Z3) / Z3 needs one generator."""
        sub = Subgroup(lf946, [lf946.snf_element((1, 0))])
        assert quotient_min_generators(sub, lf946.whole(), 3) == 1

    def test_primary_parts(self):
        """Z15 splits as Z3 + Z5."""
        lf = from_presentation(IntegerMatrix.of([[3, 0], [0, 5]]))
        assert lf.primes() == [3, 5]
        assert lf.primary_part(3).order == 3
        assert lf.primary_part(5).order == 5

    def test_prime_power_characters(self):
        """Elements of order 15 are not prime-power characters."""
        lf = from_presentation(IntegerMatrix.of([[3, 0], [0, 5]]))
        chars = prime_power_characters(lf.whole())
        assert sorted(c.order for c in chars) == [3, 3, 5, 5, 5, 5]
        assert Character(chars[0].element, 3).prime == 3


# ── Enumeration ─────────────────────────────────────────────────────────────


@pytest.mark.unit
class TestEnumeration:
    """Isotropic subgroups and metabolizers."""

    def test_isotropic_subgroups(self, lf946):
        """Trivial, <e> and <f>."""
        subs = list(isotropic_subgroups(lf946))
        assert [s.order for s in subs] == [1, 3, 3]
        assert subs[0] == lf946.trivial()

    def test_metabolizers_of_nine_forty_six(self, lf946):
        """Exactly two metabolizers."""
        mets = enumerate_metabolizers(lf946)
        assert len(mets) == 2
        for m in mets:
            m.check()

    def test_metabolizer_check_rejects(self, lf946):
        """The trivial subgroup and the whole group are not metabolizers."""
        with pytest.raises(ValueError, match="metabolizer has order 1"):
            Metabolizer(lf946, []).check()
        gens = [lf946.snf_element((1, 0)), lf946.snf_element((0, 1))]
        with pytest.raises(ValueError, match="metabolizer has order 9"):
            Metabolizer(lf946, gens).check()

    def test_no_metabolizer_for_trefoil(self, trefoil):
        """Order 3 is not a square."""
        assert enumerate_metabolizers(from_seifert(trefoil)) == []
        assert not has_metabolic_linking_form(trefoil)

    def test_metabolic(self, nine_forty_six):
        """9_46 has a metabolic linking form."""
        assert has_metabolic_linking_form(nine_forty_six)

    def test_trivial_group(self):
        """The trivial group has the trivial metabolizer."""
        lf = from_presentation(IntegerMatrix.of([[1]]))
        assert len(enumerate_metabolizers(lf)) == 1

    def test_z9_has_one(self):
        """Z9 with pair(1, 1) = 1/9 is metabolized by <3>."""
        lf = from_presentation(IntegerMatrix.of([[9]]))
        mets = enumerate_metabolizers(lf)
        assert [sorted(m.elements) for m in mets] == [[(0,), (3,), (6,)]]

    def test_group_too_large(self, lf946):
        """Enumeration honors the bound."""
        with pytest.raises(GroupTooLarge):
            enumerate_metabolizers(lf946, Settings(enumeration_bound=5))
        with pytest.raises(GroupTooLarge):
            list(isotropic_subgroups(lf946, settings=Settings(enumeration_bound=5)))


def _brute_force_metabolizers(lf: LinkingForm) -> set:
    """Spans of at most two elements that are isotropic of square-root order."""
    found = set()
    elems = list(lf.elements())
    for i, x in enumerate(elems):
        for y in elems[i:]:
            sub = Subgroup(lf, [x, y])
            if sub.order**2 == lf.order and sub.is_isotropic():
                found.add(sub.elements)
    return found


@pytest.mark.property
def test_metabolizers_match_brute_force():
    """Two-generator presentations: enumeration equals exhaustive search."""
    rng = random.Random(64)
    for _ in range(40):
        lf = from_presentation(random_presentation(rng, 2, max_det=50))
        expected = _brute_force_metabolizers(lf)
        got = {m.elements for m in enumerate_metabolizers(lf)}
        assert got == expected
    for b in ([[0, 3], [3, 0]], [[4, 0], [0, 4]], [[2, 0], [0, 8]], [[0, 5], [5, 0]]):
        lf = from_presentation(IntegerMatrix.of(b))
        assert {m.elements for m in enumerate_metabolizers(lf)} == _brute_force_metabolizers(lf)


# ── Splittings ──────────────────────────────────────────────────────────────


@pytest.mark.unit
class TestOrthogonalSplittings:
    """beta1 + beta2 decompositions."""

    @pytest.mark.parametrize("r,count", [(0, 1), (1, 3), (2, 4)])
    def test_nine_forty_six(self, lf946, r, count):
        """Two anisotropic lines plus the trivial and whole subspaces."""
        assert len(list(orthogonal_splittings(lf946, r))) == count

    def test_negative_rank(self, lf946):
        """No splitting has a negative rank."""
        assert list(orthogonal_splittings(lf946, -1)) == []

    def test_complements(self, lf946):
        """beta2 is the orthogonal complement and the orders multiply."""
        for s in orthogonal_splittings(lf946, 2):
            assert s.beta1.order * s.beta2.order == 9
            assert s.beta2.is_nondegenerate()
            assert s.beta2_min_generators == s.beta2.min_generators

    def test_cyclic_prime_power(self):
        """Z9 splits only as 0 + Z9 and Z9 + 0."""
        lf = from_presentation(IntegerMatrix.of([[9]]))
        orders = sorted(s.beta1.order for s in orthogonal_splittings(lf, 1))
        assert orders == [1, 9]

    def test_two_primes(self):
        """Z3 + Z5 splits prime by prime."""
        lf = from_presentation(IntegerMatrix.of([[3, 0], [0, 5]]))
        splits = list(orthogonal_splittings(lf, 1))
        assert sorted(s.beta1.order for s in splits) == [1, 3, 5, 15]
        for s in splits:
            assert s.beta1.order * s.beta2.order == 15

    def test_trivial_group(self):
        """The trivial group has one splitting."""
        lf = from_presentation(IntegerMatrix.of([[1]]))
        splits = list(orthogonal_splittings(lf, 0))
        assert len(splits) == 1
        assert splits[0].beta2.order == 1


@pytest.mark.property
def test_rank_four_elementary_splittings(lf946):
    """In Z3^4 with r = 2 every beta2 still needs at least two generators."""
    ds = direct_sum(lf946, lf946)
    splits = list(orthogonal_splittings(ds.form, 2))
    assert splits
    for s in splits:
        assert s.beta2_min_generators >= 2
        assert s.beta2_min_generators + s.beta1.min_generators == 4
    for s in splits[:20]:
        assert s.beta2.order * s.beta1.order == 81
