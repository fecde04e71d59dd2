"""Tests for Casson-Gordon values of winding-number-zero satellites."""

from itertools import permutations, product

import pytest

from concordance.src.casson_gordon import (CGTerm, CGValue, ConnectedSumNode,
                                           InfectionSite, PatternBaseTable,
                                           PatternNode, companion_lt,
                                           companion_seifert,
                                           connected_sum_sigma_eta,
                                           general_winding_bookkeeping,
                                           infect, lift_predicate,
                                           satellite_sigma_eta)
from concordance.src.errors import (MissingBaseEntry, NotPrimePower,
                                    WindingNonZero)
from concordance.src.exact_algebra import IntegerMatrix, SignatureResult
from concordance.src.linking_form import from_presentation, from_seifert
from concordance.src.seifert_knot import SeifertMatrix, block_sum

J0 = SeifertMatrix.of([[3, 2], [1, 3]])


def hyperbolic_labels(lf, first: str, second: str) -> dict:
    return {first: lf.snf_element((1, 0)), second: lf.snf_element((0, 1))}


@pytest.fixture
def r_table(nine_forty_six) -> PatternBaseTable:
    """Zero base table of 9_46 with labels e and f."""
    lf = from_seifert(nine_forty_six)
    return PatternBaseTable.zero(lf, hyperbolic_labels(lf, "e", "f"), pattern=nine_forty_six)


@pytest.fixture
def rj(r_table) -> PatternNode:
    """9_46 infected by J0 along both bands, each band lifting to itself twice."""
    sites = (
        InfectionSite("e", "J", J0, lift_curves=({"e": 1}, {"e": 1})),
        InfectionSite("f", "J", J0, lift_curves=({"f": 1}, {"f": 1})),
    )
    return PatternNode(r_table, sites)


@pytest.fixture
def genus_two_pattern(nine_forty_six) -> PatternBaseTable:
    """9_46 # R' with labels e1, f1, e2, f2 and summand indices 1 and 2."""
    r2 = SeifertMatrix.of([[0, 2], [3, 0]])
    lf1, lf2 = from_seifert(nine_forty_six), from_seifert(r2)
    t1 = PatternBaseTable.zero(lf1, hyperbolic_labels(lf1, "e1", "f1"), pattern=nine_forty_six)
    t2 = PatternBaseTable.zero(lf2, hyperbolic_labels(lf2, "e2", "f2"), pattern=r2)
    return t1.connected_sum(t2)


# ── Values ──────────────────────────────────────────────────────────────────


@pytest.mark.unit
class TestCGValue:
    """Value objects and the connected-sum rule."""

    def test_negative_nullity(self):
        """Nullities are non-negative."""
        with pytest.raises(ValueError):
            CGValue(0, -1)

    def test_equality_ignores_terms(self):
        """Breakdowns do not affect equality."""
        term = CGTerm("base", "R", 0, 0, summand=1)
        assert CGValue(2, 1, (term,)) == CGValue(2, 1)

    def test_to_dict(self):
        """Rationals are rendered as strings."""
        assert CGValue("3/2", 0).to_dict()["sigma"] == "3/2"
        assert CGValue(0, 0).sigma_formula() == "0"

    @pytest.mark.parametrize(
        "a_trivial,b_trivial,bump",
        [(True, True, 0), (True, False, 0), (False, True, 0), (False, False, 1)],
    )
    def test_connected_sum_bump(self, a_trivial, b_trivial, bump):
        """Nullity gains 1 only when both characters are nontrivial."""
        out = connected_sum_sigma_eta(CGValue(1, 2), a_trivial, CGValue(3, 4), b_trivial)
        assert out == CGValue(4, 6 + bump)


# ── Base tables ─────────────────────────────────────────────────────────────


@pytest.mark.unit
class TestPatternBaseTable:
    """Validation and lookups."""

    def test_missing_zero_entry(self, r_table):
        """The trivial character must be present."""
        entries = {x: v for x, v in r_table.entries.items() if x != r_table.form.zero}
        with pytest.raises(MissingBaseEntry):
            PatternBaseTable("R", r_table.form, r_table.labels, entries)

    def test_missing_negative(self, r_table):
        """chi and -chi come together."""
        e = r_table.labels["e"]
        entries = {r_table.form.zero: CGValue(0, 0), e: CGValue(0, 0)}
        with pytest.raises(ValueError, match="negative"):
            PatternBaseTable("R", r_table.form, r_table.labels, entries)

    def test_negative_must_agree(self, r_table):
        """chi and -chi have equal values."""
        e = r_table.labels["e"]
        entries = {r_table.form.zero: CGValue(0, 0), e: CGValue(1, 0), r_table.form.neg(e): CGValue(2, 0)}
        with pytest.raises(ValueError, match="differs"):
            PatternBaseTable("R", r_table.form, r_table.labels, entries)

    def test_unreduced_label(self, r_table):
        """Labels must be reduced elements."""
        with pytest.raises(ValueError, match="reduced"):
            PatternBaseTable("R", r_table.form, {"e": (4, 0)}, dict(r_table.entries))

    def test_lookup_missing(self, r_table):
        """A character outside the table raises MissingBaseEntry."""
        partial = PatternBaseTable("R", r_table.form, r_table.labels, {r_table.form.zero: CGValue(0, 0)})
        with pytest.raises(MissingBaseEntry):
            partial.lookup(r_table.labels["e"])

    def test_curve_value(self, r_table):
        """chi = e takes 0 on e and 1 on f at d = 3."""
        e = r_table.labels["e"]
        assert r_table.curve_value(e, {"e": 1}, 3) == 0
        assert r_table.curve_value(e, {"f": 1}, 3) == 1
        assert r_table.curve_value(e, {"f": 2, "e": 5}, 3) == 2

    def test_curve_value_unknown_label(self, r_table):
        """Undefined curve labels are a KeyError."""
        with pytest.raises(KeyError):
            r_table.curve_value(r_table.form.zero, {"g": 1}, 3)

    def test_curve_symbols(self, genus_two_pattern):
        """Summand indices follow the connected sum."""
        assert genus_two_pattern.curve_symbol({"f1": 1, "e2": -1}) == "χ1(f1)-χ2(e2)"
        assert genus_two_pattern.curve_symbol({"e1": 2}) == "2χ1(e1)"
        assert genus_two_pattern.curve_symbol({"e1": 0}) == "0"

    def test_connected_sum_table(self, genus_two_pattern):
        """The sum table covers Z3^2 + Z3 + Z5 groups with correction bumps."""
        form = genus_two_pattern.form
        assert form.order == 225
        assert genus_two_pattern.summands == 2
        assert genus_two_pattern.pattern.size == 4
        e1, e2 = genus_two_pattern.labels["e1"], genus_two_pattern.labels["e2"]
        assert genus_two_pattern.lookup(e1).eta == 0
        assert genus_two_pattern.lookup(form.add(e1, e2)).eta == 1

    def test_connected_sum_label_clash(self, r_table):
        """Summands must use distinct curve labels."""
        with pytest.raises(ValueError, match="both summands"):
            r_table.connected_sum(r_table)


# ── Infection sites ─────────────────────────────────────────────────────────


@pytest.mark.unit
class TestInfectionSite:
    """Site validation."""

    def test_nonzero_winding(self):
        """Winding numbers other than 0 are refused."""
        with pytest.raises(WindingNonZero):
            InfectionSite("e", "J", J0, lift_values=(0, 0), winding=1)

    def test_exactly_one_lift_kind(self):
        """Curves and fixed values are exclusive."""
        with pytest.raises(ValueError, match="exactly one"):
            InfectionSite("e", "J", J0, lift_curves=({"e": 1}, {"e": 1}), lift_values=(1, 1))
        with pytest.raises(ValueError, match="exactly one"):
            InfectionSite("e", "J", J0)

    def test_two_lifts(self):
        """A 2-fold cover has two lifts."""
        with pytest.raises(ValueError, match="two lifts"):
            InfectionSite("e", "J", J0, lift_values=(1, 1, 1))


# ── Satellite values ────────────────────────────────────────────────────────


@pytest.mark.unit
class TestSatelliteValues:
    """satellite_sigma_eta on small trees."""

    def test_band_character(self, rj):
        """chi = e sees J0 only through the f band: 2 * sigma_J0(w3) = 4."""
        e = rj.base.labels["e"]
        value = satellite_sigma_eta(rj, e, 3)
        assert value == CGValue(4, 0)
        assert value.sigma_formula() == "σ(R,χ1) + 2σ_J(ω^{χ1(e)}) + 2σ_J(ω^{χ1(f)})"
        assert value.eta_formula() == "η(R,χ1)"

    def test_diagonal_character(self, rj):
        """chi = e + f is nontrivial on both bands."""
        chi = rj.form.add(rj.base.labels["e"], rj.base.labels["f"])
        assert satellite_sigma_eta(rj, chi, 3) == CGValue(8, 0)

    def test_trivial_character(self, rj):
        """The trivial character only sees the base table."""
        assert satellite_sigma_eta(rj, rj.form.zero, 3) == CGValue(0, 0)

    def test_genus_two_character(self, genus_two_pattern):
        """chi = e1 is nontrivial only on the f1 - e2 band."""
        jj = block_sum(J0, J0)
        sites = (
            InfectionSite("eta1", "J1", jj, lift_curves=({"e1": 1}, {"e1": 1})),
            InfectionSite("eta3", "J3", jj, lift_curves=({"f2": 1}, {"f2": 1})),
            InfectionSite("eta2", "J2", jj, lift_curves=({"f1": 1, "e2": -1}, {"f1": 1, "e2": -1})),
        )
        node = PatternNode(genus_two_pattern, sites)
        value = satellite_sigma_eta(node, genus_two_pattern.labels["e1"], 3)
        assert value == CGValue(8, 0)
        assert "2σ_J2(ω^{χ1(f1)-χ2(e2)})" in value.sigma_formula()

    def test_lift_values(self, r_table):
        """Fixed lift exponents bypass the character."""
        site = InfectionSite("x", "J", J0, lift_values=(1, 0))
        node = PatternNode(r_table, (site,))
        assert satellite_sigma_eta(node, r_table.form.zero, 3) == CGValue(2, 0)

    def test_unknot_companion(self, nine_forty_six):
        """Infecting by the unknot leaves the base values unchanged."""
        lf = from_seifert(nine_forty_six)
        entries = {
            x: PatternBaseTable.base_value("R", sum(1 for c in x if c), 0) for x in lf.elements()
        }
        table = PatternBaseTable("R", lf, hyperbolic_labels(lf, "e", "f"), entries)
        site = InfectionSite("e", "U", SeifertMatrix.unknot(), lift_curves=({"e": 1}, {"f": 1}))
        node = PatternNode(table, (site,))
        for x in lf.elements():
            assert satellite_sigma_eta(node, x, 3) == table.lookup(x)

    def test_cover_degree(self, rj):
        """Only 2-fold covers have the closed formula."""
        with pytest.raises(ValueError, match="2-fold"):
            satellite_sigma_eta(rj, rj.form.zero, 3, n=3)

    def test_level_not_prime_power(self, rj):
        """d must be a prime power."""
        with pytest.raises(NotPrimePower):
            satellite_sigma_eta(rj, rj.form.zero, 6)

    def test_order_must_divide_level(self, rj):
        """An order-3 character cannot be evaluated at d = 2."""
        with pytest.raises(ValueError, match="does not divide"):
            satellite_sigma_eta(rj, rj.base.labels["e"], 2)

    def test_missing_base_entry(self, r_table):
        """A base table without the character raises MissingBaseEntry."""
        partial = PatternBaseTable("R", r_table.form, r_table.labels, {r_table.form.zero: CGValue(0, 0)})
        with pytest.raises(MissingBaseEntry):
            satellite_sigma_eta(PatternNode(partial), r_table.labels["e"], 3)


@pytest.mark.unit
@pytest.mark.parametrize("pattern", [p for p in product((0, 1), repeat=3) if any(p)])
def test_triple_sum_triviality_patterns(rj, pattern):
    """Nullity picks up one correction per nontrivial summand beyond the first."""
    inner = ConnectedSumNode(rj, rj)
    tree = ConnectedSumNode(inner, rj)
    e = rj.base.labels["e"]
    chis = [e if bit else rj.form.zero for bit in pattern]
    chi = tree.direct.combine(inner.direct.combine(chis[0], chis[1]), chis[2])
    k = sum(pattern)
    value = satellite_sigma_eta(tree, chi, 3)
    assert value == CGValue(4 * k, k - 1)
    if k > 1:
        assert value.eta_formula().endswith(f" + {k - 1}")
    else:
        assert value.eta_formula() == "η(R,χ1) + η(R,χ2) + η(R,χ3)"


@pytest.mark.property
def test_infection_order_independent(genus_two_pattern):
    """Permuting infection sites does not change any value."""
    jj = block_sum(J0, J0)
    sites = [
        InfectionSite("eta1", "J1", jj, lift_curves=({"e1": 1}, {"e1": 1})),
        InfectionSite("eta3", "J3", J0, lift_curves=({"f2": 1}, {"f2": 1})),
        InfectionSite("eta2", "J2", jj, lift_curves=({"f1": 1, "e2": -1}, {"f1": 1, "e2": -1})),
        InfectionSite("c", "J4", J0, lift_values=(1, 2)),
    ]
    form = genus_two_pattern.form
    threes = [x for x in form.elements() if form.order_of(x) in (1, 3)]
    fives = [x for x in form.elements() if form.order_of(x) == 5][:6]
    reference = PatternNode(genus_two_pattern, tuple(sites))
    expected = {x: satellite_sigma_eta(reference, x, 3) for x in threes}
    expected.update({x: satellite_sigma_eta(reference, x, 5) for x in fives})
    for perm in permutations(sites):
        node = PatternNode(genus_two_pattern, perm)
        for x in threes:
            assert satellite_sigma_eta(node, x, 3) == expected[x]
        for x in fives:
            assert satellite_sigma_eta(node, x, 5) == expected[x]


# ── Companions and infection of tables ──────────────────────────────────────


@pytest.mark.unit
class TestCompanions:
    """Companion Seifert data and table infection."""

    def test_companion_lt_at_one(self):
        """Exponent 0 is the trivial root: zero signature and nullity."""
        assert companion_lt(J0, 0, 3) == SignatureResult(0, 0, 2)
        assert companion_lt(J0, 3, 3) == SignatureResult(0, 0, 2)
        assert companion_lt(J0, 1, 3).signature == 2

    def test_nested_companion(self, rj):
        """A nested satellite answers with its pattern's matrix."""
        assert companion_seifert(rj).to_lists() == [[0, 1], [2, 0]]
        assert companion_seifert(ConnectedSumNode(rj, rj)).size == 4

    def test_nested_companion_needs_pattern(self, r_table):
        """Without a pattern matrix the companion is unknown."""
        bare = PatternBaseTable("R", r_table.form, r_table.labels, dict(r_table.entries))
        with pytest.raises(ValueError, match="Seifert matrix"):
            companion_seifert(PatternNode(bare))

    def test_infect_matches_tree(self, r_table, rj):
        """Infecting the table site by site reproduces the tree values."""
        table = r_table
        for site in rj.infections:
            table = infect(table, site, 3)
        for x in r_table.form.elements():
            assert table.lookup(x) == satellite_sigma_eta(rj, x, 3)

    def test_infect_drops_other_orders(self):
        """Characters of order 5 are dropped at d = 3."""
        lf = from_presentation(IntegerMatrix.of([[3, 0], [0, 5]]))
        table = PatternBaseTable.zero(lf, {"g": (1,)})
        site = InfectionSite("g", "J", J0, lift_values=(1, 1))
        infected = infect(table, site, 3)
        assert sorted(infected.entries) == [(0,), (5,), (10,)]
        assert infected.lookup((5,)) == CGValue(4, 0)

    def test_infect_level(self, r_table):
        """Infection needs a prime-power level."""
        site = InfectionSite("x", "J", J0, lift_values=(1, 1))
        with pytest.raises(NotPrimePower):
            infect(r_table, site, 15)


# ── General winding numbers ─────────────────────────────────────────────────


@pytest.mark.unit
class TestWinding:
    """Cover bookkeeping for arbitrary winding numbers."""

    @pytest.mark.parametrize(
        "n,w,h,degree,reducible",
        [(2, 0, 2, 1, True), (2, 1, 1, 2, False), (4, 2, 2, 2, False), (3, 3, 3, 1, True)],
    )
    def test_bookkeeping(self, n, w, h, degree, reducible):
        """h = gcd(n, w) copies of the n/h-fold cover."""
        book = general_winding_bookkeeping(n, w)
        assert (book.h, book.cover_degree, book.count, book.lt_reducible) == (h, degree, h, reducible)

    def test_bookkeeping_rejects_zero_degree(self):
        """The cover degree is positive."""
        with pytest.raises(ValueError):
            general_winding_bookkeeping(0, 1)

    def test_lift_predicate(self):
        """No constraint when h = n; equality (mod d) otherwise."""
        assert lift_predicate(2, 2, 1, 0)
        assert lift_predicate(1, 2, 1, 1)
        assert not lift_predicate(1, 2, 1, 2)
        assert lift_predicate(1, 2, 4, 1, d=3)
