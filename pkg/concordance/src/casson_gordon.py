"""Casson-Gordon signatures and nullities of winding-number-zero satellites."""

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from math import gcd
from typing import Mapping, Optional, Sequence, Union

from .errors import MissingBaseEntry, NotPrimePower, WindingNonZero
from .exact_algebra import (Rational, SignatureResult, format_rational,
                            root_of_unity, to_rational)
from .linking_form import (DirectSum, Element, LinkingForm, direct_sum,
                           is_prime_power)
from .logger import ConcordanceLogger, get_logger
from .seifert_knot import SeifertMatrix, block_sum, lt_signature_nullity
from .settings import Settings

logger: ConcordanceLogger = get_logger(__name__)

Curve = Mapping[str, int]


# ── Values and their breakdown ───────────────────────────────────────


@dataclass(frozen=True)
class CGTerm:
    """One summand of a Casson-Gordon value.

    Attributes:
        kind: base, companion or correction
        name: table name or companion name
        sigma: contribution to sigma
        eta: contribution to eta
        summand: 1-based connected summand of a base term
        argument: symbolic exponent, e.g. "chi1(f1)-chi2(e2)"
        exponent: the exponent a of w^a in Z_d
        level: d
        lift: which lift (1 or 2) a companion term belongs to
    """

    kind: str
    name: str
    sigma: "Rational"
    eta: int
    summand: Optional[int] = None
    argument: Optional[str] = None
    exponent: Optional[int] = None
    level: Optional[int] = None
    lift: Optional[int] = None

    def sigma_symbol(self) -> str:
        """e.g. sigma(R,chi1) or sigma_J(w^{chi1(e1)})."""
        if self.kind == "base":
            return f"σ({self.name},χ{self.summand})"
        if self.kind == "companion":
            return f"σ_{self.name}(ω^{{{self.argument}}})"
        return "0"

    def eta_symbol(self) -> str:
        """Nullity counterpart of sigma_symbol."""
        if self.kind == "base":
            return f"η({self.name},χ{self.summand})"
        if self.kind == "companion":
            return f"η_{self.name}(ω^{{{self.argument}}})"
        return "1"


@dataclass(frozen=True)
class CGValue:
    """Casson-Gordon sigma and nullity, with the terms that produced them.

    Equality compares the numbers only.
    """

    sigma: "Rational"
    eta: int
    terms: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if self.eta < 0:
            raise ValueError(f"Casson-Gordon nullity must be non-negative (got {self.eta})")
        object.__setattr__(self, "sigma", to_rational(self.sigma))

    def plus(self, other: "CGValue") -> "CGValue":
        """Termwise sum."""
        return CGValue(self.sigma + other.sigma, self.eta + other.eta, self.terms + other.terms)

    def sigma_formula(self) -> str:
        """Symbolic sigma, grouping equal companion terms with a multiplicity."""
        return " + ".join(_grouped(self.terms, "sigma")) or "0"

    def eta_formula(self) -> str:
        """Symbolic eta; companion terms only appear when their nullity is nonzero."""
        return " + ".join(_grouped(self.terms, "eta")) or "0"

    def to_dict(self) -> dict:
        """Serializable form."""
        return {
            "sigma": format_rational(self.sigma),
            "eta": self.eta,
            "sigma_formula": self.sigma_formula(),
            "eta_formula": self.eta_formula(),
        }


def _grouped(terms: Sequence[CGTerm], which: str) -> list[str]:
    counts: dict[str, int] = {}
    constant = 0
    for t in terms:
        if t.kind == "correction":
            if which == "eta":
                constant += t.eta
            continue
        if which == "sigma":
            symbol = t.sigma_symbol()
        else:
            if t.kind == "companion" and not t.eta:
                continue
            symbol = t.eta_symbol()
        counts[symbol] = counts.get(symbol, 0) + 1
    parts = [s if n == 1 else f"{n}{s}" for s, n in counts.items()]
    if constant:
        parts.append(str(constant))
    return parts


def connected_sum_sigma_eta(
    a: CGValue, a_trivial: bool, b: CGValue, b_trivial: bool
) -> CGValue:
    """Value on a connected sum: sigmas add, nullities add plus 1 if both characters are nontrivial."""
    bump = 0 if (a_trivial or b_trivial) else 1
    correction = CGTerm("correction", "#", to_rational(0), bump)
    return CGValue(a.sigma + b.sigma, a.eta + b.eta + bump, a.terms + b.terms + (correction,))


# ── Pattern base tables ──────────────────────────────────────────────


@dataclass(frozen=True, eq=False)
class PatternBaseTable:
    """User-supplied sigma(R, chi) and eta(R, chi) for a pattern R.

    Attributes:
        name: Pattern name used in formulas
        form: Linking form of the 2-fold branched cover of R
        labels: Curve label -> group element (e.g. e1, f1)
        entries: Character element -> base value
        pattern: Seifert matrix of R, when known
        summand_of: Curve label -> 1-based summand index
        summands: Number of connected summands the table describes
    """

    name: str
    form: LinkingForm
    labels: Mapping[str, Element]
    entries: Mapping[Element, CGValue]
    pattern: Optional[SeifertMatrix] = None
    summand_of: Mapping[str, int] = field(default_factory=dict)
    summands: int = 1

    def __post_init__(self):
        for label, x in self.labels.items():
            if self.form.element(x) != tuple(x):
                raise ValueError(f"label '{label}' is not a reduced group element: {list(x)}")
        self._validate_entries(self.name, self.form, self.entries)
        if not self.summand_of:
            object.__setattr__(self, "summand_of", {label: 1 for label in self.labels})

    @staticmethod
    def _validate_entries(name: str, form: LinkingForm, entries: Mapping[Element, CGValue]) -> None:
        if form.zero not in entries:
            raise MissingBaseEntry(form.zero, name)
        for x, value in entries.items():
            neg = form.neg(x)
            other = entries.get(neg)
            if other is None:
                raise ValueError(
                    f"base table '{name}' has character {list(x)} but not its negative {list(neg)}"
                )
            if (other.sigma, other.eta) != (value.sigma, value.eta):
                raise ValueError(
                    f"base table '{name}' differs on characters {list(x)} and {list(neg)}"
                )

    @staticmethod
    def base_value(name: str, sigma: object, eta: int, summand: int = 1) -> CGValue:
        """A table entry carrying its own base term."""
        s = to_rational(sigma)
        return CGValue(s, eta, (CGTerm("base", name, s, eta, summand=summand),))

    @classmethod
    def zero(
        cls,
        form: LinkingForm,
        labels: Mapping[str, Element],
        name: str = "R",
        pattern: Optional[SeifertMatrix] = None,
    ) -> "PatternBaseTable":
        """Table with sigma = eta = 0 for every character."""
        entries = {x: cls.base_value(name, 0, 0) for x in form.elements()}
        return cls(name, form, dict(labels), entries, pattern)

    def lookup(self, chi: Element) -> CGValue:
        """Base value of a character.

        Raises:
            MissingBaseEntry: If the table has no entry for chi
        """
        try:
            return self.entries[tuple(chi)]
        except KeyError:
            raise MissingBaseEntry(chi, self.name) from None

    def curve_value(self, chi: Element, curve: Curve, d: int) -> int:
        """chi evaluated on an integer combination of labelled curves, in Z_d.

        Raises:
            KeyError: For an unknown curve label
        """
        total = 0
        for label, coeff in curve.items():
            if label not in self.labels:
                raise KeyError(f"curve label '{label}' is not defined on table '{self.name}'")
            total += coeff * self.form.character_value(chi, self.labels[label], d)
        return total % d

    def curve_symbol(self, curve: Curve, offset: int = 0) -> str:
        """Symbolic chi-value of a curve, e.g. chi1(f1)-chi2(e2); offset shifts summand indices."""
        parts = []
        for label, coeff in curve.items():
            if not coeff:
                continue
            body = f"χ{self.summand_of.get(label, 1) + offset}({label})"
            mag = abs(coeff)
            body = body if mag == 1 else f"{mag}{body}"
            if not parts:
                parts.append(body if coeff > 0 else f"-{body}")
            else:
                parts.append(f"+{body}" if coeff > 0 else f"-{body}")
        return "".join(parts) or "0"

    def connected_sum(self, other: "PatternBaseTable", name: Optional[str] = None) -> "PatternBaseTable":
        """Table of R1 # R2 on the direct sum of the linking forms.

        Raises:
            ValueError: If the two tables share a curve label
        """
        clash = set(self.labels) & set(other.labels)
        if clash:
            raise ValueError(f"curve labels {sorted(clash)} appear in both summands")
        ds = direct_sum(self.form, other.form)
        labels = {k: ds.inject_left(v) for k, v in self.labels.items()}
        labels.update({k: ds.inject_right(v) for k, v in other.labels.items()})
        summand_of = dict(self.summand_of)
        summand_of.update({k: v + self.summands for k, v in other.summand_of.items()})
        entries = {}
        for x, vx in self.entries.items():
            for y, vy in other.entries.items():
                shifted = CGValue(vy.sigma, vy.eta, tuple(_shift(t, self.summands) for t in vy.terms))
                entries[ds.combine(x, y)] = connected_sum_sigma_eta(
                    vx, x == self.form.zero, shifted, y == other.form.zero
                )
        pattern = None
        if self.pattern is not None and other.pattern is not None:
            pattern = block_sum(self.pattern, other.pattern)
        return PatternBaseTable(
            name or self.name,
            ds.form,
            labels,
            entries,
            pattern,
            summand_of,
            self.summands + other.summands,
        )


def _shift(term: CGTerm, offset: int) -> CGTerm:
    if term.summand is None:
        return term
    return CGTerm(
        term.kind, term.name, term.sigma, term.eta, term.summand + offset,
        term.argument, term.exponent, term.level, term.lift,
    )


# ── Satellite trees ──────────────────────────────────────────────────


@dataclass(frozen=True, eq=False)
class InfectionSite:
    """An infection curve, its lifts and the companion tied in along it.

    Exactly one of lift_curves (one labelled-curve combination per lift)
    or lift_values (fixed exponents in Z_d) is given.
    """

    label: str
    companion_name: str
    companion: "Companion"
    lift_curves: Optional[tuple] = None
    lift_values: Optional[tuple] = None
    winding: int = 0

    def __post_init__(self):
        if self.winding != 0:
            raise WindingNonZero(
                f"infection site '{self.label}' has winding number {self.winding}; only 0 is supported"
            )
        if (self.lift_curves is None) == (self.lift_values is None):
            raise ValueError(f"infection site '{self.label}' needs exactly one of lift_curves or lift_values")
        lifts = self.lift_curves if self.lift_curves is not None else self.lift_values
        if len(lifts) != 2:
            raise ValueError(f"infection site '{self.label}' needs two lifts (got {len(lifts)})")


@dataclass(frozen=True, eq=False)
class PatternNode:
    """Pattern R with base table and winding-zero infections."""

    base: PatternBaseTable
    infections: tuple = ()

    @property
    def form(self) -> LinkingForm:
        """Linking form (winding-0 infection leaves it unchanged)."""
        return self.base.form

    @property
    def summands(self) -> int:
        """Connected summands of the base."""
        return self.base.summands


@dataclass(frozen=True, eq=False)
class ConnectedSumNode:
    """Connected sum of two satellite trees."""

    left: "SatelliteTree"
    right: "SatelliteTree"

    @cached_property
    def direct(self) -> DirectSum:
        """Direct sum of the children's linking forms."""
        return direct_sum(self.left.form, self.right.form)

    @property
    def form(self) -> LinkingForm:
        """Linking form of the sum."""
        return self.direct.form

    @property
    def summands(self) -> int:
        """Total summand count."""
        return self.left.summands + self.right.summands


SatelliteTree = Union[PatternNode, ConnectedSumNode]
Companion = Union[SeifertMatrix, PatternNode, ConnectedSumNode]


def companion_seifert(companion: Companion) -> SeifertMatrix:
    """Seifert matrix governing a companion's Levine-Tristram data.

    A winding-0 satellite has the Seifert form of its pattern, so a nested
    tree answers with its pattern's matrix.

    Raises:
        ValueError: If a nested pattern has no Seifert matrix
    """
    if isinstance(companion, SeifertMatrix):
        return companion
    if isinstance(companion, PatternNode):
        if companion.base.pattern is None:
            raise ValueError(
                f"nested companion with pattern '{companion.base.name}' needs the pattern's Seifert matrix"
            )
        return companion.base.pattern
    return block_sum(companion_seifert(companion.left), companion_seifert(companion.right))


def companion_lt(companion: Companion, exponent: int, d: int, settings: Optional[Settings] = None) -> SignatureResult:
    """Levine-Tristram data of a companion at exp(2 pi i exponent / d); zero at 1."""
    return _lt_at(companion_seifert(companion), exponent % d, d, settings)


@lru_cache(maxsize=4096)
def _lt_at(a: SeifertMatrix, exponent: int, d: int, settings: Optional[Settings]) -> SignatureResult:
    w = root_of_unity(exponent, d)
    if w.is_one():
        return SignatureResult(0, 0, a.size)
    return lt_signature_nullity(a, w, settings)


def _site_terms(
    base: PatternBaseTable,
    site: InfectionSite,
    chi: Element,
    d: int,
    settings: Optional[Settings],
    offset: int = 0,
) -> CGValue:
    sigma, eta, terms = to_rational(0), 0, []
    for lift in (0, 1):
        if site.lift_curves is not None:
            curve = site.lift_curves[lift]
            a = base.curve_value(chi, curve, d)
            argument = base.curve_symbol(curve, offset)
        else:
            a = int(site.lift_values[lift]) % d
            argument = str(a)
        res = companion_lt(site.companion, a, d, settings)
        # nullity terms only for lifts where the character is nontrivial
        term_eta = res.nullity if a else 0
        sigma += res.signature
        eta += term_eta
        terms.append(
            CGTerm("companion", site.companion_name, to_rational(res.signature), term_eta,
                   argument=argument, exponent=a, level=d, lift=lift + 1)
        )
    return CGValue(sigma, eta, tuple(terms))


def _evaluate(tree: SatelliteTree, chi: Element, d: int, settings: Optional[Settings], offset: int) -> CGValue:
    if isinstance(tree, PatternNode):
        value = tree.base.lookup(chi)
        value = CGValue(value.sigma, value.eta, tuple(_shift(t, offset) for t in value.terms))
        for site in tree.infections:
            value = value.plus(_site_terms(tree.base, site, chi, d, settings, offset))
        return value
    left_chi, right_chi = tree.direct.split(chi)
    left = _evaluate(tree.left, left_chi, d, settings, offset)
    right = _evaluate(tree.right, right_chi, d, settings, offset + tree.left.summands)
    return connected_sum_sigma_eta(
        left, left_chi == tree.left.form.zero, right, right_chi == tree.right.form.zero
    )


def satellite_sigma_eta(
    tree: SatelliteTree,
    chi: Sequence[int],
    d: int,
    n: int = 2,
    settings: Optional[Settings] = None,
) -> CGValue:
    """Casson-Gordon sigma and nullity of a satellite at a prime-power character.

    sigma = sigma(R, chi) + sum over sites and lifts of sigma_J(w^chi(lift)),
    eta = eta(R, chi) + sum over lifts with chi(lift) != 0 of eta_J(w^chi(lift)),
    where w = exp(2 pi i / d) and the companion terms vanish at w^0 = 1.

    Args:
        tree: Pattern or connected sum
        chi: Character, as an element of the tree's group
        d: Prime power divisible by the order of chi
        n: Cover degree (only 2 has a closed formula)
        settings: Precision limits

    Raises:
        NotPrimePower: If d is not a prime power
        MissingBaseEntry: If a base table lacks chi
        ValueError: For n != 2 or a character whose order does not divide d
    """
    if n != 2:
        raise ValueError(f"closed satellite formulas are implemented for 2-fold covers only (got n={n})")
    if not is_prime_power(d):
        raise NotPrimePower(f"character level {d} is not a prime power")
    form = tree.form
    chi = form.element(chi)
    if d % form.order_of(chi):
        raise ValueError(f"character {list(chi)} of order {form.order_of(chi)} does not divide d={d}")
    value = _evaluate(tree, chi, d, settings, 0)
    logger.detail("satellite value", {"chi": list(chi), "d": d, "sigma": value.sigma, "eta": value.eta})
    return value


def infect(table: PatternBaseTable, site: InfectionSite, d: int, settings: Optional[Settings] = None) -> PatternBaseTable:
    """Base table of R(J; eta) for the characters whose order divides d.

    Raises:
        NotPrimePower: If d is not a prime power
    """
    if not is_prime_power(d):
        raise NotPrimePower(f"character level {d} is not a prime power")
    entries = {}
    for chi, value in table.entries.items():
        if d % table.form.order_of(chi):
            continue
        entries[chi] = value.plus(_site_terms(table, site, chi, d, settings))
    return PatternBaseTable(
        table.name, table.form, table.labels, entries, table.pattern, table.summand_of, table.summands
    )


# ── General winding numbers ──────────────────────────────────────────


@dataclass(frozen=True)
class WindingBookkeeping:
    """Decomposition data of the n-fold cover for winding number w."""

    h: int
    cover_degree: int
    count: int

    @property
    def lt_reducible(self) -> bool:
        """True when the companion pieces are plain knot exteriors (w = 0 mod n)."""
        return self.cover_degree == 1


def general_winding_bookkeeping(n: int, w: int) -> WindingBookkeeping:
    """h = gcd(n, w); the cover contains h copies of the n/h-fold cyclic cover of the companion exterior.

    Raises:
        ValueError: If n < 1
    """
    if n < 1:
        raise ValueError(f"cover degree must be positive (got {n})")
    h = gcd(n, w)
    return WindingBookkeeping(h=h, cover_degree=n // h, count=h)


def lift_predicate(
    h: int, n: int, chi_p_value: int, chi_i_meridian_value: int, d: Optional[int] = None
) -> bool:
    """Check the character correspondence chi_P(eta_i) = chi_i(meridian lift) when h < n.

    With h = n there is no constraint.
    """
    if h >= n:
        return True
    if d is not None:
        return (chi_p_value - chi_i_meridian_value) % d == 0
    return chi_p_value == chi_i_meridian_value
