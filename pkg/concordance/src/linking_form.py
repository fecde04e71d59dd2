"""Finite linking forms presented by symmetric integer matrices.

Group elements are tuples in Smith normal form coordinates: entry i is a
residue modulo the i-th invariant factor (only factors > 1 are kept).
Characters are identified with elements through the adjoint of the pairing.
"""

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, product
from math import gcd, isqrt, lcm
from typing import Callable, Iterable, Iterator, Optional, Sequence

from sympy import factorint

from .errors import DegenerateForm, GroupTooLarge
from .exact_algebra import (IntegerMatrix, Rational, SmithNormalForm,
                            rational)
from .logger import ConcordanceLogger, get_logger
from .seifert_knot import SeifertMatrix
from .settings import Settings, get_settings

logger: ConcordanceLogger = get_logger(__name__)

Element = tuple[int, ...]


def is_prime_power(n: int) -> bool:
    """True for p^k with k >= 1."""
    return n > 1 and len(factorint(n)) == 1


def prime_of(n: int) -> int:
    """The prime p of a prime power p^k.

    Raises:
        ValueError: If n is not a prime power
    """
    factors = factorint(n) if n > 1 else {}
    if len(factors) != 1:
        raise ValueError(f"{n} is not a prime power")
    return next(iter(factors))


class LinkingForm:
    """Nonsingular symmetric pairing on coker(B), valued in Q/Z.

    Use ``from_presentation`` or ``from_seifert`` to build one.
    """

    def __init__(self, presentation: IntegerMatrix, snf: SmithNormalForm):
        self.presentation = presentation
        diag = snf.diagonal
        self._coords = [i for i, d in enumerate(diag) if d > 1]
        self.invariant_factors: tuple[int, ...] = tuple(diag[i] for i in self._coords)
        self.order = 1
        for d in self.invariant_factors:
            self.order *= d
        self.exponent = lcm(*self.invariant_factors) if self.invariant_factors else 1
        self._u = snf.U
        self._u_inv = snf.U_inv
        # pairing of SNF generators, scaled by the exponent:
        # pair(g_i, g_j) = (V^T U^-1)[j][i] / d_j
        w = snf.V.transpose() @ snf.U_inv
        e = self.exponent
        k = len(self._coords)
        self._gram = [
            [
                (w[self._coords[j], self._coords[i]] * (e // self.invariant_factors[j])) % e
                for j in range(k)
            ]
            for i in range(k)
        ]
        for i in range(k):
            for j in range(i):
                if self._gram[i][j] != self._gram[j][i]:
                    raise DegenerateForm(f"pairing is not symmetric at generators {j + 1} and {i + 1}")

    # construction

    @classmethod
    def from_presentation(cls, b: IntegerMatrix) -> "LinkingForm":
        """Linking form presented by a nondegenerate symmetric matrix.

        Raises:
            ValueError: If B is not square and symmetric
            DegenerateForm: If det(B) = 0
        """
        cls._validate_symmetric(b)
        if b.det() == 0:
            raise DegenerateForm("presentation matrix has determinant 0")
        return cls(b, SmithNormalForm(b).run())

    @staticmethod
    def _validate_symmetric(b: IntegerMatrix) -> None:
        if not b.is_square():
            raise ValueError(f"presentation matrix must be square (got {b.nrows}x{b.ncols})")
        if b != b.transpose():
            raise ValueError("presentation matrix must be symmetric")

    def __repr__(self) -> str:
        return f"LinkingForm(invariant_factors={list(self.invariant_factors)})"

    # elements

    @property
    def rank(self) -> int:
        """Number of SNF generators (invariant factors > 1)."""
        return len(self.invariant_factors)

    @property
    def zero(self) -> Element:
        """Identity element."""
        return (0,) * self.rank

    def element(self, values: Sequence[int]) -> Element:
        """Reduce SNF coordinates into canonical range.

        Raises:
            ValueError: On a length mismatch
        """
        if len(values) != self.rank:
            raise ValueError(f"element needs {self.rank} coordinates, got {len(values)}")
        return tuple(int(v) % d for v, d in zip(values, self.invariant_factors))

    def generators(self) -> list[Element]:
        """The SNF generators g_i."""
        return [tuple(int(i == j) for j in range(self.rank)) for i in range(self.rank)]

    def add(self, x: Element, y: Element) -> Element:
        """Group law."""
        return tuple((a + b) % d for a, b, d in zip(x, y, self.invariant_factors))

    def neg(self, x: Element) -> Element:
        """Additive inverse."""
        return tuple((-a) % d for a, d in zip(x, self.invariant_factors))

    def scale(self, k: int, x: Element) -> Element:
        """k * x."""
        return tuple((k * a) % d for a, d in zip(x, self.invariant_factors))

    def order_of(self, x: Element) -> int:
        """Additive order of an element."""
        return lcm(1, *(d // gcd(a, d) for a, d in zip(x, self.invariant_factors)))

    def elements(self) -> Iterator[Element]:
        """Every element, in lexicographic order."""
        return product(*(range(d) for d in self.invariant_factors))

    def presentation_vector(self, x: Element) -> tuple[int, ...]:
        """A vector of Z^n representing x in coker(B)."""
        full = [0] * self.presentation.nrows
        for i, v in zip(self._coords, x):
            full[i] = v
        return self._u_inv.apply(full)

    def snf_element(self, v: Sequence[int]) -> Element:
        """Class of a presentation vector."""
        if len(v) != self.presentation.nrows:
            raise ValueError(f"vector needs {self.presentation.nrows} entries, got {len(v)}")
        image = self._u.apply(v)
        return self.element([image[i] for i in self._coords])

    # pairing

    def pair_scaled(self, x: Element, y: Element) -> int:
        """exponent * pair(x, y), as a residue modulo the exponent."""
        total = 0
        for i, a in enumerate(x):
            if a:
                row = self._gram[i]
                total += a * sum(b * row[j] for j, b in enumerate(y) if b)
        return total % self.exponent

    def pair(self, x: Element, y: Element) -> Rational:
        """pair(x, y) = v_x^T B^-1 v_y mod 1, in [0, 1)."""
        return rational(self.pair_scaled(x, y), self.exponent)

    def character_values(self, x: Element) -> tuple:
        """Values of the character of x on the SNF generators."""
        return tuple(self.pair(x, g) for g in self.generators())

    def character_value(self, x: Element, y: Element, d: int) -> int:
        """d * pair(x, y) as an element of Z_d; d must be a multiple of the order of x."""
        scaled = self.pair_scaled(x, y) * d
        if scaled % self.exponent:
            raise ValueError(f"character level {d} is not a multiple of the order of {list(x)}")
        return (scaled // self.exponent) % d

    def check_size(self, settings: Optional[Settings] = None) -> None:
        """Raise GroupTooLarge when enumeration would exceed the bound."""
        settings = settings or get_settings()
        if self.order > settings.enumeration_bound:
            raise GroupTooLarge(self.order, settings.enumeration_bound)

    def whole(self) -> "Subgroup":
        """The full group as a subgroup."""
        return Subgroup(self, self.generators())

    def trivial(self) -> "Subgroup":
        """The trivial subgroup."""
        return Subgroup(self, (), frozenset([self.zero]))

    # primary decomposition

    def primes(self) -> list[int]:
        """Primes dividing the order."""
        return sorted(factorint(self.order)) if self.order > 1 else []

    def primary_part(self, p: int) -> "Subgroup":
        """The p-primary component, generated by (d_i / p^a_i) g_i."""
        gens = []
        for i, d in enumerate(self.invariant_factors):
            a = 0
            while d % p ** (a + 1) == 0:
                a += 1
            if a:
                gens.append(tuple((d // p**a) if j == i else 0 for j in range(self.rank)))
        return Subgroup(self, gens)


def from_presentation(b: IntegerMatrix) -> LinkingForm:
    """Linking form presented by a nondegenerate symmetric matrix."""
    return LinkingForm.from_presentation(b)


def from_seifert(a: SeifertMatrix) -> LinkingForm:
    """Linking form of the 2-fold branched cover, presented by A + A^T.

    Raises:
        DegenerateForm: If det(A + A^T) = 0
    """
    return LinkingForm.from_presentation(a.matrix + a.matrix.transpose())


class DirectSum:
    """Orthogonal direct sum of two linking forms with its injections."""

    def __init__(self, left: LinkingForm, right: LinkingForm):
        self.left = left
        self.right = right
        self.form = LinkingForm.from_presentation(
            IntegerMatrix.block_diag(left.presentation, right.presentation)
        )
        self._n1 = left.presentation.nrows

    def inject_left(self, x: Element) -> Element:
        """Image of an element of the left summand."""
        v = list(self.left.presentation_vector(x)) + [0] * self.right.presentation.nrows
        return self.form.snf_element(v)

    def inject_right(self, y: Element) -> Element:
        """Image of an element of the right summand."""
        v = [0] * self._n1 + list(self.right.presentation_vector(y))
        return self.form.snf_element(v)

    def combine(self, x: Element, y: Element) -> Element:
        """The element (x, y)."""
        return self.form.add(self.inject_left(x), self.inject_right(y))

    def split(self, z: Element) -> tuple[Element, Element]:
        """Components of an element of the sum."""
        v = self.form.presentation_vector(z)
        return self.left.snf_element(v[: self._n1]), self.right.snf_element(v[self._n1 :])


def direct_sum(lf1: LinkingForm, lf2: LinkingForm) -> DirectSum:
    """Orthogonal direct sum, presented by the block sum of the presentations."""
    return DirectSum(lf1, lf2)


def pair(lf: LinkingForm, x: Element, y: Element) -> Rational:
    """The linking pairing of two elements, in [0, 1)."""
    return lf.pair(x, y)


def character_values(lf: LinkingForm, x: Element) -> tuple:
    """Q/Z values of the character of x on the SNF generators."""
    return lf.character_values(x)


def order_of(lf: LinkingForm, x: Element) -> int:
    """Additive order of an element."""
    return lf.order_of(x)


def elements(lf: LinkingForm) -> Iterator[Element]:
    """Every group element, in canonical order."""
    return lf.elements()


def presentation_vector(lf: LinkingForm, x: Element) -> tuple[int, ...]:
    """Presentation coordinates of an element."""
    return lf.presentation_vector(x)


def snf_element(lf: LinkingForm, v: Sequence[int]) -> Element:
    """Element represented by a presentation vector."""
    return lf.snf_element(v)


# ── Subgroups ────────────────────────────────────────────────────────


class Subgroup:
    """Subgroup of a linking form's group, given by generators.

    The element set is computed on first use. Equality and hashing go
    through the element set.
    """

    def __init__(
        self,
        lf: LinkingForm,
        generators: Iterable[Element],
        elements: Optional[frozenset] = None,
        rank: Optional[int] = None,
    ):
        self.lf = lf
        self.generators: tuple[Element, ...] = tuple(generators)
        if elements is not None:
            self.__dict__["elements"] = elements
        self._rank = rank

    @cached_property
    def elements(self) -> frozenset:
        """All elements of the subgroup."""
        lf = self.lf
        current = {lf.zero}
        for g in self.generators:
            if g in current:
                continue
            multiples = []
            m = g
            while m != lf.zero:
                multiples.append(m)
                m = lf.add(m, g)
            current |= {lf.add(s, k) for s in current for k in multiples}
        return frozenset(current)

    @cached_property
    def sorted_elements(self) -> tuple[Element, ...]:
        """Elements in lexicographic order."""
        return tuple(sorted(self.elements))

    @property
    def order(self) -> int:
        """Number of elements."""
        return len(self.elements)

    def __contains__(self, x: Element) -> bool:
        return x in self.elements

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Subgroup):
            return NotImplemented
        return self.elements == other.elements

    def __hash__(self) -> int:
        return hash(self.elements)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(order={self.order}, generators={list(self.canonical_generators())})"

    def with_rank(self, rank: int) -> "Subgroup":
        """Same subgroup with its minimal number of generators recorded."""
        out = Subgroup(self.lf, self.generators, rank=rank)
        if "elements" in self.__dict__:
            out.__dict__["elements"] = self.elements
        return out

    def sort_key(self) -> tuple:
        """Canonical ordering: by order, then by sorted elements."""
        return (self.order, self.sorted_elements)

    def extended(self, g: Element) -> "Subgroup":
        """The subgroup generated by self and g."""
        lf = self.lf
        if g in self.elements:
            return self
        multiples = []
        m = g
        while m != lf.zero:
            multiples.append(m)
            m = lf.add(m, g)
        elems = set(self.elements)
        elems |= {lf.add(s, k) for s in self.elements for k in multiples}
        return Subgroup(lf, self.generators + (g,), frozenset(elems))

    def canonical_generators(self) -> list[Element]:
        """A deterministic generating set: greedily pick the lexicographically
        smallest element of largest order not yet generated."""
        chosen: list[Element] = []
        span = self.lf.trivial()
        pool = sorted(self.elements, key=lambda x: (-self.lf.order_of(x), x))
        for x in pool:
            if x not in span.elements:
                span = span.extended(x)
                chosen.append(x)
            if span.order == self.order:
                break
        return chosen

    def p_rank(self, p: int) -> int:
        """log_p of the number of elements killed by p."""
        killed = sum(1 for x in self.elements if self.lf.scale(p, x) == self.lf.zero)
        r = 0
        while killed > 1:
            killed //= p
            r += 1
        return r

    @property
    def min_generators(self) -> int:
        """Smallest number of generators (the maximal p-rank); a known basis size wins."""
        if self._rank is not None:
            return self._rank
        primes = sorted(factorint(self.order)) if self.order > 1 else []
        return max((self.p_rank(p) for p in primes), default=0)

    def is_isotropic(self) -> bool:
        """True iff the pairing vanishes on the subgroup."""
        gens = self.generators
        return all(self.lf.pair_scaled(x, y) == 0 for x in gens for y in gens)

    def perp(self, within: Optional["Subgroup"] = None) -> "Subgroup":
        """Elements (of ``within``, default the whole group) orthogonal to self."""
        lf = self.lf
        ambient = within.sorted_elements if within is not None else tuple(lf.elements())
        elems = frozenset(
            x for x in ambient if all(lf.pair_scaled(x, g) == 0 for g in self.generators)
        )
        return Subgroup(lf, sorted(elems), elems)

    def is_nondegenerate(self) -> bool:
        """True iff no nonzero element pairs trivially with the whole subgroup."""
        lf = self.lf
        return not any(
            x != lf.zero and all(lf.pair_scaled(x, g) == 0 for g in self.generators)
            for x in self.elements
        )

    def sum(self, other: "Subgroup") -> "Subgroup":
        """Internal sum."""
        lf = self.lf
        elems = frozenset(lf.add(x, y) for x in self.elements for y in other.elements)
        return Subgroup(lf, self.generators + other.generators, elems)


class Metabolizer(Subgroup):
    """Isotropic subgroup G with |G|^2 equal to the group order."""

    def check(self) -> None:
        """Check the defining properties.

        Raises:
            ValueError: If the order or isotropy condition fails
        """
        if self.order**2 != self.lf.order:
            raise ValueError(f"metabolizer has order {self.order}, expected the square root of {self.lf.order}")
        if not self.is_isotropic():
            raise ValueError("metabolizer is not isotropic")


@dataclass(frozen=True)
class Character:
    """Prime-power character, represented by its element under the adjoint."""

    element: Element
    order: int

    def values(self, lf: LinkingForm) -> tuple:
        """Q/Z values on the SNF generators."""
        return lf.character_values(self.element)

    @property
    def prime(self) -> int:
        """The prime dividing the order."""
        return prime_of(self.order)


# ── Enumeration ──────────────────────────────────────────────────────


def isotropic_subgroups(
    lf: LinkingForm,
    within: Optional[Subgroup] = None,
    settings: Optional[Settings] = None,
) -> Iterator[Subgroup]:
    """Every isotropic subgroup, trivial first, in canonical order per layer.

    A subgroup S grows by one isotropic element g orthogonal to S, which
    keeps S + <g> isotropic; duplicates are dropped through the element set.

    Args:
        lf: Linking form
        within: Restrict to subgroups of this subgroup
        settings: Enumeration bound

    Raises:
        GroupTooLarge: If the ambient group exceeds the enumeration bound
    """
    lf.check_size(settings)
    universe = within.sorted_elements if within is not None else tuple(lf.elements())
    candidates = [x for x in universe if x != lf.zero and lf.pair_scaled(x, x) == 0]
    seen = set()
    layer = [lf.trivial()]
    while layer:
        layer.sort(key=Subgroup.sort_key)
        yield from layer
        nxt = {}
        for sub in layer:
            for g in candidates:
                if g in sub.elements:
                    continue
                if any(lf.pair_scaled(g, s) for s in sub.generators):
                    continue
                bigger = sub.extended(g)
                if bigger.elements in seen:
                    continue
                seen.add(bigger.elements)
                nxt[bigger.elements] = bigger
        layer = list(nxt.values())


def enumerate_metabolizers(lf: LinkingForm, settings: Optional[Settings] = None) -> list[Metabolizer]:
    """All subgroups G with |G|^2 = |group| on which the pairing vanishes.

    Metabolizers split over the primary parts, so each part is searched on
    its own and the results are combined.

    Raises:
        GroupTooLarge: If the group exceeds the enumeration bound
    """
    lf.check_size(settings)
    root = isqrt(lf.order)
    if root * root != lf.order:
        return []
    logger.detail("enumerating metabolizers", {"order": lf.order})
    per_prime: list[list[Subgroup]] = []
    for p in lf.primes():
        part = lf.primary_part(p)
        target = isqrt(part.order)
        if target * target != part.order:
            return []
        found = [s for s in isotropic_subgroups(lf, part, settings) if s.order == target]
        if not found:
            return []
        per_prime.append(found)
    result = []
    for combo in product(*per_prime):
        total = lf.trivial()
        for piece in combo:
            total = total.sum(piece)
        met = Metabolizer(lf, total.canonical_generators(), total.elements)
        met.check()
        result.append(met)
    result.sort(key=Subgroup.sort_key)
    return result


def prime_power_characters(g: Subgroup) -> list[Character]:
    """Nonzero elements of prime-power order, as characters."""
    lf = g.lf
    out = []
    for x in g.sorted_elements:
        n = lf.order_of(x)
        if is_prime_power(n):
            out.append(Character(x, n))
    return out


def min_generators(obj: "LinkingForm | Subgroup") -> int:
    """Minimal number of generators of the group (or a subgroup)."""
    if isinstance(obj, LinkingForm):
        return obj.rank
    return obj.min_generators


def is_pure(sub: Subgroup, ambient: Subgroup) -> bool:
    """True iff sub is a direct summand of ambient.

    Checked as n*ambient meet sub == n*sub for every prime power n dividing
    the exponent of the ambient group.
    """
    lf = sub.lf
    exponent = lcm(1, *(lf.order_of(x) for x in ambient.generators)) if ambient.generators else 1
    for p, k in factorint(exponent).items():
        for a in range(1, k + 1):
            n = p**a
            n_ambient = {lf.scale(n, x) for x in ambient.elements}
            n_sub = {lf.scale(n, x) for x in sub.elements}
            if {x for x in n_ambient if x in sub.elements} != n_sub:
                return False
    return True


def quotient_min_generators(sub: Subgroup, ambient: Subgroup, p: int) -> int:
    """p-rank of ambient / sub for p-groups."""
    lf = sub.lf
    killed = sum(1 for x in ambient.elements if lf.scale(p, x) in sub.elements)
    count = killed // sub.order
    r = 0
    while count > 1:
        count //= p
        r += 1
    return r


# ── Splittings ───────────────────────────────────────────────────────


class Splitting:
    """Orthogonal decomposition beta1 + beta2 of the whole group."""

    def __init__(self, beta1: Subgroup, beta2_factory: Callable[[], Subgroup], beta2_rank: Optional[int] = None):
        self.beta1 = beta1
        self._beta2_factory = beta2_factory
        self._beta2_rank = beta2_rank

    @cached_property
    def beta2(self) -> Subgroup:
        """Orthogonal complement of beta1."""
        return self._beta2_factory()

    @property
    def beta2_min_generators(self) -> int:
        """min_generators of beta2 without building it when a basis rank is known."""
        if self._beta2_rank is not None:
            return self._beta2_rank
        return self.beta2.min_generators


def _det_mod_p(rows: list[list[int]], p: int) -> int:
    m = [r[:] for r in rows]
    n = len(m)
    det = 1
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] % p), None)
        if piv is None:
            return 0
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det = det * m[c][c] % p
        inv = pow(m[c][c], -1, p)
        for r in range(c + 1, n):
            f = m[r][c] * inv % p
            if f:
                m[r] = [(a - f * b) % p for a, b in zip(m[r], m[c])]
    return det % p


def _rref_subspaces(k: int, dim: int, p: int) -> Iterator[list[list[int]]]:
    """Row-reduced bases of every dim-dimensional subspace of F_p^k."""
    for pivots in combinations(range(k), dim):
        free = [(i, j) for i, c in enumerate(pivots) for j in range(c + 1, k) if j not in pivots]
        for values in product(range(p), repeat=len(free)):
            rows = [[int(j == c) for j in range(k)] for c in pivots]
            for (i, j), v in zip(free, values):
                rows[i][j] = v
            yield rows


def _elementary_splittings(lf: LinkingForm, part: Subgroup, p: int, max_rank: int) -> Iterator[Splitting]:
    basis = part.generators
    k = len(basis)
    # pairing on the F_p basis, scaled to integers mod p
    scale = lf.exponent // p
    gram = [[lf.pair_scaled(x, y) // scale % p for y in basis] for x in basis]

    def combine(coeffs: Sequence[int]) -> Element:
        out = lf.zero
        for c, b in zip(coeffs, basis):
            if c:
                out = lf.add(out, lf.scale(c, b))
        return out

    for dim in range(0, min(k, max_rank) + 1):
        for rows in _rref_subspaces(k, dim, p):
            if dim:
                paired = [[sum(r[a] * gram[a][b] for a in range(k) if r[a]) for b in range(k)] for r in rows]
                sub_gram = [[sum(x * y for x, y in zip(pr, s)) % p for s in rows] for pr in paired]
                if not _det_mod_p(sub_gram, p):
                    continue
            beta1 = Subgroup(lf, [combine(r) for r in rows], rank=dim)
            yield Splitting(beta1, lambda b=beta1, r=k - dim: b.perp(part).with_rank(r), k - dim)


def _general_splittings(lf: LinkingForm, part: Subgroup, p: int, max_rank: int) -> Iterator[Splitting]:
    seen = set()
    layer = [lf.trivial()]
    candidates = [x for x in part.sorted_elements if x != lf.zero]
    while layer:
        layer.sort(key=Subgroup.sort_key)
        nxt = {}
        for sub in layer:
            if sub.is_nondegenerate():
                yield Splitting(sub, lambda b=sub: b.perp(part))
            for g in candidates:
                if g in sub.elements:
                    continue
                bigger = sub.extended(g)
                if bigger.elements in seen or bigger.p_rank(p) > max_rank:
                    continue
                seen.add(bigger.elements)
                nxt[bigger.elements] = bigger
        layer = list(nxt.values())


def _prime_splittings(lf: LinkingForm, p: int, max_rank: int) -> Iterator[Splitting]:
    part = lf.primary_part(p)
    elementary = all(lf.order_of(g) == p for g in part.generators)
    if elementary:
        return _elementary_splittings(lf, part, p, max_rank)
    return _general_splittings(lf, part, p, max_rank)


def orthogonal_splittings(
    lf: LinkingForm, max_rank_beta1: int, settings: Optional[Settings] = None
) -> Iterator[Splitting]:
    """Every orthogonal splitting beta1 + beta2 with min_generators(beta1) <= r.

    Both summands are nondegenerate, so beta2 is the orthogonal complement
    of beta1. Splittings decompose over primary parts; elementary abelian
    parts are enumerated as F_p-subspaces in row-reduced form.

    Yields:
        Splitting objects; beta2 is built on first access

    Raises:
        GroupTooLarge: If the group exceeds the enumeration bound
    """
    lf.check_size(settings)
    if max_rank_beta1 < 0:
        return
    logger.detail("enumerating orthogonal splittings", {"order": lf.order, "r": max_rank_beta1})
    primes = lf.primes()
    if not primes:
        yield Splitting(lf.trivial(), lf.trivial, 0)
        return
    if len(primes) == 1:
        yield from _prime_splittings(lf, primes[0], max_rank_beta1)
        return
    per_prime = [list(_prime_splittings(lf, p, max_rank_beta1)) for p in primes]
    for combo in product(*per_prime):
        total1 = lf.trivial()
        for piece in combo:
            total1 = total1.sum(piece.beta1)
        beta1 = total1.with_rank(max(piece.beta1.min_generators for piece in combo))

        def factory(parts=combo) -> Subgroup:
            total = lf.trivial()
            for piece in parts:
                total = total.sum(piece.beta2)
            return total

        rank2 = max(piece.beta2_min_generators for piece in combo)
        yield Splitting(beta1, factory, rank2)


def has_metabolic_linking_form(a: SeifertMatrix, settings: Optional[Settings] = None) -> bool:
    """True iff A + A^T is nondegenerate and its linking form has a metabolizer."""
    try:
        lf = from_seifert(a)
    except DegenerateForm:
        return False
    return bool(enumerate_metabolizers(lf, settings))
