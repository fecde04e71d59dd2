"""Single-knot invariants computed from a Seifert matrix."""

from dataclasses import dataclass
from itertools import product
from math import ceil
from typing import Iterable, Optional, Sequence, Union

from sympy import Matrix, Poly, Symbol

from .errors import ArfNonzero, DegeneratePairing, OmegaIsOne
from .exact_algebra import (CyclotomicScalar, HermitianForm, IntegerMatrix,
                            RootOfUnity, SignatureResult, as_scalar,
                            hermitian_signature, root_of_unity)
from .logger import ConcordanceLogger, get_logger
from .settings import Settings

logger: ConcordanceLogger = get_logger(__name__)

Point = Union[RootOfUnity, CyclotomicScalar]
Vector2 = tuple[int, ...]

_t = Symbol("t")


@dataclass(frozen=True)
class SeifertMatrix:
    """Seifert matrix A of a knot: square, even size 2g, det(A - A^T) = 1."""

    matrix: IntegerMatrix

    def __post_init__(self):
        self._validate_shape(self.matrix)
        self._validate_unimodular(self.matrix)

    @staticmethod
    def _validate_shape(matrix: IntegerMatrix) -> None:
        if not matrix.is_square():
            raise ValueError(f"Seifert matrix must be square (got {matrix.nrows}x{matrix.ncols})")
        if matrix.nrows % 2:
            raise ValueError(f"Seifert matrix must have even size (got {matrix.nrows})")

    @staticmethod
    def _validate_unimodular(matrix: IntegerMatrix) -> None:
        det = (matrix - matrix.transpose()).det()
        if det != 1:
            raise DegeneratePairing(f"det(A - A^T) = {det}, expected 1")

    @classmethod
    def of(cls, rows: Iterable[Iterable[int]]) -> "SeifertMatrix":
        """Build from nested row lists."""
        rows = [list(r) for r in rows]
        return cls(IntegerMatrix.of(rows, len(rows)))

    @classmethod
    def unknot(cls) -> "SeifertMatrix":
        """The empty Seifert matrix."""
        return cls(IntegerMatrix.zeros(0, 0))

    @property
    def size(self) -> int:
        """Matrix size 2g."""
        return self.matrix.nrows

    @property
    def genus(self) -> int:
        """Genus of the Seifert surface."""
        return self.size // 2

    def to_lists(self) -> list[list[int]]:
        """Rows as plain lists."""
        return self.matrix.to_lists()


# ── Laurent polynomials ──────────────────────────────────────────────


@dataclass(frozen=True)
class LaurentPoly:
    """Integer polynomial up to units +-t^k, stored low-to-high.

    The stored representative has lowest exponent 0 and positive leading
    coefficient. The zero polynomial has no coefficients.
    """

    coeffs: tuple

    def __post_init__(self):
        coeffs = [int(c) for c in self.coeffs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        start = next((i for i, c in enumerate(coeffs) if c), len(coeffs))
        coeffs = coeffs[start:]
        if coeffs and coeffs[-1] < 0:
            coeffs = [-c for c in coeffs]
        object.__setattr__(self, "coeffs", tuple(coeffs))

    @classmethod
    def from_terms(cls, terms: dict[int, int]) -> "LaurentPoly":
        """Build from an exponent -> coefficient map (negative exponents allowed)."""
        if not terms:
            return cls(())
        low = min(terms)
        vec = [0] * (max(terms) - low + 1)
        for e, c in terms.items():
            vec[e - low] += c
        return cls(tuple(vec))

    def terms(self) -> dict[int, int]:
        """Nonzero coefficients keyed by exponent."""
        return {e: c for e, c in enumerate(self.coeffs) if c}

    @property
    def degree(self) -> int:
        """Span of exponents (-1 for the zero polynomial)."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        """True for the zero polynomial."""
        return not self.coeffs

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for e in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[e]
            if not c:
                continue
            mag = abs(c)
            if e == 0:
                body = str(mag)
            else:
                power = "t" if e == 1 else f"t^{e}"
                body = power if mag == 1 else f"{mag}{power}"
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(parts)


def evaluate_laurent(poly: LaurentPoly, omega: Point) -> CyclotomicScalar:
    """Exact value of the stored representative at a root of unity."""
    w = as_scalar(omega)
    result = CyclotomicScalar.zero(w.level)
    power = CyclotomicScalar.one(w.level)
    for c in poly.coeffs:
        if c:
            result = result + power * c
        power = power * w
    return result


# ── Constructions ────────────────────────────────────────────────────


def block_sum(a: SeifertMatrix, b: SeifertMatrix) -> SeifertMatrix:
    """Seifert matrix of the connected sum."""
    return SeifertMatrix(IntegerMatrix.block_diag(a.matrix, b.matrix))


def mirror(a: SeifertMatrix) -> SeifertMatrix:
    """Mirror image: -A."""
    return SeifertMatrix(-a.matrix)


def reverse(a: SeifertMatrix) -> SeifertMatrix:
    """String orientation reversal: A^T."""
    return SeifertMatrix(a.matrix.transpose())


def seifert_genus(a: SeifertMatrix) -> int:
    """Genus of the surface the matrix comes from; an upper bound for g4."""
    return a.genus


# ── Alexander polynomial ─────────────────────────────────────────────


def alexander_polynomial(a: SeifertMatrix) -> LaurentPoly:
    """Normalized det(A - t A^T); the unknot gives 1."""
    if a.size == 0:
        return LaurentPoly((1,))
    m = Matrix(a.to_lists())
    expr = (m - _t * m.T).det(method="berkowitz")
    coeffs = Poly(expr.expand(), _t).all_coeffs()
    return LaurentPoly(tuple(int(c) for c in reversed(coeffs)))


# ── Levine-Tristram signatures ───────────────────────────────────────


def lt_form(a: SeifertMatrix, omega: Point) -> HermitianForm:
    """(1 - conj(w)) A + (1 - w) A^T.

    Raises:
        OmegaIsOne: If w = 1
    """
    w = as_scalar(omega)
    if w == 1:
        raise OmegaIsOne("Levine-Tristram form is not defined at omega = 1")
    left = 1 - w.conj()
    right = 1 - w
    rows = a.to_lists()
    n = a.size
    entries = [[left * rows[i][j] + right * rows[j][i] for j in range(n)] for i in range(n)]
    return HermitianForm(w.level, tuple(tuple(r) for r in entries))


def lt_signature_nullity(
    a: SeifertMatrix, omega: Point, settings: Optional[Settings] = None
) -> SignatureResult:
    """Levine-Tristram signature and nullity at a root of unity.

    Args:
        a: Seifert matrix
        omega: Root of unity other than 1
        settings: Precision limits for the sign oracle

    Returns:
        SignatureResult of (1 - conj(w)) A + (1 - w) A^T

    Raises:
        OmegaIsOne: If w = 1
    """
    return hermitian_signature(lt_form(a, omega), settings)


def levine_tristram_profile(
    a: SeifertMatrix, d: int, settings: Optional[Settings] = None
) -> list[tuple[RootOfUnity, SignatureResult]]:
    """Signature and nullity at every primitive d-th root of unity, in order of k."""
    if d < 2:
        raise OmegaIsOne("a profile needs d >= 2")
    points = [root_of_unity(k, d) for k in range(1, d)]
    return [(w, lt_signature_nullity(a, w, settings)) for w in points if w.d == d]


def classical_genus_lower_bound(
    a: SeifertMatrix, points: Sequence[Point], settings: Optional[Settings] = None
) -> tuple[int, Optional[Point]]:
    """Murasugi-Tristram bound max ceil((|sigma(w)| + eta(w)) / 2) over the points.

    Returns:
        (bound, achieving point); the point is None when the bound is 0
    """
    best, witness = 0, None
    for w in points:
        res = lt_signature_nullity(a, w, settings)
        value = ceil((abs(res.signature) + res.nullity) / 2)
        if value > best:
            best, witness = value, w
    return best, witness


# ── Arf invariant ────────────────────────────────────────────────────


@dataclass(frozen=True)
class QuadraticRefinement:
    """q(x) = x^T A x mod 2 refining the pairing (A + A^T) mod 2."""

    dim: int
    form: tuple
    pairing: tuple

    @classmethod
    def from_seifert(cls, a: SeifertMatrix) -> "QuadraticRefinement":
        """Mod-2 reduction of a Seifert matrix."""
        rows = a.to_lists()
        n = a.size
        form = tuple(tuple(rows[i][j] % 2 for j in range(n)) for i in range(n))
        pairing = tuple(tuple((rows[i][j] + rows[j][i]) % 2 for j in range(n)) for i in range(n))
        return cls(n, form, pairing)

    def q(self, x: Vector2) -> int:
        """Quadratic value of a mod-2 vector."""
        return sum(self.form[i][j] for i in range(self.dim) if x[i] for j in range(self.dim) if x[j]) % 2

    def dot(self, x: Vector2, y: Vector2) -> int:
        """Mod-2 pairing."""
        return sum(self.pairing[i][j] for i in range(self.dim) if x[i] for j in range(self.dim) if y[j]) % 2

    def vectors(self) -> Iterable[Vector2]:
        """Every vector of Z_2^dim."""
        return product((0, 1), repeat=self.dim)


def _add2(x: Vector2, y: Vector2) -> Vector2:
    return tuple((a + b) % 2 for a, b in zip(x, y))


def symplectic_basis(ref: QuadraticRefinement) -> list[tuple[Vector2, Vector2]]:
    """Symplectic basis {(e_i, f_i)} of the mod-2 pairing by Gram-Schmidt.

    Raises:
        DegeneratePairing: If the pairing is singular mod 2
    """
    n = ref.dim
    pool: list[Vector2] = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    pairs = []
    while pool:
        e = pool[0]
        f = next((v for v in pool[1:] if ref.dot(e, v)), None)
        if f is None:
            raise DegeneratePairing("mod-2 pairing is degenerate; A - A^T is not unimodular")
        rest = []
        for v in pool[1:]:
            if v is f:
                continue
            if ref.dot(v, f):
                v = _add2(v, e)
            if ref.dot(v, e):
                v = _add2(v, f)
            rest.append(v)
        pairs.append((e, f))
        pool = rest
    return pairs


def arf(a: SeifertMatrix) -> int:
    """Arf invariant sum q(e_i) q(f_i) mod 2 over a symplectic basis."""
    ref = QuadraticRefinement.from_seifert(a)
    return sum(ref.q(e) * ref.q(f) for e, f in symplectic_basis(ref)) % 2


def arf_via_determinant(a: SeifertMatrix) -> int:
    """0 iff Delta(-1) = +-1 mod 8."""
    value = sum(c * (-1) ** e for e, c in enumerate(alexander_polynomial(a).coeffs))
    return 0 if abs(value) % 8 in (1, 7) else 1


def symplectic_basis_null_e(a: SeifertMatrix) -> list[tuple[Vector2, Vector2]]:
    """Symplectic basis with q(e_i) = 0 for every i.

    Pairs with q(e) = 1 and q(f) = 0 are swapped. Pairs with q(e) = q(f) = 1
    come in an even number when Arf = 0 and are rebuilt two at a time as
    (e1 + e2, f1), (f1 + f2, e2).

    Raises:
        ArfNonzero: If the Arf invariant is 1
    """
    ref = QuadraticRefinement.from_seifert(a)
    good, bad = [], []
    for e, f in symplectic_basis(ref):
        if not ref.q(e):
            good.append((e, f))
        elif not ref.q(f):
            good.append((f, e))
        else:
            bad.append((e, f))
    if len(bad) % 2:
        raise ArfNonzero("Arf invariant is 1, no symplectic basis with q(e_i) = 0 exists")
    for (e1, f1), (e2, f2) in zip(bad[::2], bad[1::2]):
        good.append((_add2(e1, e2), f1))
        good.append((_add2(f1, f2), e2))
    basis = sorted(good)
    if any(ref.q(e) for e, _ in basis):
        raise ValueError("symplectic basis has an e with q(e) = 1")
    logger.detail("symplectic basis with null e", {"pairs": len(basis)})
    return basis


def is_symplectic_basis(ref: QuadraticRefinement, basis: Sequence[tuple[Vector2, Vector2]]) -> bool:
    """Check e_i.f_j = delta_ij and e_i.e_j = f_i.f_j = 0."""
    if 2 * len(basis) != ref.dim:
        return False
    for i, (ei, fi) in enumerate(basis):
        for j, (ej, fj) in enumerate(basis):
            if ref.dot(ei, fj) != int(i == j):
                return False
            if i != j and (ref.dot(ei, ej) or ref.dot(fi, fj)):
                return False
    return True
