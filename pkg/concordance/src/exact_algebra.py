"""Exact arithmetic over cyclotomic fields and the integers."""

import threading
from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd
from typing import Iterable, Optional, Sequence, Union

from mpmath.ctx_iv import MPIntervalContext
from mpmath.libmp import mpf_sign
from sympy import cyclotomic_poly, sympify
from sympy.polys.densearith import dup_rem
from sympy.polys.domains import QQ
from sympy.polys.euclidtools import dup_invert
from sympy.polys.polyerrors import NotInvertible

from .errors import (DivisionByZero, NotHermitian, NotReal,
                     PrecisionExhausted)
from .logger import ConcordanceLogger, get_logger
from .settings import Settings, get_settings

logger: ConcordanceLogger = get_logger(__name__)

Rational = QQ.dtype
Number = Union[int, "Rational"]


# ── Rationals ────────────────────────────────────────────────────────


def rational(numerator: int, denominator: int = 1) -> "Rational":
    """Build a rational in lowest terms with positive denominator.

    Raises:
        DivisionByZero: If the denominator is zero
    """
    if denominator == 0:
        raise DivisionByZero("rational with zero denominator")
    return QQ(int(numerator), int(denominator))


def to_rational(value: object) -> "Rational":
    """Coerce an int, a rational or a string such as ``"-3/2"`` to a rational."""
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return QQ(value)
    if isinstance(value, Rational):
        return value
    if isinstance(value, str):
        try:
            return QQ.from_sympy(sympify(value.strip(), rational=True))
        except Exception as e:  # sympify raises many unrelated types
            raise ValueError(f"'{value}' is not a rational number") from e
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        return QQ(int(value.numerator), int(value.denominator))
    raise TypeError(f"cannot convert {type(value).__name__} to a rational")


def frac_part(value: "Rational") -> "Rational":
    """Representative of value mod 1 in [0, 1)."""
    num, den = int(value.numerator), int(value.denominator)
    return QQ(num % den, den)


def format_rational(value: "Rational") -> str:
    """Render a rational as ``p`` or ``p/q``."""
    num, den = int(value.numerator), int(value.denominator)
    return str(num) if den == 1 else f"{num}/{den}"


# ── Cyclotomic levels ────────────────────────────────────────────────


@dataclass(frozen=True)
class _Level:
    """Cached data for Q(zeta_d): the modulus and reduced powers of zeta."""

    d: int
    phi: int
    modulus: tuple
    powers: tuple


@lru_cache(maxsize=None)
def _level(d: int) -> _Level:
    if d < 1:
        raise ValueError(f"cyclotomic level must be positive (got {d})")
    modulus = [QQ(int(c)) for c in cyclotomic_poly(d, polys=True).all_coeffs()]
    phi = len(modulus) - 1
    powers = []
    for j in range(d):
        if j < phi:
            vec = [QQ.zero] * phi
            vec[j] = QQ.one
        else:
            rem = dup_rem([QQ.one] + [QQ.zero] * j, modulus, QQ)
            vec = list(reversed(rem)) + [QQ.zero] * (phi - len(rem))
        powers.append(tuple(vec))
    return _Level(d=d, phi=phi, modulus=tuple(modulus), powers=tuple(powers))


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


# ── Cyclotomic scalars ───────────────────────────────────────────────


@dataclass(frozen=True, eq=False)
class CyclotomicScalar:
    """Element of Q(zeta_d), stored as coefficients of 1, zeta_d, ..., zeta_d^(phi(d)-1).

    Equality reconciles levels, so the same field element at two levels
    compares equal. Instances are unhashable for that reason.
    """

    level: int
    coeffs: tuple

    __hash__ = None  # type: ignore[assignment]

    def __post_init__(self):
        phi = _level(self.level).phi
        if len(self.coeffs) != phi:
            raise ValueError(
                f"level {self.level} needs {phi} coefficients (got {len(self.coeffs)})"
            )

    # constructors

    @classmethod
    def from_int(cls, value: Number, level: int = 1) -> "CyclotomicScalar":
        """Embed a rational constant at the given level."""
        phi = _level(level).phi
        coeffs = [QQ.zero] * phi
        coeffs[0] = to_rational(value)
        return cls(level, tuple(coeffs))

    @classmethod
    def zero(cls, level: int = 1) -> "CyclotomicScalar":
        """Additive identity."""
        return cls.from_int(0, level)

    @classmethod
    def one(cls, level: int = 1) -> "CyclotomicScalar":
        """Multiplicative identity."""
        return cls.from_int(1, level)

    @classmethod
    def zeta_power(cls, k: int, d: int) -> "CyclotomicScalar":
        """zeta_d^k at level d (not reduced to the order of the root)."""
        return cls(d, _level(d).powers[k % d])

    @staticmethod
    def coerce(value: object, level: int = 1) -> "CyclotomicScalar":
        """Turn ints and rationals into scalars; pass scalars through."""
        if isinstance(value, CyclotomicScalar):
            return value
        return CyclotomicScalar.from_int(to_rational(value), level)

    # predicates

    def is_zero(self) -> bool:
        """Exact test against zero (canonical form)."""
        return not any(self.coeffs)

    def is_real(self) -> bool:
        """True iff the scalar lies in the maximal real subfield."""
        return self == self.conj()

    def is_rational(self) -> bool:
        """True iff all non-constant coefficients vanish."""
        return not any(self.coeffs[1:])

    def rational_value(self) -> "Rational":
        """The constant term; only meaningful for rational scalars."""
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    # level handling

    def lift(self, target: int) -> "CyclotomicScalar":
        """Re-express at a multiple of the current level."""
        if target == self.level:
            return self
        if target % self.level:
            raise ValueError(f"level {target} is not a multiple of {self.level}")
        factor = target // self.level
        info = _level(target)
        out = [QQ.zero] * info.phi
        for j, c in enumerate(self.coeffs):
            if not c:
                continue
            row = info.powers[(j * factor) % target]
            for i, r in enumerate(row):
                if r:
                    out[i] += c * r
        return CyclotomicScalar(target, tuple(out))

    def _reconcile(self, other: object) -> tuple["CyclotomicScalar", "CyclotomicScalar"]:
        other = CyclotomicScalar.coerce(other)
        level = _lcm(self.level, other.level)
        return self.lift(level), other.lift(level)

    # arithmetic

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, (CyclotomicScalar, int, Rational)) or isinstance(other, bool):
            return NotImplemented
        a, b = self._reconcile(other)
        return a.coeffs == b.coeffs

    def __add__(self, other: object) -> "CyclotomicScalar":
        a, b = self._reconcile(other)
        return CyclotomicScalar(a.level, tuple(x + y for x, y in zip(a.coeffs, b.coeffs)))

    __radd__ = __add__

    def __neg__(self) -> "CyclotomicScalar":
        return CyclotomicScalar(self.level, tuple(-c for c in self.coeffs))

    def __sub__(self, other: object) -> "CyclotomicScalar":
        a, b = self._reconcile(other)
        return CyclotomicScalar(a.level, tuple(x - y for x, y in zip(a.coeffs, b.coeffs)))

    def __rsub__(self, other: object) -> "CyclotomicScalar":
        return CyclotomicScalar.coerce(other) - self

    def __mul__(self, other: object) -> "CyclotomicScalar":
        if isinstance(other, (int, Rational)) and not isinstance(other, bool):
            q = to_rational(other)
            return CyclotomicScalar(self.level, tuple(c * q for c in self.coeffs))
        a, b = self._reconcile(other)
        d = a.level
        info = _level(d)
        buckets = [QQ.zero] * d
        for i, x in enumerate(a.coeffs):
            if not x:
                continue
            for j, y in enumerate(b.coeffs):
                if y:
                    buckets[(i + j) % d] += x * y
        out = list(buckets[: info.phi])
        for k in range(info.phi, d):
            c = buckets[k]
            if not c:
                continue
            for i, r in enumerate(info.powers[k]):
                if r:
                    out[i] += c * r
        return CyclotomicScalar(d, tuple(out))

    __rmul__ = __mul__

    def inverse(self) -> "CyclotomicScalar":
        """Multiplicative inverse modulo the cyclotomic polynomial.

        Raises:
            DivisionByZero: If the scalar is zero
        """
        if self.is_zero():
            raise DivisionByZero("division by zero in a cyclotomic field")
        if self.is_rational():
            return CyclotomicScalar.from_int(QQ.one / self.coeffs[0], self.level)
        info = _level(self.level)
        f = list(reversed(self.coeffs))
        while f and not f[0]:
            f.pop(0)
        try:
            inv = dup_invert(f, list(info.modulus), QQ)
        except NotInvertible as e:  # cannot happen for a field element
            raise DivisionByZero(str(e)) from e
        vec = list(reversed(inv)) + [QQ.zero] * (info.phi - len(inv))
        return CyclotomicScalar(self.level, tuple(vec))

    def __truediv__(self, other: object) -> "CyclotomicScalar":
        other = CyclotomicScalar.coerce(other)
        return self * other.inverse()

    def __rtruediv__(self, other: object) -> "CyclotomicScalar":
        return CyclotomicScalar.coerce(other) * self.inverse()

    def __pow__(self, exponent: int) -> "CyclotomicScalar":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = CyclotomicScalar.one(self.level)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def conj(self) -> "CyclotomicScalar":
        """Complex conjugate: zeta^k -> zeta^(-k)."""
        d = self.level
        info = _level(d)
        out = [QQ.zero] * info.phi
        for j, c in enumerate(self.coeffs):
            if not c:
                continue
            for i, r in enumerate(info.powers[(-j) % d]):
                if r:
                    out[i] += c * r
        return CyclotomicScalar(d, tuple(out))

    def __repr__(self) -> str:
        terms = []
        for j, c in enumerate(self.coeffs):
            if not c:
                continue
            coeff = format_rational(c)
            if j == 0:
                terms.append(coeff)
            else:
                power = "z" if j == 1 else f"z^{j}"
                terms.append(power if coeff == "1" else f"{coeff}*{power}")
        body = " + ".join(terms) if terms else "0"
        return f"CyclotomicScalar[{self.level}]({body})"


def cyclotomic_arith(
    a: CyclotomicScalar, b: Optional[CyclotomicScalar], op: str
) -> CyclotomicScalar:
    """Apply one field operation by name.

    Args:
        a: Left operand
        b: Right operand (ignored for ``conj``)
        op: One of add, sub, mul, div, conj

    Returns:
        Canonical result at the reconciled level

    Raises:
        DivisionByZero: For div by zero
        ValueError: For an unknown operation name
    """
    if op == "conj":
        return a.conj()
    if b is None:
        raise ValueError(f"operation '{op}' needs two operands")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"Unknown cyclotomic operation '{op}'. Use add, sub, mul, div or conj.")


# ── Roots of unity ───────────────────────────────────────────────────


@dataclass(frozen=True, order=True)
class RootOfUnity:
    """exp(2*pi*i*k/d) with 0 <= k < d and gcd(k, d) = 1 (d is the order)."""

    k: int
    d: int

    def __post_init__(self):
        if self.d < 1 or not 0 <= self.k < self.d or gcd(self.k, self.d) != 1:
            raise ValueError(f"RootOfUnity({self.k}, {self.d}) is not reduced")

    @property
    def order(self) -> int:
        """Multiplicative order."""
        return self.d

    @property
    def scalar(self) -> CyclotomicScalar:
        """The root as a field element at level equal to its order."""
        return CyclotomicScalar.zeta_power(self.k, self.d)

    def is_one(self) -> bool:
        """True for the trivial root."""
        return self.d == 1

    def conj(self) -> "RootOfUnity":
        """Complex conjugate root."""
        return root_of_unity(-self.k, self.d)

    def power(self, m: int) -> "RootOfUnity":
        """The root raised to an integer power."""
        return root_of_unity(self.k * m, self.d)

    def __str__(self) -> str:
        return f"{self.k}/{self.d}"


def root_of_unity(k: int, d: int) -> RootOfUnity:
    """exp(2*pi*i*k/d), reduced to lowest terms.

    Raises:
        ValueError: If d is not positive
    """
    if d < 1:
        raise ValueError(f"root of unity denominator must be positive (got {d})")
    k %= d
    g = gcd(k, d)
    return RootOfUnity(k // g, d // g)


def order_of_root(k: int, d: int) -> int:
    """Multiplicative order of exp(2*pi*i*k/d)."""
    return root_of_unity(k, d).d


def parse_root(text: object) -> RootOfUnity:
    """Parse ``"k/d"`` (or an int 0/1 meaning the trivial root) into a root of unity.

    Raises:
        ValueError: If the text is not of the form k/d with d > 0
    """
    raw = str(text).strip()
    if "/" not in raw:
        try:
            value = int(raw)
        except ValueError as e:
            raise ValueError(f"'{raw}' is not a root of unity of the form k/d") from e
        return root_of_unity(value, 1)
    num, _, den = raw.partition("/")
    try:
        k, d = int(num), int(den)
    except ValueError as e:
        raise ValueError(f"'{raw}' is not a root of unity of the form k/d") from e
    if d <= 0:
        raise ValueError(f"'{raw}': denominator must be positive")
    return root_of_unity(k, d)


def as_scalar(omega: Union[RootOfUnity, CyclotomicScalar]) -> CyclotomicScalar:
    """Accept either representation of an evaluation point."""
    if isinstance(omega, RootOfUnity):
        return omega.scalar
    return omega


# ── Certified signs ──────────────────────────────────────────────────

_interval_contexts = threading.local()


def _interval_context() -> MPIntervalContext:
    ctx = getattr(_interval_contexts, "ctx", None)
    if ctx is None:
        ctx = MPIntervalContext()
        _interval_contexts.ctx = ctx
    return ctx


def _real_part_signs(x: CyclotomicScalar, bits: int) -> tuple[int, int]:
    """Signs of the endpoints of an enclosure of Re(x) at zeta_d = exp(2*pi*i/d)."""
    ctx = _interval_context()
    ctx.prec = bits
    total = ctx.mpf(0)
    two_pi = 2 * ctx.pi
    for j, c in enumerate(x.coeffs):
        if not c:
            continue
        term = ctx.mpf(int(c.numerator)) / int(c.denominator)
        if j:
            term = term * ctx.cos(two_pi * j / x.level)
        total = total + term
    lo, hi = total._mpi_
    return mpf_sign(lo), mpf_sign(hi)


def certified_sign(x: CyclotomicScalar, settings: Optional[Settings] = None) -> int:
    """Sign of a real cyclotomic number under zeta_d = exp(2*pi*i/d).

    Zero is decided exactly from the canonical form; otherwise an interval
    enclosure is refined, doubling the working precision, until it
    excludes zero.

    Args:
        x: A scalar fixed by conjugation
        settings: Precision limits (defaults to the bundled settings)

    Returns:
        -1, 0 or +1

    Raises:
        NotReal: If x is not in the maximal real subfield
        PrecisionExhausted: If the precision ceiling is reached
    """
    if x.is_zero():
        return 0
    if x.is_rational():
        return 1 if x.coeffs[0] > 0 else -1
    if not x.is_real():
        raise NotReal(f"{x} is not fixed by complex conjugation")
    settings = settings or get_settings()
    bits = settings.precision_start_bits
    while bits <= settings.precision_max_bits:
        lo, hi = _real_part_signs(x, bits)
        if lo > 0:
            return 1
        if hi < 0:
            return -1
        logger.detail("sign interval straddles zero, doubling precision", {"bits": bits})
        bits *= 2
    raise PrecisionExhausted(
        f"could not separate {x} from zero within {settings.precision_max_bits} bits"
    )


# ── Integer matrices ─────────────────────────────────────────────────


@dataclass(frozen=True)
class IntegerMatrix:
    """Dense integer matrix; a 0x0 matrix is allowed."""

    entries: tuple
    ncols: int = -1

    def __post_init__(self):
        rows = tuple(tuple(int(v) for v in row) for row in self.entries)
        width = len(rows[0]) if rows else max(self.ncols, 0)
        if self.ncols >= 0 and rows and width != self.ncols:
            raise ValueError(f"declared {self.ncols} columns but rows have {width}")
        for i, row in enumerate(rows):
            if len(row) != width:
                raise ValueError(
                    f"row {i} has {len(row)} entries, expected {width} (ragged matrix)"
                )
        object.__setattr__(self, "entries", rows)
        object.__setattr__(self, "ncols", width)

    @classmethod
    def of(cls, rows: Iterable[Iterable[int]], ncols: int = -1) -> "IntegerMatrix":
        """Build from nested iterables."""
        return cls(tuple(tuple(r) for r in rows), ncols)

    @classmethod
    def identity(cls, n: int) -> "IntegerMatrix":
        """n x n identity."""
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)), n)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "IntegerMatrix":
        """All-zero matrix of the given shape."""
        return cls(tuple((0,) * ncols for _ in range(nrows)), ncols)

    @classmethod
    def block_diag(cls, *blocks: "IntegerMatrix") -> "IntegerMatrix":
        """Block-diagonal sum."""
        total_r = sum(b.nrows for b in blocks)
        total_c = sum(b.ncols for b in blocks)
        rows = [[0] * total_c for _ in range(total_r)]
        r0 = c0 = 0
        for b in blocks:
            for i, row in enumerate(b.entries):
                rows[r0 + i][c0 : c0 + b.ncols] = row
            r0 += b.nrows
            c0 += b.ncols
        return cls.of(rows, total_c)

    @property
    def nrows(self) -> int:
        """Number of rows."""
        return len(self.entries)

    @property
    def shape(self) -> tuple[int, int]:
        """(rows, cols)."""
        return self.nrows, self.ncols

    def is_square(self) -> bool:
        """True for square matrices (including 0x0)."""
        return self.nrows == self.ncols

    def __getitem__(self, idx: tuple[int, int]) -> int:
        i, j = idx
        return self.entries[i][j]

    def transpose(self) -> "IntegerMatrix":
        """Transpose."""
        if not self.nrows:
            return IntegerMatrix.zeros(self.ncols, 0)
        return IntegerMatrix.of(zip(*self.entries), self.nrows)

    def __add__(self, other: "IntegerMatrix") -> "IntegerMatrix":
        self._require_same_shape(other)
        return IntegerMatrix.of(
            [[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)], self.ncols
        )

    def __sub__(self, other: "IntegerMatrix") -> "IntegerMatrix":
        self._require_same_shape(other)
        return IntegerMatrix.of(
            [[a - b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)], self.ncols
        )

    def __neg__(self) -> "IntegerMatrix":
        return IntegerMatrix.of([[-a for a in r] for r in self.entries], self.ncols)

    def scale(self, c: int) -> "IntegerMatrix":
        """Multiply every entry by an integer."""
        return IntegerMatrix.of([[c * a for a in r] for r in self.entries], self.ncols)

    def __matmul__(self, other: "IntegerMatrix") -> "IntegerMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        cols = list(zip(*other.entries)) if other.nrows else [()] * other.ncols
        return IntegerMatrix.of(
            [[sum(a * b for a, b in zip(row, col)) for col in cols] for row in self.entries],
            other.ncols,
        )

    def apply(self, vector: Sequence[int]) -> tuple[int, ...]:
        """Matrix-vector product."""
        return tuple(sum(a * v for a, v in zip(row, vector)) for row in self.entries)

    def det(self) -> int:
        """Exact determinant by Bareiss fraction-free elimination (1 for 0x0)."""
        if not self.is_square():
            raise ValueError(f"determinant of non-square {self.shape} matrix")
        n = self.nrows
        m = [list(r) for r in self.entries]
        sign, prev = 1, 1
        for k in range(n - 1):
            if m[k][k] == 0:
                swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
                if swap is None:
                    return 0
                m[k], m[swap] = m[swap], m[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            prev = m[k][k]
        return sign * m[n - 1][n - 1] if n else 1

    def to_lists(self) -> list[list[int]]:
        """Plain nested lists (for serialization)."""
        return [list(r) for r in self.entries]

    def _require_same_shape(self, other: "IntegerMatrix") -> None:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch: {self.shape} vs {other.shape}")


# ── Smith normal form ────────────────────────────────────────────────


class SmithNormalForm:
    """Smith normal form D = U * M * V with U, V unimodular.

    D is diagonal with d_i | d_(i+1) and d_i >= 0. The inverse of U is
    tracked alongside, since cokernel coordinates need both directions.

    Usage
    -----
    snf = SmithNormalForm(matrix)
    snf.run()
    snf.D, snf.U, snf.V, snf.U_inv
    """

    def __init__(self, matrix: IntegerMatrix):
        self._orig = matrix
        self._m, self._n = matrix.shape
        self._A = matrix.to_lists()
        self._U = IntegerMatrix.identity(self._m).to_lists()
        self._Uinv = IntegerMatrix.identity(self._m).to_lists()
        self._V = IntegerMatrix.identity(self._n).to_lists()
        self._done = False

    # elementary operations, mirrored on the transforms

    def _swap_rows(self, i: int, j: int) -> None:
        if i == j:
            return
        for mat in (self._A, self._U):
            mat[i], mat[j] = mat[j], mat[i]
        for row in self._Uinv:
            row[i], row[j] = row[j], row[i]

    def _swap_cols(self, i: int, j: int) -> None:
        if i == j:
            return
        for mat in (self._A, self._V):
            for row in mat:
                row[i], row[j] = row[j], row[i]

    def _add_row(self, target: int, source: int, c: int) -> None:
        """row[target] += c * row[source]."""
        for mat in (self._A, self._U):
            src = mat[source]
            mat[target] = [a + c * b for a, b in zip(mat[target], src)]
        for row in self._Uinv:
            row[source] -= c * row[target]

    def _add_col(self, target: int, source: int, c: int) -> None:
        """col[target] += c * col[source]."""
        for mat in (self._A, self._V):
            for row in mat:
                row[target] += c * row[source]

    def _negate_row(self, i: int) -> None:
        for mat in (self._A, self._U):
            mat[i] = [-a for a in mat[i]]
        for row in self._Uinv:
            row[i] = -row[i]

    def _min_pivot(self, t: int) -> Optional[tuple[int, int]]:
        best = None
        for i in range(t, self._m):
            for j in range(t, self._n):
                v = abs(self._A[i][j])
                if v and (best is None or v < best[0]):
                    best = (v, i, j)
        return None if best is None else (best[1], best[2])

    def _clear_cross(self, t: int) -> bool:
        """Reduce row t and column t modulo the pivot; True when both are clear."""
        A = self._A
        p = A[t][t]
        clear = True
        for i in range(t + 1, self._m):
            if A[i][t]:
                self._add_row(i, t, -(A[i][t] // p))
                clear = clear and A[i][t] == 0
        for j in range(t + 1, self._n):
            if A[t][j]:
                self._add_col(j, t, -(A[t][j] // p))
                clear = clear and A[t][j] == 0
        return clear

    def _smallest_in_cross(self, t: int) -> tuple[int, int]:
        A = self._A
        candidates = [(abs(A[i][t]), i, t) for i in range(t, self._m) if A[i][t]]
        candidates += [(abs(A[t][j]), t, j) for j in range(t + 1, self._n) if A[t][j]]
        _, i, j = min(candidates)
        return i, j

    def run(self) -> "SmithNormalForm":
        """Compute the decomposition and check U * M * V == D."""
        if self._done:
            return self
        t = 0
        while t < min(self._m, self._n):
            pivot = self._min_pivot(t)
            if pivot is None:
                break
            self._swap_rows(t, pivot[0])
            self._swap_cols(t, pivot[1])
            while True:
                if not self._clear_cross(t):
                    i, j = self._smallest_in_cross(t)
                    self._swap_rows(t, i)
                    self._swap_cols(t, j)
                    continue
                bad = next(
                    (
                        i
                        for i in range(t + 1, self._m)
                        for j in range(t + 1, self._n)
                        if self._A[i][j] % self._A[t][t]
                    ),
                    None,
                )
                if bad is None:
                    break
                self._add_row(t, bad, 1)
            if self._A[t][t] < 0:
                self._negate_row(t)
            t += 1
        self._done = True
        if (self.U @ self._orig @ self.V).entries != self.D.entries:
            raise ValueError("Smith normal form check U·M·V = D failed")
        return self

    @property
    def D(self) -> IntegerMatrix:  # pylint: disable=invalid-name
        """Diagonal factor."""
        return IntegerMatrix.of(self._A, self._n)

    @property
    def U(self) -> IntegerMatrix:  # pylint: disable=invalid-name
        """Left unimodular factor."""
        return IntegerMatrix.of(self._U, self._m)

    @property
    def U_inv(self) -> IntegerMatrix:  # pylint: disable=invalid-name
        """Inverse of the left factor."""
        return IntegerMatrix.of(self._Uinv, self._m)

    @property
    def V(self) -> IntegerMatrix:  # pylint: disable=invalid-name
        """Right unimodular factor."""
        return IntegerMatrix.of(self._V, self._n)

    @property
    def diagonal(self) -> list[int]:
        """The diagonal entries d_1 | d_2 | ..."""
        return [self._A[i][i] for i in range(min(self._m, self._n))]


def smith_normal_form(
    matrix: IntegerMatrix,
) -> tuple[IntegerMatrix, IntegerMatrix, IntegerMatrix]:
    """Smith normal form of an integer matrix.

    Args:
        matrix: Any integer matrix

    Returns:
        (D, U, V) with U * matrix * V = D
    """
    snf = SmithNormalForm(matrix).run()
    return snf.D, snf.U, snf.V


# ── Matrices over cyclotomic fields ──────────────────────────────────

ScalarMatrix = list[list[CyclotomicScalar]]


def _as_scalar_rows(matrix: Sequence[Sequence[object]]) -> ScalarMatrix:
    return [[CyclotomicScalar.coerce(v) for v in row] for row in matrix]


def _eliminate(rows: ScalarMatrix) -> tuple[int, CyclotomicScalar]:
    """Row-reduce in place; return (rank, determinant if square)."""
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    rank = 0
    det = CyclotomicScalar.one()
    for col in range(ncols):
        pivot = next((r for r in range(rank, nrows) if not rows[r][col].is_zero()), None)
        if pivot is None:
            det = CyclotomicScalar.zero()
            continue
        if pivot != rank:
            rows[rank], rows[pivot] = rows[pivot], rows[rank]
            det = -det
        p = rows[rank][col]
        det = det * p
        inv = p.inverse()
        for r in range(rank + 1, nrows):
            if rows[r][col].is_zero():
                continue
            factor = rows[r][col] * inv
            rows[r] = [a - factor * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
        if rank == nrows:
            if ncols > nrows:
                det = CyclotomicScalar.zero()
            break
    return rank, det


def rank_over_cyclotomic(matrix: Sequence[Sequence[object]]) -> int:
    """Exact rank over Q(zeta_d) by Gaussian elimination.

    Args:
        matrix: Rows of scalars (ints and rationals are accepted)

    Returns:
        The rank
    """
    rows = _as_scalar_rows(matrix)
    if not rows or not rows[0]:
        return 0
    rank, _ = _eliminate(rows)
    return rank


def determinant_over_cyclotomic(matrix: Sequence[Sequence[object]]) -> CyclotomicScalar:
    """Exact determinant of a square scalar matrix (1 for the empty matrix)."""
    rows = _as_scalar_rows(matrix)
    if any(len(r) != len(rows) for r in rows):
        raise ValueError("determinant of a non-square matrix")
    if not rows:
        return CyclotomicScalar.one()
    _, det = _eliminate(rows)
    return det


# ── Hermitian forms and signatures ───────────────────────────────────


@dataclass(frozen=True)
class SignatureResult:
    """Signature and nullity of a Hermitian form."""

    signature: int
    nullity: int
    dim: int

    def __post_init__(self):
        if self.nullity < 0 or abs(self.signature) + self.nullity > self.dim:
            raise ValueError(f"inconsistent signature data {self}")
        if (self.signature - (self.dim - self.nullity)) % 2:
            raise ValueError(f"signature parity violated in {self}")

    @property
    def rank(self) -> int:
        """dim - nullity."""
        return self.dim - self.nullity


@dataclass(frozen=True)
class HermitianForm:
    """Square matrix over Q(zeta_d) equal to its conjugate transpose."""

    level: int
    entries: tuple = field(repr=False)

    def __post_init__(self):
        rows = tuple(tuple(CyclotomicScalar.coerce(v).lift(self.level) for v in row) for row in self.entries)
        n = len(rows)
        for i, row in enumerate(rows):
            if len(row) != n:
                raise NotHermitian(f"row {i} has {len(row)} entries in a {n}x{n} form")
        for i in range(n):
            for j in range(i, n):
                if rows[j][i] != rows[i][j].conj():
                    raise NotHermitian(f"entry ({j},{i}) is not the conjugate of entry ({i},{j})")
        object.__setattr__(self, "entries", rows)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[object]]) -> "HermitianForm":
        """Build at the lcm of the entry levels."""
        level = 1
        scalars = _as_scalar_rows(rows)
        for row in scalars:
            for v in row:
                level = _lcm(level, v.level)
        return cls(level, tuple(tuple(row) for row in scalars))

    @property
    def dim(self) -> int:
        """Size of the matrix."""
        return len(self.entries)

    def congruent(self, p: Sequence[Sequence[object]]) -> "HermitianForm":
        """P* H P for a square scalar matrix P."""
        pm = _as_scalar_rows(p)
        n = self.dim
        hp = [
            [sum((self.entries[i][k] * pm[k][j] for k in range(n)), CyclotomicScalar.zero()) for j in range(n)]
            for i in range(n)
        ]
        out = [
            [sum((pm[k][i].conj() * hp[k][j] for k in range(n)), CyclotomicScalar.zero()) for j in range(n)]
            for i in range(n)
        ]
        return HermitianForm.from_rows(out)


def hermitian_signature(form: HermitianForm, settings: Optional[Settings] = None) -> SignatureResult:
    """Signature and nullity by congruence diagonalization.

    A nonzero diagonal entry is used as a 1x1 pivot and its sign is
    certified. When every remaining diagonal entry vanishes but an
    off-diagonal entry b does not, the 2x2 block [[0, b], [conj(b), 0]] is
    split off as a hyperbolic pair (signature 0, rank 2). Whatever is left
    once the remaining block is zero is the nullity.

    Args:
        form: A validated Hermitian form
        settings: Precision limits for the sign oracle

    Returns:
        SignatureResult of the form
    """
    n = form.dim
    h = [list(row) for row in form.entries]
    active = list(range(n))
    signature = 0
    while active:
        diag = next((i for i in active if not h[i][i].is_zero()), None)
        if diag is not None:
            a = h[diag][diag]
            signature += certified_sign(a, settings)
            rest = [i for i in active if i != diag]
            inv = a.inverse()
            col = {r: h[r][diag] for r in rest}
            for r in rest:
                if col[r].is_zero():
                    continue
                factor = col[r] * inv
                for s in rest:
                    if not h[diag][s].is_zero():
                        h[r][s] = h[r][s] - factor * h[diag][s]
            active = rest
            continue
        pair = next(
            ((i, j) for i in active for j in active if i < j and not h[i][j].is_zero()),
            None,
        )
        if pair is None:
            break
        i, j = pair
        inv_ij = h[i][j].inverse()
        inv_ji = h[j][i].inverse()
        rest = [r for r in active if r not in pair]
        col_i = {r: h[r][i] for r in rest}
        col_j = {r: h[r][j] for r in rest}
        for r in rest:
            if col_i[r].is_zero() and col_j[r].is_zero():
                continue
            left_j = col_i[r] * inv_ji
            left_i = col_j[r] * inv_ij
            for s in rest:
                h[r][s] = h[r][s] - left_j * h[j][s] - left_i * h[i][s]
        active = rest
    nullity = len(active)
    return SignatureResult(signature=signature, nullity=nullity, dim=n)
