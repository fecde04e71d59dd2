"""Multivariable signatures and nullities of colored links from C-complex data."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import product
from typing import Mapping, Optional, Sequence, Union

from .errors import MalformedCComplex, OmegaIsOne
from .exact_algebra import (CyclotomicScalar, HermitianForm, IntegerMatrix,
                            RootOfUnity, as_scalar, hermitian_signature)
from .logger import ConcordanceLogger, get_logger, progress
from .seifert_knot import SeifertMatrix
from .settings import Settings, get_settings

logger: ConcordanceLogger = get_logger(__name__)

Point = Union[RootOfUnity, CyclotomicScalar]
SignVector = tuple[int, ...]


def parse_sign_key(key: Union[str, Sequence[int]]) -> SignVector:
    """Turn ``"++-"`` or ``(1, 1, -1)`` into a sign vector.

    Raises:
        MalformedCComplex: If the key has characters other than + and -
    """
    if isinstance(key, str):
        if not key or set(key) - {"+", "-"}:
            raise MalformedCComplex(f"sign key '{key}' must be a non-empty string of + and -")
        return tuple(1 if c == "+" else -1 for c in key)
    vec = tuple(int(v) for v in key)
    if not vec or any(v not in (1, -1) for v in vec):
        raise MalformedCComplex(f"sign vector {key} must contain only +1 and -1")
    return vec


def format_sign_key(eps: SignVector) -> str:
    """Inverse of parse_sign_key."""
    return "".join("+" if e > 0 else "-" for e in eps)


@dataclass(frozen=True)
class CComplexData:
    """Generalized Seifert matrices A^eps of a mu-colored link.

    Attributes:
        num_colors: mu
        num_components: m, the number of link components
        color_of_component: color index (0-based) of each component
        matrices: A^eps keyed by sign vectors in {+1, -1}^mu
        surfaces_connected: every color's surface is connected
    """

    num_colors: int
    num_components: int
    color_of_component: tuple
    matrices: Mapping[SignVector, IntegerMatrix]
    surfaces_connected: bool = True

    def __post_init__(self):
        self._validate_coloring(self.num_colors, self.num_components, self.color_of_component)
        self._validate_matrices(self.num_colors, self.matrices)
        if not self.surfaces_connected:
            raise MalformedCComplex(
                "colored surfaces must be connected; the nullity correction assumes one surface per color"
            )

    @staticmethod
    def _validate_coloring(mu: int, m: int, coloring: Sequence[int]) -> None:
        if mu < 1:
            raise MalformedCComplex(f"num_colors must be at least 1 (got {mu})")
        if m < mu:
            raise MalformedCComplex(f"num_components ({m}) is smaller than num_colors ({mu})")
        if len(coloring) != m:
            raise MalformedCComplex(
                f"color_of_component has {len(coloring)} entries for {m} components"
            )
        if set(coloring) != set(range(mu)):
            raise MalformedCComplex(
                f"coloring {list(coloring)} is not a surjection onto colors 0..{mu - 1}"
            )

    @staticmethod
    def _validate_matrices(mu: int, matrices: Mapping[SignVector, IntegerMatrix]) -> None:
        expected = set(product((1, -1), repeat=mu))
        present = set(matrices)
        if present != expected:
            missing = sorted(format_sign_key(e) for e in expected - present)
            extra = sorted(format_sign_key(e) for e in present - expected)
            raise MalformedCComplex(f"sign vectors missing {missing}, unexpected {extra}")
        sizes = {m.shape for m in matrices.values()}
        if len(sizes) != 1:
            raise MalformedCComplex(f"generalized Seifert matrices have differing shapes {sorted(sizes)}")
        shape = sizes.pop()
        if shape[0] != shape[1]:
            raise MalformedCComplex(f"generalized Seifert matrices must be square (got {shape})")
        for eps, mat in matrices.items():
            neg = tuple(-e for e in eps)
            if matrices[neg] != mat.transpose():
                raise MalformedCComplex(
                    f"A^{format_sign_key(neg)} is not the transpose of A^{format_sign_key(eps)}"
                )

    @classmethod
    def from_rows(
        cls,
        num_colors: int,
        num_components: int,
        color_of_component: Sequence[int],
        matrices: Mapping[Union[str, Sequence[int]], Sequence[Sequence[int]]],
        surfaces_connected: bool = True,
    ) -> "CComplexData":
        """Build from sign-string keys and row lists."""
        parsed = {}
        for key, rows in matrices.items():
            rows = [list(r) for r in rows]
            parsed[parse_sign_key(key)] = IntegerMatrix.of(rows, len(rows))
        return cls(num_colors, num_components, tuple(color_of_component), parsed, surfaces_connected)

    @property
    def size(self) -> int:
        """Common size of the matrices."""
        return next(iter(self.matrices.values())).nrows

    def sign_vectors(self) -> list[SignVector]:
        """Sign vectors in a fixed order (all + first)."""
        return sorted(self.matrices, reverse=True)


def knot_as_ccomplex(a: SeifertMatrix) -> CComplexData:
    """Wrap a Seifert matrix as one-colored, one-component data."""
    return CComplexData(1, 1, (0,), {(1,): a.matrix, (-1,): a.matrix.transpose()})


def _coefficient(omega: Sequence[CyclotomicScalar], eps: SignVector) -> CyclotomicScalar:
    coeff = CyclotomicScalar.one()
    for w, e in zip(omega, eps):
        coeff = coeff * (1 - (w.conj() if e > 0 else w))
    return coeff


def build_hermitian(cc: CComplexData, omega: Sequence[Point]) -> HermitianForm:
    """H(w) = sum over eps of prod_i (1 - wbar_i^eps_i) A^eps.

    Here wbar_i^(+1) is conj(w_i) and wbar_i^(-1) is w_i.

    Raises:
        OmegaIsOne: If some coordinate equals 1
        ValueError: If omega does not have one coordinate per color
    """
    if len(omega) != cc.num_colors:
        raise ValueError(f"expected {cc.num_colors} coordinates, got {len(omega)}")
    ws = [as_scalar(w) for w in omega]
    for i, w in enumerate(ws):
        if w == 1:
            raise OmegaIsOne(f"coordinate {i} of the evaluation point equals 1")
    n = cc.size
    total = [[CyclotomicScalar.zero() for _ in range(n)] for _ in range(n)]
    for eps in cc.sign_vectors():
        coeff = _coefficient(ws, eps)
        mat = cc.matrices[eps]
        for i in range(n):
            for j in range(n):
                if mat[i, j]:
                    total[i][j] = total[i][j] + coeff * mat[i, j]
    return HermitianForm.from_rows(total)


def multivariable_signature_nullity(
    cc: CComplexData, omega: Sequence[Point], settings: Optional[Settings] = None
) -> tuple[int, int]:
    """sigma_L(w) and eta_L(w) = nullity(H(w)) + (mu - 1).

    Args:
        cc: Validated C-complex data
        omega: One root of unity per color
        settings: Precision limits for the sign oracle

    Returns:
        (signature, nullity)
    """
    result = hermitian_signature(build_hermitian(cc, omega), settings)
    return result.signature, result.nullity + cc.num_colors - 1


def signature_grid(
    cc: CComplexData, points: Sequence[Sequence[Point]], settings: Optional[Settings] = None
) -> list[tuple[int, int]]:
    """Evaluate at many points on a thread pool; results follow input order."""
    settings = settings or get_settings()
    logger.detail("evaluating signature grid", {"points": len(points), "workers": settings.worker_threads})
    with ThreadPoolExecutor(max_workers=settings.worker_threads) as pool:
        futures = [pool.submit(multivariable_signature_nullity, cc, p, settings) for p in points]
        return [f.result() for f in progress(futures, desc="signatures", total=len(futures))]
