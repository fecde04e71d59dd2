"""Exception hierarchy shared by the library modules and the CLI."""


class ConcordanceError(Exception):
    """Base class for every error raised by the toolkit.

    Attributes:
        exit_code: Process exit status the CLI uses for this error class
    """

    exit_code = 3


# ── Parse errors (exit 2) ─────────────────────────────────────────────


class ProblemFileError(ConcordanceError, ValueError):
    """The problem file is not valid YAML or does not follow the schema."""

    exit_code = 2


# ── Semantic errors (exit 3) ──────────────────────────────────────────


class UnknownName(ConcordanceError, KeyError):
    """A request references a knot, link or tree that the file does not define."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown name"


class DivisionByZero(ConcordanceError, ZeroDivisionError):
    """Division by the zero element of a cyclotomic field."""


class NotReal(ConcordanceError, ValueError):
    """A cyclotomic scalar is not fixed by complex conjugation."""


class NotHermitian(ConcordanceError, ValueError):
    """A matrix is not equal to its conjugate transpose."""


class OmegaIsOne(ConcordanceError, ValueError):
    """An evaluation point has a coordinate equal to 1."""


class DegeneratePairing(ConcordanceError, ValueError):
    """A Seifert matrix A has A - A^T not unimodular."""


class ArfNonzero(ConcordanceError, ValueError):
    """No symplectic basis with q(e_i) = 0 exists because Arf = 1."""


class MalformedCComplex(ConcordanceError, ValueError):
    """Generalized Seifert matrices violate A^(-e) = (A^e)^T or are incomplete."""


class DegenerateForm(ConcordanceError, ValueError):
    """A presentation matrix of a linking form has determinant zero."""


class NotPrimePower(ConcordanceError, ValueError):
    """A character order or evaluation level is not a prime power."""


class MissingBaseEntry(ConcordanceError, KeyError):
    """A pattern base table lacks the entry for a requested character."""

    def __init__(self, character: tuple, table: str = "pattern"):
        self.character = tuple(character)
        self.table = table
        super().__init__(
            f"base table '{table}' has no entry for character {list(self.character)}"
        )

    def __str__(self) -> str:
        return str(self.args[0])


class WindingNonZero(ConcordanceError, ValueError):
    """An infection site with nonzero winding number was supplied."""


class InadmissiblePoint(ConcordanceError, ValueError):
    """An evaluation point is not known to be admissible."""


class MissingCGValue(ConcordanceError, KeyError):
    """A Casson-Gordon evaluator has no value for a prime-power character."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "missing Casson-Gordon value"


class InconsistentBounds(ConcordanceError, ValueError):
    """Aggregated lower bound exceeds aggregated upper bound."""


# ── Computation limits (exit 4) ───────────────────────────────────────


class GroupTooLarge(ConcordanceError):
    """A group enumeration exceeds the configured bound."""

    exit_code = 4

    def __init__(self, order: int, bound: int):
        self.order = order
        self.bound = bound
        super().__init__(
            f"group of order {order} exceeds the enumeration bound {bound} "
            "(raise it with --enum-bound)"
        )


class PrecisionExhausted(ConcordanceError):
    """Interval refinement hit the configured precision ceiling."""

    exit_code = 4
