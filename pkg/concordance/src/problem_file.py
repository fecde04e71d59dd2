"""Parser for YAML problem files describing knots, links, satellites and requests."""

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import yaml

from .casson_gordon import (ConnectedSumNode, InfectionSite, PatternBaseTable,
                            PatternNode, SatelliteTree, companion_seifert)
from .ccomplex_link import CComplexData
from .errors import ProblemFileError, UnknownName
from .exact_algebra import IntegerMatrix, parse_root
from .linking_form import Element, LinkingForm, from_presentation, from_seifert
from .logger import ConcordanceLogger, get_logger
from .obstructions import (ALL_RULES, Assertion, BoundInputs, EvaluationPoint,
                           StablySliceInputs, tree_evaluator)
from .seifert_knot import SeifertMatrix, block_sum, mirror, reverse
from .settings import Settings, get_settings

logger: ConcordanceLogger = get_logger(__name__)

COMMANDS = (
    "invariants",
    "multisig",
    "arf",
    "linkingform",
    "metabolizers",
    "cg-satellite",
    "sn-bounds",
    "g4-check",
    "cobordism",
)


@dataclass(frozen=True)
class LinkSpec:
    """A colored link: C-complex data plus optional stably-slice invariants."""

    ccomplex: CComplexData
    stably_slice: Optional[StablySliceInputs] = None

    @property
    def components(self) -> int:
        """Component count m."""
        return self.ccomplex.num_components


@dataclass(frozen=True)
class Request:
    """One computation requested by the file.

    Attributes:
        command: Subcommand name
        target: Knot, link, pattern or satellite name
        points: Resolved evaluation points
        params: Remaining command-specific keys
    """

    command: str
    target: Optional[str] = None
    points: tuple = ()
    params: Mapping = field(default_factory=dict)


@dataclass(eq=False)
class ProblemFile:
    """Validated contents of a problem file."""

    format: int
    knots: dict = field(default_factory=dict)
    links: dict = field(default_factory=dict)
    patterns: dict = field(default_factory=dict)
    satellites: dict = field(default_factory=dict)
    points: dict = field(default_factory=dict)
    assertions: dict = field(default_factory=dict)
    requests: list = field(default_factory=list)
    source: Optional[str] = None

    def knot(self, name: str) -> SeifertMatrix:
        """Seifert matrix of a named knot.

        Raises:
            UnknownName: If no knot has that name
        """
        if name not in self.knots:
            raise UnknownName(f"unknown knot '{name}'; defined knots: {sorted(self.knots)}")
        return self.knots[name]

    def link(self, name: str) -> LinkSpec:
        """A named link."""
        if name not in self.links:
            raise UnknownName(f"unknown link '{name}'; defined links: {sorted(self.links)}")
        return self.links[name]

    def satellite(self, name: str) -> SatelliteTree:
        """A named satellite tree."""
        if name not in self.satellites:
            raise UnknownName(f"unknown satellite '{name}'; defined satellites: {sorted(self.satellites)}")
        return self.satellites[name]

    def linking_form(self, name: str) -> LinkingForm:
        """Linking form of a knot, pattern or satellite.

        Raises:
            UnknownName: If the name is not defined
        """
        if name in self.knots:
            return from_seifert(self.knots[name])
        if name in self.patterns:
            return self.patterns[name].form
        if name in self.satellites:
            return self.satellites[name].form
        raise UnknownName(f"'{name}' is not a knot, pattern or satellite")

    def seifert_of(self, name: str) -> Optional[SeifertMatrix]:
        """Seifert matrix of a knot, or of a satellite through its pattern; None if unknown."""
        if name in self.knots:
            return self.knots[name]
        if name in self.satellites:
            try:
                return companion_seifert(self.satellites[name])
            except ValueError:
                return None
        raise UnknownName(f"'{name}' is not a knot or satellite")

    def requests_for(self, command: str) -> list[Request]:
        """Requests of one command, in file order."""
        return [r for r in self.requests if r.command == command]

    def bound_inputs(
        self,
        name: str,
        sigma_minus1: Optional[int] = None,
        max_candidate: Optional[int] = None,
        points: Sequence[EvaluationPoint] = (),
        settings: Optional[Settings] = None,
    ) -> BoundInputs:
        """Collect everything aggregate needs about a knot, satellite or link.

        Raises:
            UnknownName: If the target is not defined
        """
        assertions = tuple(self.assertions.get(name, ()))
        if name in self.links:
            link = self.links[name]
            return BoundInputs(
                name=name,
                ccomplex=link.ccomplex,
                components=link.components,
                points=tuple(points),
                stably_slice=link.stably_slice,
                assertions=assertions,
                max_candidate=max_candidate,
            )
        if name in self.satellites:
            tree = self.satellites[name]
            return BoundInputs(
                name=name,
                seifert=self.seifert_of(name),
                points=tuple(points),
                cg_form=tree.form,
                cg_eval=tree_evaluator(tree, settings),
                sigma_minus1=sigma_minus1,
                assertions=assertions,
                max_candidate=max_candidate,
            )
        seifert = self.knot(name)
        return BoundInputs(
            name=name,
            seifert=seifert,
            points=tuple(points),
            sigma_minus1=sigma_minus1,
            assertions=assertions,
            max_candidate=max_candidate,
        )


def _fail(msg: str) -> None:
    raise ProblemFileError(f"Invalid problem file: {msg}")


def _rows(value: object, where: str) -> list[list[int]]:
    if not isinstance(value, list) or any(not isinstance(r, list) for r in value):
        _fail(f"{where} must be a list of rows")
    try:
        return [[int(v) for v in row] for row in value]
    except (TypeError, ValueError):
        _fail(f"{where} must contain integers only")
    return []


def _mapping(value: object, where: str) -> dict:
    if value is None:
        return {}
    if not isinstance(value, dict):
        _fail(f"'{where}' must be a mapping (got {type(value).__name__})")
    return value


def _int(value: object, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(f"{where} must be an integer (got {value!r})")
    return value


def parse_element(lf: LinkingForm, raw: object, where: str = "element") -> Element:
    """A group element given in Smith coordinates or as {vector: [...]} in presentation coordinates.

    Raises:
        ProblemFileError: On a length mismatch or a malformed mapping
    """
    if isinstance(raw, dict):
        if "vector" not in raw:
            _fail(f"{where} must be a list of Smith coordinates or a mapping with 'vector'")
        vec = raw["vector"]
        if not isinstance(vec, list) or len(vec) != lf.presentation.nrows:
            _fail(f"{where}.vector needs {lf.presentation.nrows} integers")
        return lf.snf_element([int(v) for v in vec])
    if not isinstance(raw, (list, tuple)) or len(raw) != lf.rank:
        _fail(f"{where} needs {lf.rank} Smith coordinates (invariant factors {list(lf.invariant_factors)})")
    return lf.element([int(v) for v in raw])


def parse_point_spec(raw: object) -> EvaluationPoint:
    """A point from "k/d,k/d" text or a list of k/d entries.

    Raises:
        ProblemFileError: On malformed coordinates
    """
    parts = raw if isinstance(raw, list) else str(raw).split(",")
    try:
        return tuple(parse_root(p) for p in parts)
    except ValueError as e:
        raise ProblemFileError(f"Invalid problem file: bad evaluation point {raw!r}: {e}") from e


class ProblemFileParser:
    """Turn YAML text into a validated ProblemFile."""

    _SECTIONS = ("knots", "links", "patterns", "satellites", "points")
    _LIST_SECTIONS = ("assertions", "requests")

    def __init__(self, content: str, source: Optional[str] = None, settings: Optional[Settings] = None):
        """Load and structurally validate problem-file content.

        Args:
            content: YAML text
            source: File name for messages
            settings: Supported format versions

        Raises:
            ProblemFileError: If the text is not YAML or the layout is wrong
        """
        try:
            self._data = yaml.safe_load(content)
        except yaml.YAMLError as e:
            raise ProblemFileError(f"Invalid problem file: not valid YAML ({e})") from e
        if self._data is None:
            self._data = {}
        self._source = source
        self._settings = settings or get_settings()
        self._validate_schema(self._data, self._settings)

    @staticmethod
    def _validate_schema(data: object, settings: Settings) -> None:
        """Check the top-level layout and the format header.

        Raises:
            ProblemFileError: Describing the first structural problem found
        """
        if not isinstance(data, dict):
            _fail(f"top-level value must be a YAML mapping (got {type(data).__name__})")
        if "format" not in data:
            _fail("missing 'format' header (expected format: 1)")
        if not settings.supports_format(data["format"]):
            _fail(
                f"format {data['format']!r} is not supported; "
                f"this build reads formats {list(settings.supported_formats)}"
            )
        known = set(ProblemFileParser._SECTIONS) | set(ProblemFileParser._LIST_SECTIONS) | {"format", "description"}
        unknown = sorted(set(data) - known)
        if unknown:
            _fail(f"unknown top-level sections {unknown}")
        for section in ProblemFileParser._SECTIONS:
            _mapping(data.get(section), section)
        for section in ProblemFileParser._LIST_SECTIONS:
            value = data.get(section)
            if value is not None and not isinstance(value, list):
                _fail(f"'{section}' must be a sequence (got {type(value).__name__})")

    def parse(self) -> ProblemFile:
        """Build every object, resolving references.

        Raises:
            ProblemFileError: For malformed entries
            UnknownName: For references to undefined names
        """
        pf = ProblemFile(format=int(str(self._data["format"]).split(".")[0]), source=self._source)
        pf.knots = self._parse_knots(_mapping(self._data.get("knots"), "knots"))
        pf.patterns = self._parse_patterns(_mapping(self._data.get("patterns"), "patterns"))
        pf.satellites = self._parse_satellites(
            _mapping(self._data.get("satellites"), "satellites"), pf.knots, pf.patterns
        )
        pf.links = {
            name: self._parse_link(name, _mapping(body, f"links.{name}"))
            for name, body in _mapping(self._data.get("links"), "links").items()
        }
        pf.points = {
            name: parse_point_spec(raw) for name, raw in _mapping(self._data.get("points"), "points").items()
        }
        pf.assertions = self._parse_assertions(self._data.get("assertions") or [], pf)
        pf.requests = [self._parse_request(i, raw, pf) for i, raw in enumerate(self._data.get("requests") or [])]
        logger.detail(
            "problem file parsed",
            {"knots": len(pf.knots), "links": len(pf.links), "satellites": len(pf.satellites), "requests": len(pf.requests)},
        )
        return pf

    # knots

    def _parse_knots(self, raw: dict) -> dict[str, SeifertMatrix]:
        knots: dict[str, SeifertMatrix] = {}
        visiting: set[str] = set()

        def build(name: str) -> SeifertMatrix:
            if name in knots:
                return knots[name]
            if name not in raw:
                raise UnknownName(f"unknown knot '{name}'")
            if name in visiting:
                _fail(f"knot '{name}' is defined in terms of itself")
            visiting.add(name)
            body = raw[name]
            if isinstance(body, list):
                body = {"seifert": body}
            body = _mapping(body, f"knots.{name}")
            if "seifert" in body:
                rows = _rows(body["seifert"], f"knots.{name}.seifert")
                matrix = SeifertMatrix(IntegerMatrix.of(rows, len(rows)))
            elif "sum" in body:
                parts = body["sum"]
                if not isinstance(parts, list) or not parts:
                    _fail(f"knots.{name}.sum must be a non-empty list of knot names")
                matrix = build(str(parts[0]))
                for part in parts[1:]:
                    matrix = block_sum(matrix, build(str(part)))
            elif "mirror" in body:
                matrix = mirror(build(str(body["mirror"])))
            elif "reverse" in body:
                matrix = reverse(build(str(body["reverse"])))
            else:
                _fail(f"knots.{name} needs one of seifert, sum, mirror or reverse")
            visiting.discard(name)
            knots[name] = matrix
            return matrix

        for name in raw:
            build(name)
        return knots

    # patterns

    def _parse_patterns(self, raw: dict) -> dict[str, PatternBaseTable]:
        tables: dict[str, PatternBaseTable] = {}
        visiting: set[str] = set()

        def build(key: str) -> PatternBaseTable:
            if key in tables:
                return tables[key]
            if key not in raw:
                raise UnknownName(f"unknown pattern '{key}'")
            if key in visiting:
                _fail(f"pattern '{key}' is defined in terms of itself")
            visiting.add(key)
            body = _mapping(raw[key], f"patterns.{key}")
            display = str(body.get("name", key))
            if "sum" in body:
                parts = body["sum"]
                if not isinstance(parts, list) or len(parts) < 2:
                    _fail(f"patterns.{key}.sum must list at least two patterns")
                table = build(str(parts[0]))
                for part in parts[1:]:
                    table = table.connected_sum(build(str(part)), display)
            else:
                table = self._base_table(key, display, body)
            visiting.discard(key)
            tables[key] = table
            return table

        for key in raw:
            build(key)
        return tables

    def _base_table(self, key: str, display: str, body: dict) -> PatternBaseTable:
        where = f"patterns.{key}"
        pattern = None
        if "seifert" in body:
            rows = _rows(body["seifert"], f"{where}.seifert")
            pattern = SeifertMatrix(IntegerMatrix.of(rows, len(rows)))
            lf = from_seifert(pattern)
        elif "presentation" in body:
            rows = _rows(body["presentation"], f"{where}.presentation")
            lf = from_presentation(IntegerMatrix.of(rows, len(rows)))
        else:
            _fail(f"{where} needs a seifert or presentation matrix")
        labels = {
            str(label): parse_element(lf, value, f"{where}.labels.{label}")
            for label, value in _mapping(body.get("labels"), f"{where}.labels").items()
        }
        entries = body.get("entries", "zero")
        if entries == "zero":
            return PatternBaseTable.zero(lf, labels, display, pattern)
        if not isinstance(entries, list):
            _fail(f"{where}.entries must be 'zero' or a list of character entries")
        values = {}
        for i, entry in enumerate(entries):
            entry = _mapping(entry, f"{where}.entries[{i}]")
            if "character" not in entry:
                _fail(f"{where}.entries[{i}] needs a character")
            chi = parse_element(lf, entry["character"], f"{where}.entries[{i}].character")
            values[chi] = PatternBaseTable.base_value(
                display, str(entry.get("sigma", 0)), _int(entry.get("eta", 0), f"{where}.entries[{i}].eta")
            )
            values.setdefault(lf.neg(chi), values[chi])
        return PatternBaseTable(display, lf, labels, values, pattern)

    # satellites

    def _parse_satellites(self, raw: dict, knots: dict, patterns: dict) -> dict[str, SatelliteTree]:
        trees: dict[str, SatelliteTree] = {}
        visiting: set[str] = set()

        def companion(name: str):
            if name in knots:
                return knots[name]
            if name in raw:
                return build(name)
            raise UnknownName(f"companion '{name}' is neither a knot nor a satellite")

        def build(name: str) -> SatelliteTree:
            if name in trees:
                return trees[name]
            if name in visiting:
                _fail(f"satellite '{name}' is defined in terms of itself")
            visiting.add(name)
            body = _mapping(raw[name], f"satellites.{name}")
            if "sum" in body:
                parts = body["sum"]
                if not isinstance(parts, list) or len(parts) < 2:
                    _fail(f"satellites.{name}.sum must list at least two satellites")
                for part in parts:
                    if str(part) not in raw:
                        raise UnknownName(f"unknown satellite '{part}' in satellites.{name}.sum")
                tree = build(str(parts[0]))
                for part in parts[1:]:
                    tree = ConnectedSumNode(tree, build(str(part)))
            elif "pattern" in body:
                key = str(body["pattern"])
                if key not in patterns:
                    raise UnknownName(f"unknown pattern '{key}' in satellites.{name}")
                table = patterns[key]
                sites = body.get("infections") or []
                if not isinstance(sites, list):
                    _fail(f"satellites.{name}.infections must be a sequence")
                tree = PatternNode(
                    table,
                    tuple(self._site(name, i, s, table, companion) for i, s in enumerate(sites)),
                )
            else:
                _fail(f"satellites.{name} needs a pattern or a sum")
            visiting.discard(name)
            trees[name] = tree
            return tree

        for name in raw:
            build(name)
        return trees

    @staticmethod
    def _site(owner: str, index: int, raw: object, table: PatternBaseTable, companion) -> InfectionSite:
        where = f"satellites.{owner}.infections[{index}]"
        body = _mapping(raw, where)
        if "companion" not in body:
            _fail(f"{where} needs a companion")
        name = str(body["companion"])
        lift_curves = lift_values = None
        if "lifts" in body:
            lifts = body["lifts"]
            if not isinstance(lifts, list):
                _fail(f"{where}.lifts must be a list of curve mappings")
            curves = []
            for j, curve in enumerate(lifts):
                curve = _mapping(curve, f"{where}.lifts[{j}]")
                for label in curve:
                    if label not in table.labels:
                        raise UnknownName(f"curve label '{label}' in {where} is not defined on pattern '{table.name}'")
                curves.append({str(k): _int(v, f"{where}.lifts[{j}].{k}") for k, v in curve.items()})
            lift_curves = tuple(curves)
        if "lift_values" in body:
            values = body["lift_values"]
            if not isinstance(values, list):
                _fail(f"{where}.lift_values must be a list of integers")
            lift_values = tuple(_int(v, f"{where}.lift_values") for v in values)
        return InfectionSite(
            label=str(body.get("label", f"site{index + 1}")),
            companion_name=str(body.get("display", name)),
            companion=companion(name),
            lift_curves=lift_curves,
            lift_values=lift_values,
            winding=_int(body.get("winding", 0), f"{where}.winding"),
        )

    # links

    @staticmethod
    def _parse_link(name: str, body: dict) -> LinkSpec:
        where = f"links.{name}"
        for key in ("colors", "components", "coloring", "matrices"):
            if key not in body:
                _fail(f"{where} needs '{key}'")
        mu = _int(body["colors"], f"{where}.colors")
        m = _int(body["components"], f"{where}.components")
        coloring = body["coloring"]
        if not isinstance(coloring, list):
            _fail(f"{where}.coloring must be a list of color indices")
        matrices = body["matrices"]
        if isinstance(matrices, list):
            # one matrix A: A^eps = A when eps starts with +, its transpose otherwise
            rows = _rows(matrices, f"{where}.matrices")
            transposed = [list(col) for col in zip(*rows)]
            keys = [format(i, f"0{mu}b").replace("0", "+").replace("1", "-") for i in range(2**mu)]
            matrices = {k: (rows if k[0] == "+" else transposed) for k in keys}
        matrices = {
            str(k): _rows(v, f"{where}.matrices.{k}") for k, v in _mapping(matrices, f"{where}.matrices").items()
        }
        cc = CComplexData.from_rows(
            mu, m, [int(c) for c in coloring], matrices, bool(body.get("surfaces_connected", True))
        )
        stably = None
        if "stably_slice" in body:
            s = _mapping(body["stably_slice"], f"{where}.stably_slice")
            stably = StablySliceInputs(
                triple_linking=tuple(int(v) for v in s.get("triple_linking", [])),
                sato_levine_mod2=tuple(int(v) for v in s.get("sato_levine_mod2", [])),
                arf_components=tuple(int(v) for v in s.get("arf_components", [])),
                pairwise_linking_zero=bool(s.get("pairwise_linking_zero", True)),
            )
        return LinkSpec(cc, stably)

    # assertions and requests

    @staticmethod
    def _parse_assertions(raw: list, pf: ProblemFile) -> dict[str, list[Assertion]]:
        out: dict[str, list[Assertion]] = {}
        for i, entry in enumerate(raw):
            entry = _mapping(entry, f"assertions[{i}]")
            for key in ("target", "rule", "value"):
                if key not in entry:
                    _fail(f"assertions[{i}] needs '{key}'")
            target = str(entry["target"])
            if target not in pf.knots and target not in pf.links and target not in pf.satellites:
                raise UnknownName(f"assertion target '{target}' is not defined")
            try:
                assertion = Assertion(
                    str(entry["rule"]), _int(entry["value"], f"assertions[{i}].value"), str(entry.get("source", ""))
                )
            except ValueError as e:
                raise ProblemFileError(f"Invalid problem file: assertions[{i}]: {e}") from e
            out.setdefault(target, []).append(assertion)
        return out

    @staticmethod
    def _parse_request(index: int, raw: object, pf: ProblemFile) -> Request:
        where = f"requests[{index}]"
        body = dict(_mapping(raw, where))
        command = body.pop("command", None)
        if command not in COMMANDS:
            _fail(f"{where}.command must be one of {list(COMMANDS)} (got {command!r})")
        target = body.pop("target", None)
        target = None if target is None else str(target)
        defined = set(pf.knots) | set(pf.links) | set(pf.satellites) | set(pf.patterns)
        if target is not None and target not in defined:
            raise UnknownName(f"{where} references unknown name '{target}'")
        points = tuple(resolve_points(pf, body.pop("points", []) or []))
        rules = body.get("rules")
        if rules is not None:
            if not isinstance(rules, list) or set(map(str, rules)) - ALL_RULES:
                _fail(f"{where}.rules must be a subset of {sorted(ALL_RULES)}")
        return Request(str(command), target, points, body)


def resolve_points(pf: ProblemFile, items: Sequence[object]) -> list[EvaluationPoint]:
    """Named points, "k/d,..." strings or coordinate lists, in order.

    Raises:
        UnknownName: For a name that is not a defined point
    """
    out = []
    for item in items:
        if isinstance(item, str) and "/" not in item:
            if item not in pf.points:
                raise UnknownName(f"unknown evaluation point '{item}'; defined points: {sorted(pf.points)}")
            out.append(pf.points[item])
        else:
            out.append(parse_point_spec(item))
    return out


def load_problem_file(path: str, settings: Optional[Settings] = None) -> ProblemFile:
    """Read and parse a problem file.

    Raises:
        FileNotFoundError: If the path does not exist
        ProblemFileError: If the file is malformed
    """
    with open(path, "r", encoding="utf-8") as f:
        content = f.read()
    return ProblemFileParser(content, source=path, settings=settings).parse()
