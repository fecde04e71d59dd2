"""Computations behind each CLI subcommand.

Every command turns a problem file, a target name and request parameters
into a ``CommandResult``: a serializable payload plus the lines of the text
report. ``run_command`` dispatches by name.
"""

from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

from .casson_gordon import satellite_sigma_eta
from .ccomplex_link import knot_as_ccomplex, multivariable_signature_nullity
from .errors import NotPrimePower, UnknownName
from .exact_algebra import format_rational, root_of_unity
from .linking_form import (enumerate_metabolizers, has_metabolic_linking_form,
                           is_prime_power)
from .logger import ConcordanceLogger, get_logger
from .obstructions import (CobordismContext, EvaluationPoint, aggregate,
                           cg_sn_obstruct, cobordism_inequality, format_point,
                           gilmer_g4_obstruct, multisig_table, sn_lower_bound)
from .problem_file import ProblemFile, parse_element, resolve_points
from .seifert_knot import (alexander_polynomial, arf, arf_via_determinant,
                           lt_signature_nullity, seifert_genus,
                           symplectic_basis_null_e)
from .settings import Settings, get_settings

logger: ConcordanceLogger = get_logger(__name__)

MINUS_ONE: EvaluationPoint = (root_of_unity(1, 2),)


@dataclass(frozen=True)
class CommandResult:
    """Outcome of one request.

    Attributes:
        command: Subcommand name
        target: Name the command ran on
        data: JSON-ready payload
        lines: Text report lines
    """

    command: str
    target: Optional[str]
    data: Mapping = field(default_factory=dict)
    lines: tuple = ()

    def to_dict(self) -> dict:
        """Serializable form."""
        return {"command": self.command, "data": dict(self.data), "lines": list(self.lines), "target": self.target}

    @classmethod
    def from_dict(cls, raw: Mapping) -> "CommandResult":
        """Inverse of to_dict."""
        return cls(raw["command"], raw.get("target"), dict(raw.get("data", {})), tuple(raw.get("lines", ())))


def _points(points: Sequence[EvaluationPoint], mu: int = 1) -> list[EvaluationPoint]:
    chosen = [tuple(p) for p in points if len(p) == mu]
    return chosen or [MINUS_ONE * mu]


def _require(target: Optional[str], command: str) -> str:
    if target is None:
        raise UnknownName(f"'{command}' needs a target name")
    return target


# ── Knot invariants ──────────────────────────────────────────────────


def cmd_invariants(
    pf: ProblemFile, target: Optional[str], points: Sequence[EvaluationPoint], params: Mapping, settings: Settings
) -> CommandResult:
    """Alexander polynomial, Arf invariant and (sigma, eta) at each point."""
    name = _require(target, "invariants")
    a = pf.seifert_of(name)
    if a is None:
        raise UnknownName(f"'{name}' has no Seifert matrix")
    delta = alexander_polynomial(a)
    rows = []
    for point in _points(points):
        res = lt_signature_nullity(a, point[0], settings)
        rows.append({"eta": res.nullity, "point": format_point(point), "sigma": res.signature})
    value = arf(a)
    lines = [f"{name}: Δ(t) ≐ {delta}", f"  Arf = {value}", f"  Seifert genus = {seifert_genus(a)}"]
    lines += [f"  ω = {r['point']}: σ = {r['sigma']}, η = {r['eta']}" for r in rows]
    data = {"alexander": str(delta), "arf": value, "seifert_genus": seifert_genus(a), "signatures": rows}
    return CommandResult("invariants", name, data, tuple(lines))


def cmd_arf(
    pf: ProblemFile, target: Optional[str], points: Sequence[EvaluationPoint], params: Mapping, settings: Settings
) -> CommandResult:
    """Arf invariant two ways and, when it vanishes, a symplectic basis with q(e_i) = 0."""
    name = _require(target, "arf")
    a = pf.seifert_of(name)
    if a is None:
        raise UnknownName(f"'{name}' has no Seifert matrix")
    value = arf(a)
    data = {"arf": value, "arf_via_determinant": arf_via_determinant(a), "basis": None}
    lines = [f"{name}: Arf = {value} (determinant test: {data['arf_via_determinant']})"]
    if value == 0:
        basis = symplectic_basis_null_e(a)
        data["basis"] = [{"e": list(e), "f": list(f)} for e, f in basis]
        for i, (e, f) in enumerate(basis, start=1):
            lines.append(f"  e{i} = {list(e)}, f{i} = {list(f)}")
    return CommandResult("arf", name, data, tuple(lines))


# ── Colored links ────────────────────────────────────────────────────


def cmd_multisig(
    pf: ProblemFile, target: Optional[str], points: Sequence[EvaluationPoint], params: Mapping, settings: Settings
) -> CommandResult:
    """Multivariable signature, nullity and the sn lower bound at each point."""
    name = _require(target, "multisig")
    if name in pf.links:
        link = pf.link(name)
        cc, m = link.ccomplex, link.components
    else:
        a = pf.seifert_of(name)
        if a is None:
            raise UnknownName(f"'{name}' has no Seifert matrix")
        cc, m = knot_as_ccomplex(a), 1
    chosen = _points(points, cc.num_colors)
    rows = multisig_table(cc, m, chosen, settings)
    entry = sn_lower_bound(cc, m, chosen, settings)
    lines = [f"{name}: μ = {cc.num_colors}, m = {m}"]
    for r in rows:
        lines.append(
            f"  ω = ({format_point(r.point)}): σ = {r.sigma}, η = {r.eta}, "
            f"|σ| + |η − m + 1| = {r.value}, sn ≥ {r.bound}"
        )
    lines.append(f"  sn ≥ {entry.value}")
    data = {"components": m, "rows": [r.to_dict() for r in rows], "sn_lower": entry.value}
    return CommandResult("multisig", name, data, tuple(lines))


# ── Linking forms ────────────────────────────────────────────────────


def cmd_linkingform(
    pf: ProblemFile, target: Optional[str], points: Sequence[EvaluationPoint], params: Mapping, settings: Settings
) -> CommandResult:
    """Invariant factors and the pairing matrix on the Smith generators."""
    name = _require(target, "linkingform")
    lf = pf.linking_form(name)
    gens = lf.generators()
    pairing = [[format_rational(lf.pair(x, y)) for y in gens] for x in gens]
    factors = " ⊕ ".join(f"ℤ{d}" for d in lf.invariant_factors) or "0"
    lines = [f"{name}: H = {factors} (order {lf.order})"]
    lines += [f"  λ(g{i + 1}, ·) = [{', '.join(row)}]" for i, row in enumerate(pairing)]
    data = {"invariant_factors": list(lf.invariant_factors), "order": lf.order, "pairing": pairing}
    if name in pf.knots:
        data["metabolic"] = has_metabolic_linking_form(pf.knots[name], settings)
        lines.append(f"  metabolic: {'yes' if data['metabolic'] else 'no'}")
    return CommandResult("linkingform", name, data, tuple(lines))


def cmd_metabolizers(
    pf: ProblemFile, target: Optional[str], points: Sequence[EvaluationPoint], params: Mapping, settings: Settings
) -> CommandResult:
    """Every metabolizer, in canonical order, by its generators."""
    name = _require(target, "metabolizers")
    lf = pf.linking_form(name)
    mets = enumerate_metabolizers(lf, settings)
    listed = [[list(g) for g in m.canonical_generators()] for m in mets]
    lines = [f"{name}: {len(mets)} metabolizer{'s' if len(mets) != 1 else ''}"]
    lines += [f"  <{', '.join(str(g) for g in gens) or '0'}>" for gens in listed]
    return CommandResult("metabolizers", name, {"count": len(mets), "metabolizers": listed}, tuple(lines))


# ── Casson-Gordon ────────────────────────────────────────────────────


def cmd_cg_satellite(
    pf: ProblemFile, target: Optional[str], points: Sequence[EvaluationPoint], params: Mapping, settings: Settings
) -> CommandResult:
    """Casson-Gordon sigma and nullity of a satellite at one character, with the symbolic formula."""
    name = _require(target, "cg-satellite")
    tree = pf.satellite(name)
    if "character" not in params:
        raise UnknownName(f"cg-satellite on '{name}' needs a character")
    chi = parse_element(tree.form, params["character"], f"{name}.character")
    # the trivial character can be read at any level
    d = int(params.get("d", tree.form.order_of(chi)))
    d = d if d > 1 else 2
    if not is_prime_power(d):
        raise NotPrimePower(f"character {list(chi)} has order {d}, which is not a prime power")
    value = satellite_sigma_eta(tree, chi, d, settings=settings)
    lines = [
        f"{name}: χ = {list(chi)}, d = {d}",
        f"  σ = {value.sigma_formula()} = {format_rational(value.sigma)}",
        f"  η = {value.eta_formula()} = {value.eta}",
    ]
    data = {"character": list(chi), "d": d, **value.to_dict()}
    return CommandResult("cg-satellite", name, data, tuple(lines))


def _inputs(pf: ProblemFile, name: str, points: Sequence[EvaluationPoint], params: Mapping, settings: Settings):
    sigma = params.get("sigma_minus1")
    cap = params.get("max_candidate")
    return pf.bound_inputs(
        name,
        sigma_minus1=None if sigma is None else int(sigma),
        max_candidate=None if cap is None else int(cap),
        points=points,
        settings=settings,
    )


def _bounds(
    quantities: Sequence[str],
    pf: ProblemFile,
    name: str,
    points: Sequence[EvaluationPoint],
    params: Mapping,
    settings: Settings,
) -> tuple[dict, list[str]]:
    inputs = _inputs(pf, name, points, params, settings)
    rules = params.get("rules")
    reports = aggregate(inputs, rules, settings)
    data, lines = {}, []
    for q in quantities:
        report = reports.get(q)
        if report is None:
            continue
        data[q] = report.to_dict()
        lines.append(f"{name}: {report.interval()}")
        if report.undefined:
            lines.append(f"  {report.reason}")
        for e in report.provenance:
            tag = " (asserted)" if e.asserted else ""
            lines.append(f"  {e.side} {e.value} from {e.rule}{tag}")
    return data, lines


def cmd_sn_bounds(
    pf: ProblemFile, target: Optional[str], points: Sequence[EvaluationPoint], params: Mapping, settings: Settings
) -> CommandResult:
    """sn (and g4 for knots) intervals with provenance; optionally one sn search with its trace."""
    name = _require(target, "sn-bounds")
    data, lines = _bounds(("g4", "sn"), pf, name, points, params, settings)
    if "n" in params:
        inputs = _inputs(pf, name, points, params, settings)
        if inputs.cg_form is None:
            raise UnknownName(f"'{name}' has no Casson-Gordon data; sn-bounds with n needs a satellite")
        result = cg_sn_obstruct(
            inputs.cg_form, int(params["n"]), inputs.resolved_sigma_minus1(settings), inputs.cg_eval, settings
        )
        data["search"] = result.to_dict()
        lines.append(f"  {result.conclusion()}")
        lines += [f"    {line}" for line in result.trace.render()]
    return CommandResult("sn-bounds", name, data, tuple(lines))


def cmd_g4_check(
    pf: ProblemFile, target: Optional[str], points: Sequence[EvaluationPoint], params: Mapping, settings: Settings
) -> CommandResult:
    """g4 interval with provenance; with a genus, the Casson-Gordon check at that genus."""
    name = _require(target, "g4-check")
    data, lines = _bounds(("g4",), pf, name, points, params, settings)
    if "genus" in params:
        inputs = _inputs(pf, name, points, params, settings)
        if inputs.cg_form is None:
            raise UnknownName(f"'{name}' has no Casson-Gordon data; g4-check with a genus needs a satellite")
        result = gilmer_g4_obstruct(
            inputs.cg_form, int(params["genus"]), inputs.resolved_sigma_minus1(settings), inputs.cg_eval, settings
        )
        data["search"] = result.to_dict()
        lines.append(f"  {result.conclusion()}")
        lines += [f"    {line}" for line in result.trace.render()]
    return CommandResult("g4-check", name, data, tuple(lines))


# ── Cobordisms ───────────────────────────────────────────────────────


def _context(raw: object, m: int) -> CobordismContext:
    if raw in (None, "s4"):
        return CobordismContext.s4(m)
    if raw == "cp2_bar":
        return CobordismContext.cp2_bar(m)
    if isinstance(raw, Mapping):
        return CobordismContext(
            sign_V=int(raw.get("sign_V", 0)),
            euler_V=int(raw.get("euler_V", 2)),
            euler_surfaces=tuple(raw.get("euler_surfaces", (0,) * m)),
            double_points=int(raw.get("double_points", 0)),
            m=m,
        )
    raise UnknownName(f"unknown cobordism context {raw!r}; use s4, cp2_bar or a mapping")


def _signature_at(pf: ProblemFile, name: str, point: EvaluationPoint, settings: Settings) -> tuple[int, int, int]:
    if name == "unknot":
        return 0, len(point) - 1, 1
    if name in pf.links:
        link = pf.link(name)
        sigma, eta = multivariable_signature_nullity(link.ccomplex, point, settings)
        return sigma, eta, link.components
    a = pf.seifert_of(name)
    if a is None:
        raise UnknownName(f"'{name}' has no Seifert matrix")
    res = lt_signature_nullity(a, point[0], settings)
    return res.signature, res.nullity, 1


def cmd_cobordism(
    pf: ProblemFile, target: Optional[str], points: Sequence[EvaluationPoint], params: Mapping, settings: Settings
) -> CommandResult:
    """Instantiate the nullhomologous cobordism inequality between two knots or links."""
    source = str(params.get("from", target or ""))
    if not source:
        raise UnknownName("cobordism needs a 'from' knot or link")
    other = str(params.get("to", "unknot"))
    point = _points(points, len(points[0]) if points else 1)[0]
    sigma, eta, m = _signature_at(pf, source, point, settings)
    sigma2, eta2, _ = _signature_at(pf, other, point, settings)
    ineq = cobordism_inequality(_context(params.get("context"), m), sigma, eta, sigma2, eta2)
    verdict = "consistent" if ineq.holds else "violated: no such cobordism exists"
    lines = [f"{source} → {other} at ω = ({format_point(point)}): {ineq.render()} ({verdict})"]
    data = {"from": source, "point": format_point(point), "to": other, **ineq.to_dict()}
    return CommandResult("cobordism", source, data, tuple(lines))


COMMAND_HANDLERS: dict[str, Callable[..., CommandResult]] = {
    "invariants": cmd_invariants,
    "multisig": cmd_multisig,
    "arf": cmd_arf,
    "linkingform": cmd_linkingform,
    "metabolizers": cmd_metabolizers,
    "cg-satellite": cmd_cg_satellite,
    "sn-bounds": cmd_sn_bounds,
    "g4-check": cmd_g4_check,
    "cobordism": cmd_cobordism,
}


def run_command(
    command: str,
    pf: ProblemFile,
    target: Optional[str] = None,
    points: Sequence[object] = (),
    params: Optional[Mapping] = None,
    settings: Optional[Settings] = None,
) -> CommandResult:
    """Run one command; points may be names, "k/d,..." strings or parsed tuples.

    Raises:
        ValueError: For an unknown command
    """
    settings = settings or get_settings()
    handler = COMMAND_HANDLERS.get(command)
    if handler is None:
        raise ValueError(f"unknown command '{command}'; expected one of {sorted(COMMAND_HANDLERS)}")
    resolved = [p if isinstance(p, tuple) else resolve_points(pf, [p])[0] for p in points]
    logger.info(f"{command} {target or ''}".rstrip())
    return handler(pf, target, resolved, dict(params or {}), settings)
