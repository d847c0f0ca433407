"""
Mutation Toolkit Command Line
One entry point over JSON files for every module: mutation of potentials, path integrals and
admissibility, index bookkeeping, elementary sections, Floer complexes and broken-map types.
Exit codes: 0 success, 1 unreadable input, 2 failed validation, 3 numeric error.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple, Type

from pydantic import BaseModel, ValidationError

import settings
from algebra import apply_mutation, eval_at, laurent_arith, laurent_embed, mutate_potential, verify_invariance
from broken import (
    KINDS,
    EnumerationBounds,
    classify,
    enumerate_types,
    type_virtual_dimension,
    validate_type,
)
from elementary import (
    ElementarySection,
    ReebChord,
    chord_end_point,
    chord_start_point,
    cr_residual,
    default_samples,
    elementary_count,
    elementary_index_witness,
    evaluate_section,
    reeb_endpoint_sign,
    verify_section_properties,
)
from errors import MutationToolkitError, NumericError
from floer import (
    FAMILIES,
    build_consistent_fixture,
    hf_rank,
    mutate_complex,
    mutated_assignment,
    verify_d_squared,
)
from geometry import (
    GeometryContext,
    TorusPoint,
    elementary_disc_area,
    hamiltonian_isotopy_test,
    integrate_lambda_n,
    is_admissible,
    is_valid_mutation_pair,
    lagrangian_residual,
    primitive_along_path,
    torus_point_coordinates,
    winding_number,
)
from index_theory import (
    critical_levels,
    critical_multiplicity,
    disc_index,
    monotonicity_constant,
    single_puncture_index,
    sobolev_weight_window,
    split_indices,
    vertically_constrained_index,
    virtual_dimension,
)
from schemas import (
    AssignmentModel,
    CombTypeModel,
    ComplexModel,
    DiscClassesModel,
    GaussianValue,
    IndexDataModel,
    MatrixModel,
    PathModel,
    PotentialModel,
    RationalModel,
    RuleModel,
    VerdictModel,
    fraction_text,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_INVALID = 2
EXIT_NUMERIC = 3

Outcome = Tuple[Dict[str, Any], bool]


class InputError(Exception):
    """An input file is missing, is not JSON or does not match its schema"""


# -----------------------------
# Input helpers
# -----------------------------
def load_model(path: str, model: Type[BaseModel]) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e}")
    try:
        return model.model_validate_json(text)
    except ValidationError as e:
        details = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or '<root>'}: {err['msg']}" for err in e.errors()
        )
        raise InputError(f"{path}: {details}")


def context(args) -> GeometryContext:
    if args.tol is not None:
        return GeometryContext(n=args.n, tol=args.tol)
    return GeometryContext(n=args.n)


def _pairs(values) -> List[List[float]]:
    return [[float(v.real), float(v.imag)] for v in values]


# -----------------------------
# Algebra commands
# -----------------------------
def cmd_mutate(args) -> Outcome:
    potential = load_model(args.potential, PotentialModel).to_domain()
    rule = load_model(args.rule, RuleModel).to_domain(potential.variables)
    if args.direction == "forward":
        value = apply_mutation(potential, rule, "forward")
        return {"value": RationalModel.from_domain(value).model_dump(), "is_laurent": value.is_laurent}, True
    result = mutate_potential(potential, rule)
    return {
        "value": RationalModel.from_domain(result.value).model_dump(),
        "is_laurent": result.is_laurent,
        "laurent": PotentialModel.from_domain(result.laurent).model_dump() if result.laurent else None,
    }, True


def cmd_verify_invariance(args) -> Outcome:
    potential = load_model(args.potential, PotentialModel).to_domain()
    rule = load_model(args.rule, RuleModel).to_domain(potential.variables)
    ok = verify_invariance(potential, rule)
    return {"ok": ok}, ok


def cmd_arith(args) -> Outcome:
    left = load_model(args.left, PotentialModel).to_domain()
    right = load_model(args.right, PotentialModel).to_domain()
    variables = tuple(dict.fromkeys(left.variables + right.variables))
    result = laurent_arith(laurent_embed(left, variables), laurent_embed(right, variables), args.op)
    return PotentialModel.from_domain(result).model_dump(), True


def cmd_evaluate(args) -> Outcome:
    potential = load_model(args.potential, PotentialModel).to_domain()
    point = load_model(args.assign, AssignmentModel).to_domain()
    value = potential
    if args.rule:
        value = mutate_potential(potential, load_model(args.rule, RuleModel).to_domain(potential.variables)).value
    return {"value": GaussianValue.from_domain(eval_at(value, point)).model_dump()}, True


# -----------------------------
# Geometry commands
# -----------------------------
def cmd_integrate(args) -> Outcome:
    path = load_model(args.path, PathModel).to_domain()
    ctx = context(args)
    integral = integrate_lambda_n(path, ctx)
    payload: Dict[str, Any] = {"integral": integral, "n": args.n}
    if args.winding:
        payload["winding"] = winding_number(path)
    if args.primitive is not None:
        payload["primitive"] = [[tau, f] for tau, f in primitive_along_path(path, ctx, args.primitive)]
    if args.disc_sign:
        payload["elementary_disc_area"] = elementary_disc_area(args.n, integral, args.disc_sign, args.scale)
    return payload, True


def cmd_admissible(args) -> Outcome:
    path = load_model(args.path, PathModel).to_domain()
    report = is_admissible(path, args.t, args.eps, context(args))
    return {"ok": report.ok, "violations": report.violations}, report.ok


def cmd_mutation_pair(args) -> Outcome:
    c = load_model(args.c, PathModel).to_domain()
    c_prime = load_model(args.c_prime, PathModel).to_domain()
    report = is_valid_mutation_pair(c, c_prime, context(args))
    return {
        "ok": report.ok,
        "winding": report.winding,
        "area_defect": report.area_defect,
        "tangents_agree": report.tangents_agree,
        "violations": report.violations,
    }, report.ok


def cmd_isotopy(args) -> Outcome:
    g0 = load_model(args.g0, PathModel).to_domain()
    g1 = load_model(args.g1, PathModel).to_domain()
    return {"isotopic": hamiltonian_isotopy_test(g0, g1, context(args))}, True


def cmd_torus(args) -> Outcome:
    path = load_model(args.path, PathModel).to_domain()
    ctx = context(args)
    angles = tuple(args.angles) if args.angles else (0.0,) * (args.n - 1)
    base = path.point(args.at)
    return {
        "base": _pairs([base])[0],
        "coordinates": _pairs(torus_point_coordinates(TorusPoint(base, angles), ctx)),
        "lagrangian_residual": lagrangian_residual(path, args.at, angles, args.h, ctx),
    }, True


# -----------------------------
# Index commands
# -----------------------------
def cmd_index(args) -> Outcome:
    if not args.data and not args.classes:
        raise InputError("index needs --data and/or --classes")
    if args.chord is not None and not args.data:
        raise InputError("--chord needs --data")
    payload: Dict[str, Any] = {}
    ok = True
    if args.data:
        d = load_model(args.data, IndexDataModel).to_domain()
        vertical, horizontal = split_indices(d)
        window = sobolev_weight_window(d.n)
        payload.update({
            "index": disc_index(d),
            "critical_multiplicity": critical_multiplicity(d),
            "critical_levels": critical_levels(d),
            "vertical_index": vertical,
            "horizontal_index": horizontal,
            "vertically_constrained_index": vertically_constrained_index(d),
            "weight_window": [window.lower, window.upper],
        })
        if args.punctures is not None:
            payload["virtual_dimension"] = virtual_dimension(disc_index(d), args.punctures, d.n, args.aut)
        if args.chord is not None:
            payload["single_puncture_index"] = single_puncture_index(d.n, args.chord)
    if args.classes:
        disc_set = load_model(args.classes, DiscClassesModel)
        report = monotonicity_constant([c.to_domain() for c in disc_set.classes], disc_set.mode)
        payload["monotonicity"] = {
            "mode": report.mode,
            "constant": fraction_text(report.constant) if report.constant is not None else None,
            "consistent": report.consistent,
            "violations": report.violations,
        }
        ok = report.consistent
    return payload, ok


# -----------------------------
# Elementary section commands
# -----------------------------
def cmd_elementary_verify(args) -> Outcome:
    s = ElementarySection(n=args.n, eps=args.eps, side=args.side, k=args.k)
    report = verify_section_properties(s, default_samples(s, count=args.samples, seed=args.seed))
    witness = elementary_index_witness(args.n)
    return {
        "projection_residual": report.projection_residual,
        "modulus_spread": report.modulus_spread,
        "cr_residual": cr_residual(s),
        "index": witness.index,
        "ok": report.ok,
    }, report.ok


def cmd_elementary_count(args) -> Outcome:
    table = {
        ("mutated" if mutated else "original"): {side: elementary_count(side, mutated, args.n) for side in ("upper", "lower")}
        for mutated in (False, True)
    }
    return {"n": args.n, "counts": table}, True


def cmd_elementary_evaluate(args) -> Outcome:
    s = ElementarySection(n=args.n, eps=args.eps, side=args.side, k=args.k, theta=tuple(args.theta or ()))
    z = complex(*args.z)
    values = evaluate_section(s, z)
    product = complex(1)
    for v in values:
        product *= v
    return {"z": _pairs([z])[0], "values": _pairs(values), "product": _pairs([product])[0]}, True


def cmd_elementary_chord(args) -> Outcome:
    chord = ReebChord(multiplicity=args.l, start_sign=args.sign, start_angles=tuple(args.angles or ()))
    return {
        "end_sign": reeb_endpoint_sign(args.sign, args.l),
        "start": _pairs(chord_start_point(chord, args.n)),
        "end": _pairs(chord_end_point(chord, args.n)),
    }, True


# -----------------------------
# Floer commands
# -----------------------------
def _defect_payload(report) -> Dict[str, Any]:
    return {
        "ok": report.ok,
        "defect": {f"{to},{frm}": RationalModel.from_domain(f).model_dump() for (to, frm), f in sorted(report.defect.items())},
    }


def cmd_floer_fixture(args) -> Outcome:
    c = build_consistent_fixture(args.seed, args.generators, args.rank_l, args.rank_k, family=args.family)
    return ComplexModel.from_domain(c).model_dump(by_alias=True), True


def cmd_floer_check(args) -> Outcome:
    report = verify_d_squared(load_model(args.complex, ComplexModel).to_domain())
    return _defect_payload(report), report.ok


def cmd_floer_rank(args) -> Outcome:
    c = load_model(args.complex, ComplexModel).to_domain()
    result = hf_rank(c, load_model(args.assign, AssignmentModel).to_domain())
    return {"rank_d": result.rank_d, "hf_dim": result.hf_dim}, True


def cmd_floer_mutate(args) -> Outcome:
    c = load_model(args.complex, ComplexModel).to_domain()
    rule = load_model(args.rule, RuleModel).to_domain(c.variables_L)
    mutated = mutate_complex(c, rule)
    payload: Dict[str, Any] = {"matrix": MatrixModel.from_domain(mutated).model_dump()}
    if args.assign:
        point = load_model(args.assign, AssignmentModel).to_domain()
        after = hf_rank(mutated, point)
        before = hf_rank(c, mutated_assignment(c, rule, point))
        payload["rank"] = {"mutated": after.hf_dim, "original_at_mutated_point": before.hf_dim}
    return payload, True


# -----------------------------
# Broken map commands
# -----------------------------
def cmd_broken_enumerate(args) -> Outcome:
    bounds = EnumerationBounds(args.max_levels, args.max_components, args.max_multiplicity, args.max_punctures)
    kinds = tuple(args.kind) if args.kind else KINDS
    if (args.min_index is None) != (args.max_index is None):
        raise InputError("--min-index and --max-index go together")
    budget = range(args.min_index, args.max_index + 1) if args.min_index is not None else None
    rows: List[Dict[str, Any]] = []
    summary: Dict[str, int] = {}
    for t, verdict in enumerate_types(bounds, args.n, budget, kinds):
        key = verdict.status if verdict.reason is None else f"{verdict.status}: {verdict.reason}"
        summary[key] = summary.get(key, 0) + 1
        if args.all or verdict.status == "Rigid":
            rows.append({
                "type": CombTypeModel.from_domain(t).model_dump(),
                "virtual_dimension": type_virtual_dimension(t, args.n),
                "verdict": VerdictModel.from_domain(verdict).model_dump(),
            })
    return {"n": args.n, "summary": summary, "types": rows}, True


def cmd_broken_classify(args) -> Outcome:
    t = load_model(args.type, CombTypeModel).to_domain()
    report = validate_type(t)
    if not report.ok:
        return {"valid": False, "violations": report.violations}, False
    return {
        "valid": True,
        "virtual_dimension": type_virtual_dimension(t, args.n),
        "verdict": VerdictModel.from_domain(classify(t, args.n)).model_dump(),
    }, True


# -----------------------------
# Parser
# -----------------------------
def _command(subparsers, name: str, handler: Callable, help_text: str) -> argparse.ArgumentParser:
    parser = subparsers.add_parser(name, help=help_text)
    parser.set_defaults(handler=handler)
    return parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="main.py", description="Mutation toolkit over JSON files")
    parser.add_argument("--tol", type=float, default=None, help="Absolute tolerance (default MUTATION_TOL)")
    parser.add_argument("--seed", type=int, default=0, help="Seed for fixtures and samples")
    parser.add_argument("--log-level", default=settings.LOG_LEVEL, help="Logging level (default MUTATION_LOG_LEVEL)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = _command(sub, "mutate", cmd_mutate, "Mutate a Laurent potential")
    p.add_argument("--potential", required=True)
    p.add_argument("--rule", required=True)
    p.add_argument("--direction", choices=("inverse", "forward"), default="inverse")

    p = _command(sub, "verify-invariance", cmd_verify_invariance, "Check that mutation round-trips")
    p.add_argument("--potential", required=True)
    p.add_argument("--rule", required=True)

    p = _command(sub, "arith", cmd_arith, "Add, subtract or multiply two Laurent polynomials")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--op", choices=("add", "sub", "mul"), required=True)

    p = _command(sub, "evaluate", cmd_evaluate, "Evaluate a potential, or its mutation, at a local system")
    p.add_argument("--potential", required=True)
    p.add_argument("--assign", required=True)
    p.add_argument("--rule", help="Evaluate the mutated potential instead")

    p = _command(sub, "integrate", cmd_integrate, "Integrate lambda_n along a path")
    p.add_argument("--path", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--winding", action="store_true", help="Also report the winding about 0 (closed paths)")
    p.add_argument("--primitive", type=float, nargs="*", help="Primitive at piece breakpoints and these parameters")
    p.add_argument("--disc-sign", choices=("+", "-"), help="Area of the elementary disc with this chord sign")
    p.add_argument("--scale", type=float, default=1.0)

    p = _command(sub, "admissible", cmd_admissible, "Check a path against the admissibility window")
    p.add_argument("--path", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)

    p = _command(sub, "mutation-pair", cmd_mutation_pair, "Check that c' is a mutation of c")
    p.add_argument("--c", required=True)
    p.add_argument("--c-prime", required=True)
    p.add_argument("--n", type=int, required=True)

    p = _command(sub, "isotopy", cmd_isotopy, "Compare two paths up to Hamiltonian isotopy")
    p.add_argument("--g0", required=True)
    p.add_argument("--g1", required=True)
    p.add_argument("--n", type=int, required=True)

    p = _command(sub, "torus", cmd_torus, "Lift a path point to the torus and measure the Lagrangian residual")
    p.add_argument("--path", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--at", type=float, default=0.5, help="Global path parameter")
    p.add_argument("--angles", type=float, nargs="*", help="n - 1 fiber angles (default zeros)")
    p.add_argument("--h", type=float, default=1e-5, help="Finite-difference step")

    p = _command(sub, "index", cmd_index, "Index bookkeeping and monotonicity")
    p.add_argument("--data", help="IndexData JSON")
    p.add_argument("--classes", help="Disc classes JSON for the monotonicity check")
    p.add_argument("--punctures", type=int, help="Puncture nodes for the virtual dimension")
    p.add_argument("--aut", type=int, default=0)
    p.add_argument("--chord", type=int, help="Chord multiplicity for the single-puncture index")

    elementary = sub.add_parser("elementary", help="Elementary sections").add_subparsers(dest="action", required=True)
    p = _command(elementary, "verify", cmd_elementary_verify, "Residual report of one section")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--side", choices=("upper", "lower"), default="upper")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--samples", type=int, default=1000)
    p = _command(elementary, "count", cmd_elementary_count, "Elementary disc counts before and after mutation")
    p.add_argument("--n", type=int, required=True)
    p = _command(elementary, "evaluate", cmd_elementary_evaluate, "Values of one section at a point")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--side", choices=("upper", "lower"), default="upper")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--theta", type=float, nargs="*")
    p.add_argument("--z", type=float, nargs=2, required=True, metavar=("RE", "IM"))
    p = _command(elementary, "chord", cmd_elementary_chord, "Endpoints and end sign of a Reeb chord")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--l", type=int, required=True, help="Multiplicity")
    p.add_argument("--sign", choices=("+", "-"), default="+")
    p.add_argument("--angles", type=float, nargs="*")

    floer = sub.add_parser("floer", help="Floer complexes").add_subparsers(dest="action", required=True)
    p = _command(floer, "fixture", cmd_floer_fixture, "Generate a consistent complex")
    p.add_argument("--generators", type=int, default=2)
    p.add_argument("--rank-l", type=int, default=2)
    p.add_argument("--rank-k", type=int, default=1)
    p.add_argument("--family", choices=sorted(FAMILIES), default="filtered")
    p = _command(floer, "check", cmd_floer_check, "Check d^2 = (W_L - W_K) Id")
    p.add_argument("--complex", required=True)
    p = _command(floer, "rank", cmd_floer_rank, "Rank of d and HF dimension at a local system")
    p.add_argument("--complex", required=True)
    p.add_argument("--assign", required=True)
    p = _command(floer, "mutate", cmd_floer_mutate, "Mutate the coboundary along a rule on the L variables")
    p.add_argument("--complex", required=True)
    p.add_argument("--rule", required=True)
    p.add_argument("--assign")

    broken = sub.add_parser("broken", help="Broken-map types").add_subparsers(dest="action", required=True)
    p = _command(broken, "enumerate", cmd_broken_enumerate, "Enumerate and classify types")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--max-levels", type=int, default=3)
    p.add_argument("--max-components", type=int, default=3)
    p.add_argument("--max-multiplicity", type=int, default=3)
    p.add_argument("--max-punctures", type=int, default=3)
    p.add_argument("--min-index", type=int)
    p.add_argument("--max-index", type=int)
    p.add_argument("--kind", action="append", choices=KINDS)
    p.add_argument("--all", action="store_true", help="List every type, not only rigid ones")
    p = _command(broken, "classify", cmd_broken_classify, "Validate and classify one type")
    p.add_argument("--type", required=True)
    p.add_argument("--n", type=int, required=True)
    return parser


# -----------------------------
# Entry point
# -----------------------------
def emit(payload: Dict[str, Any]) -> None:
    print(json.dumps(payload, sort_keys=True, indent=2))


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_PARSE
    logging.basicConfig(
        level=args.log_level.upper(),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
        force=True,
    )
    try:
        payload, ok = args.handler(args)
    except InputError as e:
        logger.error(f"❌ {e}")
        emit({"error": "InputError", "message": str(e)})
        return EXIT_PARSE
    except ValidationError as e:
        logger.error(f"❌ invalid parameters: {e}")
        emit({"error": "ValidationError", "message": str(e), "violations": [err["msg"] for err in e.errors()]})
        return EXIT_INVALID
    except NumericError as e:
        logger.error(f"❌ numeric failure: {e}")
        emit({"error": type(e).__name__, "message": str(e)})
        return EXIT_NUMERIC
    except MutationToolkitError as e:
        logger.error(f"❌ invalid input: {e}")
        emit({"error": type(e).__name__, "message": str(e), "violations": [str(e)]})
        return EXIT_INVALID

    emit(payload)
    if not ok:
        logger.warning(f"⚠️ {args.command} reported a failed check")
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(run())
