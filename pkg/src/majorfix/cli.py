"""Batch front end: analyze / solve / zones / compare on problem configs.

Configs are JSON documents (see README for the schema); demo problems ship
as named presets so every scenario is reproducible from one command.  Exit
codes: 0 success (a certified no-existence analysis is success), 2 config
error, 3 inadmissible start, 4 bound violation.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from .discretize import Grid, KernelTable, zaanen_norm_estimate
from .errors import (
    BoundViolationError,
    ConfigError,
    InadmissibleStartError,
    NoExistenceError,
)
from .iteration import OperatorHandle, StoppingRule, certify_trace, iterate
from .majorant import DEFAULT_TOL, MajorantProfile, ZoneReport, analyze, eval_majorants
from .moduli import (
    ConstantModulus,
    PowerSumModulus,
    TabulatedModulus,
    scale_modulus,
)
from .operators import (
    CompositionSpec,
    HammersteinSpec,
    HammersteinTerm,
    LipschitzPairSet,
    MultilinearSpec,
    UrysohnSpec,
    build_composition,
    build_hammerstein_lp,
    build_hammerstein_sup,
    build_multilinear,
    build_self_majorizing,
    build_superposition_modulus,
    build_urysohn,
    multilinear_critical_shift,
)
from .presets import (
    COMPOSITION_INNER,
    COMPOSITION_OUTER,
    FORCINGS,
    KERNELS,
    LP_NONLINEARITIES,
    NONLINEARITIES,
    URYSOHN_KERNELS,
    get_preset,
    preset_names,
)

__all__ = ["main", "entrypoint", "run_analyze", "run_solve", "run_zones", "run_compare"]

KINDS = ("multilinear", "hammerstein_c", "hammerstein_lp", "urysohn",
         "composition", "scalar_profile")
_FAMILY_FACTORS = (0.5, 0.9, 1.0, 1.25)
_ZAANEN_INFLATION = 1.05


# ---------------------------------------------------------------------------
# config validation and problem building
# ---------------------------------------------------------------------------

def _fail(message: str) -> None:
    raise ConfigError(message)


def _number(config: dict, key: str, *, positive=False, nonnegative=False):
    if key not in config:
        _fail(f"missing required field {key!r}")
    value = config[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(f"field {key!r} must be a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        _fail(f"field {key!r} must be finite, got {value!r}")
    if positive and value <= 0.0:
        _fail(f"field {key!r} must be > 0, got {value!r}")
    if nonnegative and value < 0.0:
        _fail(f"field {key!r} must be >= 0, got {value!r}")
    return value


def _build_modulus(doc) -> ConstantModulus | PowerSumModulus | TabulatedModulus:
    if not isinstance(doc, dict) or "type" not in doc:
        _fail("modulus must be an object with a 'type' field")
    kind = doc["type"]
    try:
        if kind == "constant":
            return ConstantModulus(_number(doc, "value", nonnegative=True))
        if kind == "power_sum":
            terms = doc.get("terms")
            if not isinstance(terms, list) or not terms:
                _fail("power_sum modulus needs a nonempty 'terms' list")
            return PowerSumModulus(tuple((float(c), float(p)) for c, p in terms))
        if kind == "tabulated":
            return TabulatedModulus(
                np.asarray(doc.get("abscissae"), dtype=float),
                np.asarray(doc.get("ordinates"), dtype=float),
            )
    except ConfigError:
        raise
    except Exception as exc:
        _fail(f"invalid modulus: {exc}")
    _fail(f"unknown modulus type {kind!r}")


def _build_grid(config: dict) -> Grid:
    doc = config.get("grid", {"rule": "simpson", "n": 101})
    if not isinstance(doc, dict):
        _fail("'grid' must be an object")
    rule = doc.get("rule", "simpson")
    n = doc.get("n", 101)
    if not isinstance(n, int) or isinstance(n, bool):
        _fail(f"grid node count must be an integer, got {n!r}")
    interval = config.get("interval", [0.0, 1.0])
    if (not isinstance(interval, list) or len(interval) != 2
            or not all(isinstance(v, (int, float)) for v in interval)):
        _fail("'interval' must be a pair of numbers")
    lo, hi = float(interval[0]), float(interval[1])
    try:
        if rule == "simpson":
            return Grid.simpson(lo, hi, n)
        if rule == "trapezoid":
            return Grid.trapezoid(lo, hi, n)
    except ValueError as exc:
        _fail(f"invalid grid: {exc}")
    _fail(f"unknown quadrature rule {rule!r}")


def _resolve_kernel(term: dict, grid: Grid):
    if "kernel_csv" in term:
        path = Path(term["kernel_csv"])
        if not path.exists():
            _fail(f"kernel CSV {path} does not exist")
        table = KernelTable.from_csv(path)
        if table.values.shape != (grid.n, grid.n):
            _fail(
                f"kernel CSV shape {table.values.shape} does not match the "
                f"grid ({grid.n}, {grid.n})"
            )
        return table.values
    kernel = term.get("kernel")
    if isinstance(kernel, str):
        if kernel not in KERNELS:
            _fail(f"unknown kernel {kernel!r}; available: {sorted(KERNELS)}")
        return KERNELS[kernel]
    if isinstance(kernel, list):
        mat = np.asarray(kernel, dtype=float)
        if mat.shape != (grid.n, grid.n):
            _fail(f"inline kernel shape {mat.shape} does not match the grid")
        return mat
    _fail("each term needs a 'kernel' (name or matrix) or 'kernel_csv'")


def _build_problem(config: dict) -> dict:
    """Validate the config and build the profile/handle it describes."""
    if not isinstance(config, dict):
        _fail("config must be a JSON object")
    kind = config.get("kind")
    if kind not in KINDS:
        _fail(f"unknown problem kind {kind!r}; expected one of {KINDS}")
    radius = _number(config, "radius", positive=True)
    extras: dict = {}

    try:
        if kind == "scalar_profile":
            profile = MajorantProfile(
                _number(config, "center_shift", nonnegative=True),
                _build_modulus(config.get("modulus")),
                radius,
            )
            handle = build_self_majorizing(profile)

        elif kind == "multilinear":
            dimension = config.get("dimension", 1)
            degree = config.get("degree")
            if not isinstance(dimension, int) or not isinstance(degree, int):
                _fail("multilinear needs integer 'dimension' and 'degree'")
            if dimension == 1:
                tensor = _number(config, "coefficient")
            else:
                tensor = np.asarray(config.get("tensor"), dtype=float)
            spec = MultilinearSpec(
                dimension=dimension,
                degree=degree,
                tensor=tensor,
                constant=np.asarray(config.get("constant"), dtype=float),
                operator_norm=config.get("operator_norm"),
                seed=config.get("seed", 0),
            )
            handle = build_multilinear(spec, radius)
            norm_c = handle.profile.modulus.terms[0][0] / degree
            critical = multilinear_critical_shift(norm_c, degree)
            extras["multilinear"] = {
                "center_shift": handle.profile.center_shift,
                "critical_shift": critical,
                "solvable": handle.profile.center_shift <= critical,
            }
            profile = handle.profile

        elif kind in ("hammerstein_c", "hammerstein_lp"):
            grid = _build_grid(config)
            lam = _number(config, "lambda")
            terms_doc = config.get("terms")
            if not isinstance(terms_doc, list) or not terms_doc:
                _fail("'terms' must be a nonempty list")
            forcing = config.get("forcing", "zero")
            if isinstance(forcing, str):
                if forcing not in FORCINGS:
                    _fail(f"unknown forcing {forcing!r}; available: {sorted(FORCINGS)}")
                forcing = FORCINGS[forcing]
            elif isinstance(forcing, list):
                forcing = np.asarray(forcing, dtype=float)
            else:
                _fail("'forcing' must be a name or a sample list")
            center = config.get("x0")

            if kind == "hammerstein_c":
                terms = []
                for term in terms_doc:
                    name = term.get("nonlinearity")
                    if name not in NONLINEARITIES:
                        _fail(f"unknown nonlinearity {name!r}; "
                              f"available: {sorted(NONLINEARITIES)}")
                    fn, modulus = NONLINEARITIES[name]
                    terms.append(HammersteinTerm(
                        _resolve_kernel(term, grid), fn, modulus))
                spec = HammersteinSpec(
                    (grid.lower, grid.upper), tuple(terms), lam, forcing)
                handle = build_hammerstein_sup(spec, grid, radius, center=center)
            else:
                p = _number(config, "p")
                if p <= 1.0:
                    _fail("'p' must be > 1 for the L_p variant")
                terms, moduli, norms = [], [], []
                for term in terms_doc:
                    name = term.get("nonlinearity")
                    if name not in LP_NONLINEARITIES:
                        _fail(f"unknown L_p nonlinearity {name!r}; "
                              f"available: {sorted(LP_NONLINEARITIES)}")
                    fn, default_pairs, q_rule = LP_NONLINEARITIES[name]
                    q = term.get("q", p if q_rule == "same_as_p" else None)
                    if q is None:
                        _fail(f"term with nonlinearity {name!r} needs 'q'")
                    pairs = LipschitzPairSet(tuple(
                        (float(a), float(b))
                        for a, b in term.get("pairs", default_pairs)))
                    moduli.append(build_superposition_modulus(
                        pairs, p, float(q), grid.upper - grid.lower,
                        radius=radius))
                    kernel = _resolve_kernel(term, grid)
                    if "zaanen_norm" in term:
                        norms.append(float(term["zaanen_norm"]))
                    else:
                        if float(q) <= 1.0:
                            _fail("Zaanen estimation needs q > 1; supply "
                                  "'zaanen_norm' for this term")
                        mat = (kernel if isinstance(kernel, np.ndarray)
                               else KernelTable.from_function(grid, grid, kernel).values)
                        table = KernelTable(grid, grid, mat)
                        estimate = zaanen_norm_estimate(
                            table, float(q), p / (p - 1.0))
                        norms.append(_ZAANEN_INFLATION * estimate)
                    terms.append(HammersteinTerm(kernel, fn, None))
                spec = HammersteinSpec(
                    (grid.lower, grid.upper), tuple(terms), lam, forcing)
                handle = build_hammerstein_lp(
                    spec, moduli, norms, p, grid, radius, center=center)
            profile = handle.profile
            extras["grid"] = {"rule": grid.rule, "n": grid.n}

        elif kind == "urysohn":
            grid = _build_grid(config)
            name = config.get("kernel")
            if name not in URYSOHN_KERNELS:
                _fail(f"unknown Urysohn kernel {name!r}; "
                      f"available: {sorted(URYSOHN_KERNELS)}")
            demo = URYSOHN_KERNELS[name]
            spec = UrysohnSpec((grid.lower, grid.upper), demo["kernel"],
                               demo["u_modulus"], demo["v_modulus"])
            handle = build_urysohn(spec, grid, radius, center=config.get("x0"))
            profile = handle.profile
            extras["grid"] = {"rule": grid.rule, "n": grid.n}

        else:  # composition
            grid = _build_grid(config)
            outer_name = config.get("outer")
            inner_name = config.get("inner")
            if outer_name not in COMPOSITION_OUTER:
                _fail(f"unknown outer map {outer_name!r}; "
                      f"available: {sorted(COMPOSITION_OUTER)}")
            if inner_name not in COMPOSITION_INNER:
                _fail(f"unknown inner kernel {inner_name!r}; "
                      f"available: {sorted(COMPOSITION_INNER)}")
            outer = COMPOSITION_OUTER[outer_name]
            inner = COMPOSITION_INNER[inner_name]
            spec = CompositionSpec(
                (grid.lower, grid.upper), outer["outer"],
                outer["u_modulus"], outer["v_modulus"],
                inner["kernel"], inner["bound"], inner["modulus"])
            handle = build_composition(spec, grid, radius, center=config.get("x0"))
            profile = handle.profile
            extras["grid"] = {"rule": grid.rule, "n": grid.n}

    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        _fail(f"invalid {kind} config: {exc}")

    scale = config.get("modulus_scale")
    if scale is not None:
        scale = _number(config, "modulus_scale", positive=True)
        profile = MajorantProfile(profile.center_shift,
                                  scale_modulus(profile.modulus, scale),
                                  profile.radius)
        handle = OperatorHandle(handle.apply, handle.center, handle.norm, profile)

    return {"kind": kind, "handle": handle, "profile": profile, "extras": extras}


# ---------------------------------------------------------------------------
# document assembly
# ---------------------------------------------------------------------------

def _radii_doc(report: ZoneReport, radius: float) -> dict:
    return {
        "inner_radius": report.inner_radius,
        "convergence_radius": report.convergence_radius,
        "uniqueness_radius": report.uniqueness_radius,
        "uniqueness_radius_closed": report.uniqueness_radius_closed,
        "degenerate": report.degenerate,
        "contraction_radius": report.contraction_radius,
        "domain_radius": radius,
    }


def _zones_doc(report: ZoneReport) -> dict:
    return {
        "existence_zone": report.existence_zone.to_dict(),
        "uniqueness_zone": report.uniqueness_zone.to_dict(),
        "contraction_zone": report.contraction_zone.to_dict(),
    }


def run_analyze(config: dict, tol: float = DEFAULT_TOL) -> dict:
    """Build the problem, run the zone analysis, and emit the certificate.

    A no-existence outcome is a valid certificate, not an error: the
    document carries the flag and the minimized-gap witness.
    """
    problem = _build_problem(config)
    report = analyze(problem["profile"], tol)
    document = {
        "kind": problem["kind"],
        "existence_certified": report.existence_certified,
        "radii": _radii_doc(report, problem["profile"].radius),
        "zones": _zones_doc(report),
        "gap_witness": None,
    }
    if not report.existence_certified:
        document["gap_witness"] = {"gap": report.gap, "argmin": report.gap_argmin}
    document.update(problem["extras"])
    return document


def run_solve(config: dict, bound_tol: float = 1e-10, max_steps: int = 1000,
              start_offset: float = 0.0, tol: float = DEFAULT_TOL) -> dict:
    """Run the certified iteration and emit the step-by-step trace.

    A bound violation still produces a document (status bound_violated with
    the offending step as the diagnostic row); the caller maps it to exit
    code 4.
    """
    problem = _build_problem(config)
    handle = problem["handle"]
    report = analyze(problem["profile"], tol)
    if not report.existence_certified:
        raise NoExistenceError(report.gap, report.gap_argmin)
    xi0 = handle.center
    if start_offset:
        direction = np.ones_like(handle.center)
        xi0 = handle.center + direction * (start_offset / handle.norm(direction))
    rule = StoppingRule(bound_tol=bound_tol, max_steps=max_steps)
    document = {
        "kind": problem["kind"],
        "radii": _radii_doc(report, problem["profile"].radius),
        "start_offset": float(handle.norm(xi0 - handle.center)),
        "status": None,
        "steps": [],
        "final_bound": None,
        "solution": None,
        "certification": None,
    }
    try:
        solution, trace = iterate(handle, xi0, rule, report=report, tol=tol)
    except BoundViolationError as exc:
        document["status"] = "bound_violated"
        document["steps"] = [rec.to_dict() for rec in exc.trace.steps]
        document["diagnostic"] = {
            "message": str(exc),
            "step": exc.record.to_dict(),
            "observed_step_norm": exc.record.step_norm,
            "certified_step_bound": exc.record.step_bound,
        }
        return document
    document["status"] = trace.status
    document["steps"] = [rec.to_dict() for rec in trace.steps]
    document["final_bound"] = trace.final_bound
    document["solution"] = [float(v) for v in np.atleast_1d(solution)]
    if trace.steps:
        cert = certify_trace(trace)
        document["certification"] = {
            "steps_checked": cert.steps_checked,
            "step_ok": cert.step_ok,
            "worst_step_excess": cert.worst_step_excess,
        }
    else:
        document["certification"] = {"steps_checked": 0, "step_ok": True,
                                     "worst_step_excess": 0.0}
    return document


def _write_csv(path: Path, header: list[str], rows) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(v)) if isinstance(v, float) else v
                             for v in row])


def run_zones(config: dict, samples: int, out: Path,
              tol: float = DEFAULT_TOL) -> dict:
    """Write the curve table (r, a_plus, a_minus, bisectrix), a companion
    marker table, and, for multilinear problems, a family sweep of upper
    majorants across sub- and supercritical center shifts."""
    if samples < 2:
        _fail("--samples must be >= 2")
    problem = _build_problem(config)
    profile = problem["profile"]
    report = analyze(profile, tol)
    out = Path(out)

    rows = []
    for r in np.linspace(0.0, profile.radius, samples):
        upper, lower = eval_majorants(profile, float(r))
        rows.append((float(r), upper, lower, float(r)))
    _write_csv(out, ["r", "a_plus", "a_minus", "bisectrix"], rows)
    files = [str(out)]

    markers_path = out.with_name(out.stem + ".markers" + (out.suffix or ".csv"))
    markers = []
    if report.inner_radius is not None:
        markers.append(("inner_radius", report.inner_radius, "closed"))
    if report.convergence_radius is not None:
        markers.append(("convergence_radius", report.convergence_radius, "closed"))
    if report.contraction_radius is not None:
        markers.append(("contraction_radius", report.contraction_radius, "closed"))
    if report.uniqueness_radius is not None:
        boundary = "closed" if report.uniqueness_radius_closed else "open"
        markers.append(("uniqueness_radius", report.uniqueness_radius, boundary))
    markers.append(("domain_radius", profile.radius, "closed"))
    _write_csv(markers_path, ["name", "value", "boundary"], markers)
    files.append(str(markers_path))

    if problem["kind"] == "multilinear":
        critical = problem["extras"]["multilinear"]["critical_shift"]
        shifts = [factor * critical for factor in _FAMILY_FACTORS]
        family_path = out.with_name(out.stem + ".family" + (out.suffix or ".csv"))
        header = ["r"] + [f"a_plus@shift={shift:.12g}" for shift in shifts]
        family_rows = []
        for r in np.linspace(0.0, profile.radius, samples):
            integral = profile.modulus_integral(float(r))
            family_rows.append((float(r), *[shift + integral for shift in shifts]))
        _write_csv(family_path, header, family_rows)
        files.append(str(family_path))

    return {"kind": problem["kind"], "rows": samples, "files": files,
            "existence_certified": report.existence_certified}


def run_compare(config: dict, tol: float = DEFAULT_TOL) -> dict:
    """Contrast the classical contraction zone with the majorization zones."""
    problem = _build_problem(config)
    report = analyze(problem["profile"], tol)
    contraction, uniqueness = report.contraction_zone, report.uniqueness_zone
    wider = (uniqueness.contains_interval(contraction)
             and not contraction.contains_interval(uniqueness))
    return {
        "kind": problem["kind"],
        "existence_certified": report.existence_certified,
        "contraction_zone": contraction.to_dict(),
        "uniqueness_zone": uniqueness.to_dict(),
        "existence_zone": report.existence_zone.to_dict(),
        "banach_applicable": not contraction.is_empty(),
        "majorization_strictly_wider": wider,
    }


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _load_config(args) -> dict:
    if bool(args.config) == bool(args.preset):
        _fail("exactly one of --config or --preset is required")
    if args.preset:
        try:
            return get_preset(args.preset)
        except KeyError as exc:
            _fail(str(exc.args[0]))
    path = Path(args.config)
    if not path.exists():
        _fail(f"config file {path} does not exist")
    try:
        config = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        _fail(f"config file {path} is not valid JSON: {exc}")
    if not isinstance(config, dict):
        _fail(f"config file {path} must hold a JSON object")
    return config


def _emit(document: dict, out: str | None) -> None:
    text = json.dumps(document, indent=2)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="majorfix",
        description="Certified fixed-point analysis and iteration on "
                    "majorant profiles and discretized integral equations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("analyze", "emit the zone certificate for a problem"),
        ("solve", "run the certified iteration and emit the trace"),
        ("zones", "export curve and marker tables for the zone diagram"),
        ("compare", "contrast the contraction zone with the majorization zones"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", help="path to a JSON problem config")
        cmd.add_argument("--preset", help=f"named preset ({', '.join(preset_names())})")
        cmd.add_argument("--out", help="output path (default: stdout)")
        cmd.add_argument("--tol", type=float, default=None,
                         help="radius tolerance (default 1e-12)")
        if name == "solve":
            cmd.add_argument("--bound-tol", type=float, default=1e-10,
                             help="stop once the a-priori bound drops below this")
            cmd.add_argument("--max-steps", type=int, default=1000)
            cmd.add_argument("--start-offset", type=float, default=0.0,
                             help="distance of the initial iterate from the center")
        if name == "zones":
            cmd.add_argument("--samples", type=int, default=201,
                             help="number of radius samples in the curve table")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = _load_config(args)
        tol = args.tol if args.tol is not None else config.get("tol", DEFAULT_TOL)
        if tol <= 0.0:
            _fail("--tol must be > 0")
        if args.command == "analyze":
            _emit(run_analyze(config, tol), args.out)
        elif args.command == "solve":
            document = run_solve(config, bound_tol=args.bound_tol,
                                 max_steps=args.max_steps,
                                 start_offset=args.start_offset, tol=tol)
            _emit(document, args.out)
            if document["status"] == "bound_violated":
                print("bound violation: " + document["diagnostic"]["message"],
                      file=sys.stderr)
                return 4
        elif args.command == "zones":
            if not args.out:
                _fail("zones requires --out (CSV destination)")
            summary = run_zones(config, args.samples, Path(args.out), tol)
            print(json.dumps(summary, indent=2))
        else:
            _emit(run_compare(config, tol), args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except InadmissibleStartError as exc:
        print(f"inadmissible start: {exc}", file=sys.stderr)
        return 3
    except NoExistenceError as exc:
        # solve on a supercritical problem: no admissible start exists
        print(f"cannot iterate: {exc}", file=sys.stderr)
        return 3
    return 0


def entrypoint() -> None:
    sys.exit(main())
