"""Problem-spec parsing, example generation, command dispatch, reports.

A problem spec is a single JSON document describing a weighted space, a
field over it, the operator k, and optionally a second field.  Complex
scalars are [re, im] pairs; matrices are row-major nested arrays.  Spec
files serialize floats at full precision (parse/emit round-trips), while
reports use fixed %.12e formatting so identical runs are byte-identical
apart from the wall_time entry.
"""

from __future__ import annotations

import hashlib
import json
import math
import time
from dataclasses import dataclass, field as dc_field
from typing import Any, Optional

import numpy as np

from . import atoms_duals, douglas, frame_ops
from .errors import (
    BadParams,
    CkFrameError,
    ParseError,
    UnknownKind,
    ValidationError,
)
from .linalg import DEFAULT_CHECK_TOL, DEFAULT_RANK_TOL, Unbounded
from .measure import MeasureSpace, SampleField, make_measure_space

COMMANDS = ("bounds", "atoms", "dual", "verify-pair", "douglas", "sandwich")
GENERATOR_KINDS = (
    "onb",
    "scaled_onb",
    "random_ckframe",
    "random_bessel_pair",
    "interval_fourier",
)

STATUS_OK = "ok"
STATUS_FAILED = "failed"
STATUS_DEGENERATE = "degenerate"


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """Parsed problem instance."""

    space: MeasureSpace
    field_f: SampleField
    operator_k: np.ndarray
    field_g: Optional[SampleField] = None
    rank_tol: Optional[float] = None
    check_tol: Optional[float] = None
    options: dict = dc_field(default_factory=dict)

    @property
    def dim_h(self) -> int:
        return self.field_f.dim

    @property
    def dim_h0(self) -> int:
        return int(self.operator_k.shape[1])

    def to_json_dict(self) -> dict:
        doc: dict[str, Any] = {
            "space": {
                "labels": list(self.space.labels),
                "weights": list(self.space.weights),
            },
            "dim_h": self.dim_h,
            "dim_h0": self.dim_h0,
            "field_f": _matrix_pairs(self.field_f.samples),
            "operator_k": _matrix_pairs(self.operator_k),
            "field_g": _matrix_pairs(self.field_g.samples) if self.field_g is not None else None,
        }
        tols = {}
        if self.rank_tol is not None:
            tols["rank_tol"] = self.rank_tol
        if self.check_tol is not None:
            tols["check_tol"] = self.check_tol
        if tols:
            doc["tolerances"] = tols
        if self.options:
            doc["options"] = self.options
        return doc

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProblemSpec):
            return NotImplemented
        return self.to_json_dict() == other.to_json_dict()


@dataclass(frozen=True)
class RunReport:
    """Result envelope for one command run."""

    command: str
    inputs_digest: str
    status: str
    results: dict
    wall_time: float


# ---------------------------------------------------------------------------
# JSON plumbing


def _matrix_pairs(m: np.ndarray) -> list:
    """Complex matrix -> row-major nested [re, im] pairs."""
    a = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


def _require(cond: bool, message: str, path: str) -> None:
    if not cond:
        raise ValidationError(message, path)


def _as_number(value, path: str) -> float:
    _require(
        isinstance(value, (int, float)) and not isinstance(value, bool),
        f"expected a number, got {type(value).__name__}",
        path,
    )
    _require(math.isfinite(float(value)), "number must be finite", path)
    return float(value)


def _as_complex(value, path: str) -> complex:
    _require(
        isinstance(value, list) and len(value) == 2,
        "complex scalar must be a [re, im] pair",
        path,
    )
    re = _as_number(value[0], f"{path}[0]")
    im = _as_number(value[1], f"{path}[1]")
    return complex(re, im)


def _as_matrix(value, rows: int, cols: int, path: str) -> np.ndarray:
    _require(isinstance(value, list), "expected a nested array", path)
    _require(len(value) == rows, f"expected {rows} rows, got {len(value)}", path)
    out = np.zeros((rows, cols), dtype=complex)
    for i, row in enumerate(value):
        _require(
            isinstance(row, list) and len(row) == cols,
            f"expected a row of {cols} complex pairs",
            f"{path}[{i}]",
        )
        for j, cell in enumerate(row):
            out[i, j] = _as_complex(cell, f"{path}[{i}][{j}]")
    return out


def parse_problem(text: str) -> ProblemSpec:
    """Parse and validate a problem-spec JSON document.

    Raises ParseError for malformed JSON and ValidationError (carrying
    the JSON path) for schema violations.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    _require(isinstance(doc, dict), "top level must be an object", "")

    known = {"space", "dim_h", "dim_h0", "field_f", "operator_k", "field_g", "tolerances", "options"}
    for key in doc:
        _require(key in known, f"unknown key '{key}'", key)
    for key in ("space", "dim_h", "dim_h0", "field_f", "operator_k"):
        _require(key in doc, f"missing required key '{key}'", key)

    sp = doc["space"]
    _require(isinstance(sp, dict), "expected an object", "space")
    _require("labels" in sp and "weights" in sp, "space needs labels and weights", "space")
    labels = sp["labels"]
    weights = sp["weights"]
    _require(
        isinstance(labels, list) and all(isinstance(x, str) for x in labels),
        "labels must be an array of strings",
        "space.labels",
    )
    _require(isinstance(weights, list), "weights must be an array", "space.weights")
    _require(len(labels) > 0, "a measure space needs at least one atom", "space.labels")
    _require(
        len(labels) == len(weights),
        f"{len(labels)} labels but {len(weights)} weights",
        "space.weights",
    )
    ws = []
    for i, w in enumerate(weights):
        wv = _as_number(w, f"space.weights[{i}]")
        _require(wv > 0.0, f"weight must be > 0, got {wv!r}", f"space.weights[{i}]")
        ws.append(wv)
    space = make_measure_space(labels, ws)
    n_atoms = space.n_atoms

    dim_h = doc["dim_h"]
    dim_h0 = doc["dim_h0"]
    _require(isinstance(dim_h, int) and not isinstance(dim_h, bool) and dim_h >= 1,
             "dim_h must be a positive integer", "dim_h")
    _require(isinstance(dim_h0, int) and not isinstance(dim_h0, bool) and dim_h0 >= 1,
             "dim_h0 must be a positive integer", "dim_h0")

    f_samples = _as_matrix(doc["field_f"], n_atoms, dim_h, "field_f")
    k = _as_matrix(doc["operator_k"], dim_h, dim_h0, "operator_k")

    field_g = None
    if doc.get("field_g") is not None:
        g_samples = _as_matrix(doc["field_g"], n_atoms, dim_h0, "field_g")
        field_g = SampleField(space, g_samples)

    rank_tol = None
    check_tol = None
    if "tolerances" in doc and doc["tolerances"] is not None:
        tols = doc["tolerances"]
        _require(isinstance(tols, dict), "expected an object", "tolerances")
        for key in tols:
            _require(key in ("rank_tol", "check_tol"), f"unknown key '{key}'", f"tolerances.{key}")
            v = _as_number(tols[key], f"tolerances.{key}")
            _require(v > 0.0, "tolerance must be > 0", f"tolerances.{key}")
        rank_tol = float(tols["rank_tol"]) if "rank_tol" in tols else None
        check_tol = float(tols["check_tol"]) if "check_tol" in tols else None

    options = doc.get("options") or {}
    _require(isinstance(options, dict), "expected an object", "options")

    return ProblemSpec(
        space=space,
        field_f=SampleField(space, f_samples),
        operator_k=k,
        field_g=field_g,
        rank_tol=rank_tol,
        check_tol=check_tol,
        options=options,
    )


def emit_spec(spec: ProblemSpec) -> str:
    """Serialize a spec at full float precision; parse(emit(s)) == s."""
    return json.dumps(spec.to_json_dict(), sort_keys=True, indent=2) + "\n"


def spec_digest(spec: ProblemSpec) -> str:
    return "sha256:" + hashlib.sha256(emit_spec(spec).encode()).hexdigest()


# ---------------------------------------------------------------------------
# canonical report serialization


def _jsonable(value):
    """Convert results to JSON-ready structures (complex -> [re, im])."""
    if isinstance(value, Unbounded):
        return value
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        if value.ndim == 2:
            return _matrix_pairs(value)
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (complex, np.complexfloating)):
        z = complex(value)
        return [z.real, z.imag]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def _canonical_fragment(value, indent: int) -> str:
    pad = "  " * indent
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Unbounded):
        return '"unbounded"'
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            raise ValueError("NaN is not serializable in a report")
        if math.isinf(value):
            return '"unbounded"'
        return f"{value:.12e}"
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (list, tuple)):
        if len(value) == 0:
            return "[]"
        scalars = all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
        )
        if scalars:
            return "[" + ", ".join(_canonical_fragment(v, 0) for v in value) + "]"
        inner = ",\n".join(pad + "  " + _canonical_fragment(v, indent + 1) for v in value)
        return "[\n" + inner + "\n" + pad + "]"
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [
            pad + "  " + json.dumps(str(k)) + ": " + _canonical_fragment(value[k], indent + 1)
            for k in sorted(value, key=str)
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    raise TypeError(f"cannot serialize {type(value).__name__} in a report")


def report_to_json(report: RunReport) -> str:
    doc = {
        "command": report.command,
        "inputs_digest": report.inputs_digest,
        "status": report.status,
        "results": report.results,
        "wall_time": report.wall_time,
    }
    return _canonical_fragment(doc, 0) + "\n"


def _text_value(value, indent: int, lines: list[str], label: str) -> None:
    pad = "  " * indent
    if isinstance(value, dict):
        lines.append(f"{pad}{label}:")
        for k in sorted(value, key=str):
            _text_value(value[k], indent + 1, lines, str(k))
    elif isinstance(value, (list, tuple)) and any(isinstance(v, (list, tuple, dict)) for v in value):
        lines.append(f"{pad}{label}:")
        for i, v in enumerate(value):
            _text_value(v, indent + 1, lines, f"[{i}]")
    else:
        lines.append(f"{pad}{label}: {_text_scalar(value)}")


def _text_scalar(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, Unbounded) or (isinstance(value, float) and math.isinf(value)):
        return "unbounded"
    if isinstance(value, float):
        return f"{value:.12e}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_text_scalar(v) for v in value) + "]"
    return str(value)


def report_to_text(report: RunReport) -> str:
    lines = [
        "ckframe report",
        f"command: {report.command}",
        f"status: {report.status}",
        f"inputs_digest: {report.inputs_digest}",
        f"wall_time: {report.wall_time:.3e}s",
    ]
    results = report.results
    if report.command == "verify-pair" and "residual_c1" in results:
        lines.append("conditions:")
        lines.append("  condition  residual            pass")
        for i in range(1, 6):
            r = results[f"residual_c{i}"]
            ok = "yes" if r <= results.get("tolerance", DEFAULT_CHECK_TOL) else "no"
            lines.append(f"  c{i}         {r:.12e}  {ok}")
        rest = {k: v for k, v in results.items() if not k.startswith("residual_c")}
    else:
        rest = results
    for k in sorted(rest, key=str):
        _text_value(rest[k], 0, lines, str(k))
    return "\n".join(lines) + "\n"


def emit_report(report: RunReport, fmt: str = "json") -> str:
    """Render a report deterministically as canonical JSON or text."""
    if fmt == "json":
        return report_to_json(report)
    if fmt == "text":
        return report_to_text(report)
    raise ValueError(f"unknown format {fmt!r}")


# ---------------------------------------------------------------------------
# command dispatch


def _bounds_results(spec: ProblemSpec, rank_tol: float, tol: float) -> tuple[str, dict]:
    report = frame_ops.ckframe_check(spec.field_f, spec.operator_k, rank_tol, tol)
    results = {
        "lower": report.bounds.lower,
        "upper": report.bounds.upper,
        "kind": report.bounds.kind,
        "range_included": report.range_included,
        "is_ck_frame": report.is_ck_frame,
        "degenerate": report.degenerate,
        "residuals": report.residuals,
    }
    if report.degenerate:
        return STATUS_DEGENERATE, results
    return (STATUS_OK if report.is_ck_frame else STATUS_FAILED), results


def _atoms_results(spec: ProblemSpec, rank_tol: float, tol: float) -> tuple[str, dict]:
    cmap = atoms_duals.atom_coefficient_map(spec.field_f, spec.operator_k, rank_tol, tol)
    residual = atoms_duals.verify_atomic_decomposition(spec.field_f, spec.operator_k, cmap, tol)
    results = {
        "coefficients": cmap.matrix,
        "bound_constant": cmap.bound,
        "reconstruction_residual": residual,
    }
    return (STATUS_OK if residual <= tol else STATUS_FAILED), results


def _dual_results(spec: ProblemSpec, rank_tol: float, tol: float) -> tuple[str, dict]:
    dual = atoms_duals.canonical_dual(spec.field_f, spec.operator_k, rank_tol, tol)
    pair = atoms_duals.verify_dual_pair(
        dual.projected_frame, dual.dual_field, spec.operator_k, tol, rank_tol
    )
    results = {
        "projected_frame": dual.projected_frame.samples,
        "dual_field": dual.dual_field.samples,
        "lower_bound": dual.lower_bound,
        "upper_bound": dual.upper_bound,
        "max_pair_residual": pair.max_residual(),
    }
    return STATUS_OK, results


def _verify_pair_results(spec: ProblemSpec, rank_tol: float, tol: float) -> tuple[str, dict]:
    if spec.field_g is None:
        raise ValidationError("verify-pair requires field_g", "field_g")
    pair = atoms_duals.verify_dual_pair(
        spec.field_f, spec.field_g, spec.operator_k, tol, rank_tol
    )
    onto = pair.onto_variant_residuals
    results = {
        "residual_c1": pair.residual_c1,
        "residual_c2": pair.residual_c2,
        "residual_c3": pair.residual_c3,
        "residual_c4": pair.residual_c4,
        "residual_c5": pair.residual_c5,
        "holds": pair.holds,
        "lower_bound_cert": pair.lower_bound_cert,
        "onto_variant_residuals": list(onto) if onto is not None else None,
        "notes": list(pair.notes),
        "tolerance": tol,
    }
    return (STATUS_OK if pair.holds else STATUS_FAILED), results


def _douglas_results(spec: ProblemSpec, rank_tol: float, tol: float) -> tuple[str, dict]:
    l1 = spec.operator_k
    l2 = frame_ops.whitened_synthesis_matrix(spec.field_f)
    included = douglas.range_included(l1, l2, rank_tol, tol)
    result = douglas.douglas_factor(l1, l2, rank_tol, tol)
    lam = douglas.minimal_multiplier(l1, l2, rank_tol, tol)
    agree = included == result.included == (result.factor is not None) == (lam is not None)
    results = {
        "included": result.included,
        "residual": result.residual,
        "marginal": result.marginal,
        "factor": result.factor,
        "lambda_min": lam,
        "predicates_agree": agree,
    }
    if result.marginal:
        return STATUS_DEGENERATE, results
    return (STATUS_OK if agree else STATUS_FAILED), results


def _sandwich_results(spec: ProblemSpec, rank_tol: float, tol: float) -> tuple[str, dict]:
    sandwich = atoms_duals.sandwich_check(spec.field_f, spec.operator_k, rank_tol, tol)
    restricted = atoms_duals.subspace_cframe_margin(spec.field_f, spec.operator_k, rank_tol, tol)
    results = {"sandwich_margin": sandwich, "restricted_margin": restricted}
    ok = sandwich >= -tol and restricted >= -tol
    return (STATUS_OK if ok else STATUS_FAILED), results


_RUNNERS = {
    "bounds": _bounds_results,
    "atoms": _atoms_results,
    "dual": _dual_results,
    "verify-pair": _verify_pair_results,
    "douglas": _douglas_results,
    "sandwich": _sandwich_results,
}


def run_command(
    spec: ProblemSpec,
    command: str,
    tol_override: Optional[float] = None,
    default_tol: float = DEFAULT_CHECK_TOL,
) -> RunReport:
    """Execute one command against a spec and wrap the outcome.

    Tolerance resolution: explicit override, else the spec's check_tol,
    else the supplied default.  Library errors become status=failed with
    the originating error class name in the results; schema errors
    (e.g. verify-pair without field_g) propagate to the caller.
    """
    if command not in _RUNNERS:
        raise ValidationError(f"unknown command '{command}'", "command")
    tol = tol_override if tol_override is not None else (
        spec.check_tol if spec.check_tol is not None else default_tol
    )
    rank_tol = spec.rank_tol if spec.rank_tol is not None else DEFAULT_RANK_TOL
    digest = spec_digest(spec)
    start = time.perf_counter()
    try:
        status, results = _RUNNERS[command](spec, rank_tol, tol)
    except ValidationError:
        raise
    except CkFrameError as exc:
        status = STATUS_FAILED
        results = {"error": type(exc).__name__, "message": str(exc)}
    elapsed = time.perf_counter() - start
    return RunReport(
        command=command,
        inputs_digest=digest,
        status=status,
        results=_jsonable(results),
        wall_time=elapsed,
    )


# ---------------------------------------------------------------------------
# example generation


#: Per-kind parameter defaults, so every kind runs bare from the CLI.
PARAM_DEFAULTS = {
    "onb": {"n": 2},
    "scaled_onb": {"scales": [1.0, 2.0]},
    "random_ckframe": {"n": 4, "n0": 2, "atoms": 16},
    "random_bessel_pair": {"n": 4, "n0": 2, "atoms": 16},
    "interval_fourier": {"n": 4, "atoms": 16},
}


def _param_int(params: dict, key: str, minimum: int = 1) -> int:
    if key not in params:
        raise BadParams(f"missing parameter '{key}'")
    v = params[key]
    if not isinstance(v, int) or isinstance(v, bool) or v < minimum:
        raise BadParams(f"parameter '{key}' must be an integer >= {minimum}, got {v!r}")
    return v


def _with_defaults(kind: str, params: dict) -> dict:
    defaults = PARAM_DEFAULTS[kind]
    extra = set(params) - set(defaults)
    if extra:
        raise BadParams(f"unknown parameters: {sorted(extra)}")
    merged = dict(defaults)
    merged.update(params)
    return merged


def _counting_space(n: int) -> MeasureSpace:
    return make_measure_space([f"x{i}" for i in range(n)], [1.0] * n)


def generate_example(kind: str, params: dict, seed: int = 0) -> ProblemSpec:
    """Produce a deterministic problem spec of the requested kind.

    Kinds: onb (orthonormal basis, k = identity), scaled_onb (diagonal
    frame s_i e_i, k = identity), random_ckframe (random field with k
    factored through the synthesis operator so inclusion holds by
    construction), random_bessel_pair (independent random f, g, k), and
    interval_fourier (uniform grid on [0, 1) with modulation vectors,
    a Parseval frame).
    """
    if kind not in GENERATOR_KINDS:
        raise UnknownKind(f"unknown generator kind '{kind}'")
    if not isinstance(params, dict):
        raise BadParams("params must be an object")
    params = _with_defaults(kind, params)
    rng = np.random.default_rng(seed)

    if kind == "onb":
        n = _param_int(params, "n")
        space = _counting_space(n)
        eye = np.eye(n, dtype=complex)
        return ProblemSpec(space=space, field_f=SampleField(space, eye), operator_k=eye.copy())

    if kind == "scaled_onb":
        if not isinstance(params["scales"], list) or not params["scales"]:
            raise BadParams("parameter 'scales' must be a non-empty array of numbers")
        scales = []
        for i, s in enumerate(params["scales"]):
            if not isinstance(s, (int, float)) or isinstance(s, bool) or not math.isfinite(float(s)):
                raise BadParams(f"scales[{i}] must be a finite number")
            if float(s) == 0.0:
                raise BadParams(f"scales[{i}] must be nonzero")
            scales.append(float(s))
        n = len(scales)
        space = _counting_space(n)
        samples = np.diag(np.asarray(scales, dtype=complex))
        return ProblemSpec(
            space=space,
            field_f=SampleField(space, samples),
            operator_k=np.eye(n, dtype=complex),
        )

    if kind in ("random_ckframe", "random_bessel_pair"):
        n = _param_int(params, "n")
        n0 = _param_int(params, "n0")
        atoms = _param_int(params, "atoms")
        weights = rng.uniform(0.5, 1.5, size=atoms)
        space = make_measure_space([f"x{i}" for i in range(atoms)], weights)
        f_samples = rng.standard_normal((atoms, n)) + 1j * rng.standard_normal((atoms, n))
        field_f = SampleField(space, f_samples)
        if kind == "random_ckframe":
            mix = rng.standard_normal((atoms, n0)) + 1j * rng.standard_normal((atoms, n0))
            k = frame_ops.synthesis_matrix(field_f) @ mix
            spec = ProblemSpec(space=space, field_f=field_f, operator_k=k)
            check = frame_ops.ckframe_check(field_f, k)
            if not check.is_ck_frame:
                raise BadParams(
                    "generated instance failed its own frame check; "
                    "try different dims or another seed"
                )
            return spec
        g_samples = rng.standard_normal((atoms, n0)) + 1j * rng.standard_normal((atoms, n0))
        k = rng.standard_normal((n, n0)) + 1j * rng.standard_normal((n, n0))
        return ProblemSpec(
            space=space,
            field_f=field_f,
            operator_k=k,
            field_g=SampleField(space, g_samples),
        )

    # interval_fourier
    n = _param_int(params, "n")
    atoms = _param_int(params, "atoms")
    if atoms < n:
        raise BadParams(f"interval_fourier needs atoms >= n, got {atoms} < {n}")
    grid = np.arange(atoms) / atoms
    samples = np.exp(2j * np.pi * np.outer(grid, np.arange(n)))
    space = make_measure_space([f"t{j}" for j in range(atoms)], [1.0 / atoms] * atoms)
    return ProblemSpec(
        space=space,
        field_f=SampleField(space, samples),
        operator_k=np.eye(n, dtype=complex),
    )
