"""Problem-spec JSON schema, example generators, and command dispatch."""

import json

import numpy as np
import pytest

from ckframe import (
    BadParams,
    ParseError,
    SampleField,
    UnknownKind,
    ValidationError,
    make_measure_space,
)
from ckframe.frame_ops import ckframe_check, frame_operator
from ckframe.harness import (
    COMMANDS,
    GENERATOR_KINDS,
    ProblemSpec,
    RunReport,
    STATUS_DEGENERATE,
    STATUS_FAILED,
    STATUS_OK,
    emit_report,
    emit_spec,
    generate_example,
    parse_problem,
    run_command,
    spec_digest,
)
from helpers import strip_wall_time

MINIMAL_SPEC = """
{
  "space": {"labels": ["a", "b"], "weights": [1.0, 1.0]},
  "dim_h": 2,
  "dim_h0": 2,
  "field_f": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]],
  "operator_k": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]
}
"""


def minimal_spec():
    return parse_problem(MINIMAL_SPEC)


def spec_with(**overrides):
    doc = json.loads(MINIMAL_SPEC)
    doc.update(overrides)
    return json.dumps(doc)


# ---------------------------------------------------------------------------
# parsing and validation


def test_parse_minimal_spec():
    spec = minimal_spec()
    assert spec.dim_h == 2
    assert spec.dim_h0 == 2
    assert spec.space.n_atoms == 2
    assert spec.field_g is None
    assert np.array_equal(spec.operator_k, np.eye(2))


def test_parse_rejects_malformed_json():
    with pytest.raises(ParseError):
        parse_problem("{not json")


def test_parse_rejects_non_object_top_level():
    with pytest.raises(ValidationError):
        parse_problem("[1, 2]")


def test_parse_rejects_zero_weight_with_path():
    text = spec_with(space={"labels": ["a", "b"], "weights": [0.0, 1.0]})
    with pytest.raises(ValidationError) as exc:
        parse_problem(text)
    assert exc.value.path == "space.weights[0]"


def test_parse_rejects_row_length_mismatch():
    text = spec_with(field_f=[[[1, 0]], [[0, 0], [1, 0]]])
    with pytest.raises(ValidationError) as exc:
        parse_problem(text)
    assert exc.value.path == "field_f[0]"


def test_parse_rejects_unknown_key():
    with pytest.raises(ValidationError) as exc:
        parse_problem(spec_with(banana=1))
    assert exc.value.path == "banana"


def test_parse_rejects_missing_required_key():
    doc = json.loads(MINIMAL_SPEC)
    del doc["operator_k"]
    with pytest.raises(ValidationError) as exc:
        parse_problem(json.dumps(doc))
    assert exc.value.path == "operator_k"


def test_parse_rejects_bad_tolerances():
    with pytest.raises(ValidationError) as exc:
        parse_problem(spec_with(tolerances={"check_tol": 0.0}))
    assert exc.value.path == "tolerances.check_tol"
    with pytest.raises(ValidationError):
        parse_problem(spec_with(tolerances={"typo_tol": 1e-8}))


def test_parse_rejects_bool_and_bad_dims():
    with pytest.raises(ValidationError) as exc:
        parse_problem(spec_with(dim_h=True))
    assert exc.value.path == "dim_h"
    with pytest.raises(ValidationError):
        parse_problem(spec_with(dim_h0=0))


def test_parse_rejects_bad_field_g():
    text = spec_with(field_g=[[[1, 0]], [[0, 0]]], dim_h0=2)
    with pytest.raises(ValidationError) as exc:
        parse_problem(text)
    assert exc.value.path.startswith("field_g")


def test_parse_rejects_non_finite_entries():
    with pytest.raises(ValidationError):
        parse_problem(spec_with(operator_k=[[[1, 0], [0, 0]], [[0, 0], ["nan", 0]]]))


def test_parse_accepts_tolerances_and_options():
    text = spec_with(tolerances={"check_tol": 1e-6, "rank_tol": 1e-9}, options={"note": "x"})
    spec = parse_problem(text)
    assert spec.check_tol == 1e-6
    assert spec.rank_tol == 1e-9
    assert spec.options == {"note": "x"}


# ---------------------------------------------------------------------------
# serialization round trips


@pytest.mark.parametrize("kind", GENERATOR_KINDS)
def test_round_trip_all_kinds(kind):
    spec = generate_example(kind, {}, seed=3)
    again = parse_problem(emit_spec(spec))
    assert again == spec
    assert spec_digest(again) == spec_digest(spec)


def test_digest_format_and_sensitivity():
    a = generate_example("onb", {"n": 2})
    b = generate_example("onb", {"n": 3})
    assert spec_digest(a).startswith("sha256:")
    assert len(spec_digest(a)) == len("sha256:") + 64
    assert spec_digest(a) != spec_digest(b)
    assert spec_digest(a) == spec_digest(generate_example("onb", {"n": 2}))


# ---------------------------------------------------------------------------
# generators


def test_generator_determinism():
    a = generate_example("random_ckframe", {"n": 3, "n0": 2, "atoms": 9}, seed=5)
    b = generate_example("random_ckframe", {"n": 3, "n0": 2, "atoms": 9}, seed=5)
    c = generate_example("random_ckframe", {"n": 3, "n0": 2, "atoms": 9}, seed=6)
    assert a == b
    assert a != c


def test_random_ckframe_is_sound_across_seeds():
    for seed in range(10):
        spec = generate_example("random_ckframe", {"n": 3, "n0": 2, "atoms": 10}, seed=seed)
        assert ckframe_check(spec.field_f, spec.operator_k).is_ck_frame


def test_random_bessel_pair_carries_second_field():
    spec = generate_example("random_bessel_pair", {"n": 3, "n0": 2, "atoms": 8}, seed=1)
    assert spec.field_g is not None
    assert spec.field_g.samples.shape == (8, 2)


def test_interval_fourier_is_parseval():
    spec = generate_example("interval_fourier", {"n": 4, "atoms": 16})
    s = frame_operator(spec.field_f)
    assert np.allclose(s, np.eye(4), atol=1e-12)


def test_generator_defaults_fill_in():
    spec = generate_example("scaled_onb", {})
    assert np.array_equal(spec.field_f.samples, np.diag([1.0, 2.0]).astype(complex))


def test_generator_rejections():
    with pytest.raises(UnknownKind):
        generate_example("mystery", {})
    with pytest.raises(BadParams):
        generate_example("onb", [1, 2])
    with pytest.raises(BadParams):
        generate_example("onb", {"m": 2})
    with pytest.raises(BadParams):
        generate_example("onb", {"n": 0})
    with pytest.raises(BadParams):
        generate_example("interval_fourier", {"n": 8, "atoms": 4})
    with pytest.raises(BadParams):
        generate_example("scaled_onb", {"scales": [1.0, 0.0]})
    with pytest.raises(BadParams):
        generate_example("scaled_onb", {"scales": []})


# ---------------------------------------------------------------------------
# command dispatch


def test_bounds_on_onb():
    report = run_command(generate_example("onb", {"n": 2}), "bounds")
    assert report.status == STATUS_OK
    assert report.results["lower"] == pytest.approx(1.0)
    assert report.results["upper"] == pytest.approx(1.0)
    assert report.results["kind"] == "ckFrame"
    assert report.results["is_ck_frame"] is True


def test_bounds_degenerate_zero_k():
    spec = minimal_spec()
    zero_k = ProblemSpec(
        space=spec.space,
        field_f=spec.field_f,
        operator_k=np.zeros((2, 2), dtype=complex),
    )
    report = run_command(zero_k, "bounds")
    assert report.status == STATUS_DEGENERATE
    assert report.results["degenerate"] is True


def test_dual_on_scaled_onb():
    report = run_command(generate_example("scaled_onb", {}), "dual")
    assert report.status == STATUS_OK
    assert report.results["dual_field"] == [
        [[1.0, 0.0], [0.0, 0.0]],
        [[0.0, 0.0], [0.5, 0.0]],
    ]
    assert report.results["lower_bound"] == pytest.approx(0.25)
    assert report.results["upper_bound"] == pytest.approx(1.0)


def test_atoms_failure_reports_error_class():
    space = make_measure_space(["a", "b"], [1.0, 1.0])
    f = SampleField(space, np.array([[1.0, 0.0], [1.0, 0.0]]))
    spec = ProblemSpec(space=space, field_f=f, operator_k=np.eye(2, dtype=complex))
    report = run_command(spec, "atoms")
    assert report.status == STATUS_FAILED
    assert report.results["error"] == "RangeNotIncluded"
    assert "message" in report.results


def test_verify_pair_needs_field_g():
    with pytest.raises(ValidationError) as exc:
        run_command(minimal_spec(), "verify-pair")
    assert exc.value.path == "field_g"


def test_verify_pair_on_generated_pair():
    spec = generate_example("random_ckframe", {"n": 3, "n0": 2, "atoms": 9}, seed=2)
    from ckframe.atoms_duals import canonical_dual

    dual = canonical_dual(spec.field_f, spec.operator_k)
    paired = ProblemSpec(
        space=spec.space,
        field_f=dual.projected_frame,
        operator_k=spec.operator_k,
        field_g=dual.dual_field,
    )
    report = run_command(paired, "verify-pair")
    assert report.status == STATUS_OK
    assert report.results["holds"] is True
    for i in range(1, 6):
        assert report.results[f"residual_c{i}"] <= 1e-8


def test_douglas_on_onb():
    report = run_command(generate_example("onb", {"n": 2}), "douglas")
    assert report.status == STATUS_OK
    assert report.results["included"] is True
    assert report.results["lambda_min"] == pytest.approx(1.0)
    assert report.results["predicates_agree"] is True


def test_douglas_marginal_goes_degenerate():
    # k leaks out of the synthesis range by 3e-8: inside the (tol, 100 tol) band
    space = make_measure_space(["a"], [1.0])
    f = SampleField(space, np.array([[1.0, 0.0]]))
    k = np.array([[1.0], [3e-8]])
    spec = ProblemSpec(space=space, field_f=f, operator_k=k)
    report = run_command(spec, "douglas")
    assert report.status == STATUS_DEGENERATE
    assert report.results["marginal"] is True
    assert report.results["included"] is False


def test_sandwich_command():
    report = run_command(generate_example("scaled_onb", {}), "sandwich")
    assert report.status == STATUS_OK
    assert report.results["sandwich_margin"] == 0.0
    assert report.results["restricted_margin"] >= -1e-12


def test_unknown_command_rejected():
    with pytest.raises(ValidationError):
        run_command(minimal_spec(), "polish")
    assert set(COMMANDS) == {"bounds", "atoms", "dual", "verify-pair", "douglas", "sandwich"}


def test_tolerance_resolution_order():
    # pair broken at the 1e-5 level: passes at loose tol, fails at tight tol
    space = make_measure_space(["a", "b"], [1.0, 1.0])
    f = SampleField(space, np.eye(2))
    g = SampleField(space, np.eye(2) * (1.0 + 1e-5))
    base = ProblemSpec(space=space, field_f=f, operator_k=np.eye(2, dtype=complex), field_g=g)
    assert run_command(base, "verify-pair").status == STATUS_FAILED
    loose = ProblemSpec(
        space=space,
        field_f=f,
        operator_k=np.eye(2, dtype=complex),
        field_g=g,
        check_tol=1e-3,
    )
    assert run_command(loose, "verify-pair").status == STATUS_OK
    # explicit override beats the spec's own tolerance
    assert run_command(loose, "verify-pair", tol_override=1e-8).status == STATUS_FAILED
    # caller default applies only when the spec is silent
    assert run_command(base, "verify-pair", default_tol=1e-3).status == STATUS_OK
    assert run_command(loose, "verify-pair", default_tol=1e-8).status == STATUS_OK


# ---------------------------------------------------------------------------
# report rendering


def test_report_json_is_deterministic_up_to_wall_time():
    spec = generate_example("scaled_onb", {})
    first = emit_report(run_command(spec, "dual"))
    second = emit_report(run_command(spec, "dual"))
    assert strip_wall_time(first) == strip_wall_time(second)


def test_report_json_shape():
    report = run_command(generate_example("onb", {"n": 2}), "bounds")
    doc = json.loads(emit_report(report, "json"))
    assert set(doc) == {"command", "inputs_digest", "status", "results", "wall_time"}
    assert doc["command"] == "bounds"
    assert doc["inputs_digest"].startswith("sha256:")
    assert isinstance(doc["wall_time"], float)


def test_report_json_renders_unbounded():
    spec = minimal_spec()
    zero_k = ProblemSpec(
        space=spec.space,
        field_f=spec.field_f,
        operator_k=np.zeros((2, 2), dtype=complex),
    )
    doc = json.loads(emit_report(run_command(zero_k, "bounds"), "json"))
    assert doc["results"]["lower"] == "unbounded"


def test_report_text_lists_five_conditions():
    spec = generate_example("scaled_onb", {})
    paired = ProblemSpec(
        space=spec.space,
        field_f=spec.field_f,
        operator_k=spec.operator_k,
        field_g=SampleField(spec.space, np.diag([1.0, 0.5]).astype(complex)),
    )
    text = emit_report(run_command(paired, "verify-pair"), "text")
    for i in range(1, 6):
        assert f"c{i}" in text
    assert "condition" in text
    assert "status: ok" in text


def test_report_rejects_unknown_format_and_nan():
    report = run_command(generate_example("onb", {"n": 2}), "bounds")
    with pytest.raises(ValueError):
        emit_report(report, "yaml")
    poisoned = RunReport(
        command="bounds",
        inputs_digest="sha256:0",
        status=STATUS_OK,
        results={"x": float("nan")},
        wall_time=0.0,
    )
    with pytest.raises(ValueError):
        emit_report(poisoned, "json")
