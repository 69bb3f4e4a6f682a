"""Synthesis, analysis, and frame-bound diagnostics for sampled fields.

A field f over a weighted space X induces three operators:

* synthesis  T_f : L2(X) -> H,   g |-> sum_i w_i g_i f_i
* analysis   T_f*: H -> L2(X),   h |-> (<h, f_i>)_i
* frame op   S_f = T_f T_f* = sum_i w_i f_i f_i*

Note the weights live in the L2 inner product, so analysis carries no
weight factor; the pair is adjoint with respect to the weighted metric.
A bounded operator k into H is "reproduced" by f when the lower frame
inequality holds against ||k* h||^2 and range(k) sits inside range(T_f).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimMismatch, SpaceMismatch
from .linalg import (
    DEFAULT_CHECK_TOL,
    DEFAULT_RANK_TOL,
    UNBOUNDED,
    OperatorMatrix,
    Unbounded,
    adjoint,
    as_operator,
    hermitian_eig,
    max_psd_multiplier,
    operator_norm,
    range_projector,
)
from .measure import SampleField, ScalarField

C_BESSEL = "cBessel"
C_FRAME = "cFrame"
CK_FRAME = "ckFrame"


@dataclass(frozen=True)
class FrameBounds:
    """Optimal constants of a frame-type inequality.

    lower is UNBOUNDED exactly in the vacuous k = 0 case; otherwise a
    nonnegative float.  kind records which inequality the bounds certify.
    """

    lower: float | Unbounded
    upper: float
    kind: str


@dataclass(frozen=True)
class CkFrameReport:
    """Outcome of the reproducing-operator frame check."""

    bounds: FrameBounds
    range_included: bool
    is_ck_frame: bool
    residuals: dict[str, float] = field(default_factory=dict)
    degenerate: bool = False


def synthesis(f: SampleField, g: ScalarField) -> np.ndarray:
    """T_f g = sum_i w_i g_i f_i, a vector in H."""
    if f.space != g.space:
        raise SpaceMismatch("field and coefficients live over different spaces")
    w = f.space.weight_array
    return (w * g.values) @ f.samples


def analysis(f: SampleField, h) -> ScalarField:
    """Adjoint of synthesis: the coefficient function x -> <h, f(x)>."""
    hv = np.asarray(h, dtype=complex)
    if hv.ndim != 1 or hv.shape[0] != f.dim:
        raise DimMismatch(f"expected vector of length {f.dim}, got shape {hv.shape}")
    return ScalarField(f.space, f.samples.conj() @ hv)


def synthesis_matrix(f: SampleField) -> OperatorMatrix:
    """Matrix of T_f acting on raw atom values: column i is w_i * f_i."""
    w = f.space.weight_array
    return (f.samples * w[:, None]).T.copy()


def whitened_synthesis_matrix(f: SampleField) -> OperatorMatrix:
    """Matrix of T_f in orthonormal coordinates for weighted L2.

    The isometry g -> sqrt(w) * g turns the weighted space into plain C^N;
    in those coordinates T_f has column i equal to sqrt(w_i) * f_i.  Ranks,
    norms, and pseudoinverses of T_f are computed through this matrix.
    """
    w = f.space.weight_array
    return (f.samples * np.sqrt(w)[:, None]).T.copy()


def frame_operator(f: SampleField) -> OperatorMatrix:
    """S_f = sum_i w_i f_i f_i*, Hermitian PSD on H."""
    w = f.space.weight_array
    s = (f.samples.T * w) @ f.samples.conj()
    return 0.5 * (s + s.conj().T)


def map_field(u, f: SampleField) -> SampleField:
    """Apply an operator atomwise: (u f)(x) = u(f(x))."""
    a = as_operator(u)
    if a.shape[1] != f.dim:
        raise DimMismatch(f"operator expects dim {a.shape[1]}, field has {f.dim}")
    return SampleField(f.space, f.samples @ a.T)


def cframe_bounds(f: SampleField, tol: float = DEFAULT_CHECK_TOL) -> FrameBounds:
    """Optimal plain frame bounds: extreme eigenvalues of S_f."""
    eig = hermitian_eig(frame_operator(f), tol)
    lower = max(float(eig.eigenvalues[0]), 0.0)
    upper = max(float(eig.eigenvalues[-1]), 0.0)
    return FrameBounds(lower=lower, upper=upper, kind=C_FRAME if lower > tol else C_BESSEL)


def ckframe_check(
    f: SampleField,
    k,
    rank_tol: float = DEFAULT_RANK_TOL,
    tol: float = DEFAULT_CHECK_TOL,
) -> CkFrameReport:
    """Decide whether f reproduces the operator k.

    Two independent certificates are computed and must agree away from
    tolerance hairlines:

    * bounds.lower: the largest A with A k k* <= S_f (0.0 when range(k)
      escapes range(S_f), UNBOUNDED when k = 0);
    * range_included: ||(I - P_{range T_f}) k|| <= tol * ||k||.

    The k = 0 case is vacuously a frame and flagged ``degenerate``.
    """
    kk = as_operator(k)
    if kk.shape[0] != f.dim:
        raise DimMismatch(f"k maps into dim {kk.shape[0]}, field has dim {f.dim}")

    s = frame_operator(f)
    eig = hermitian_eig(s, tol)
    upper = max(float(eig.eigenvalues[-1]), 0.0)
    lower = max_psd_multiplier(s, kk @ adjoint(kk), rank_tol, tol)

    k_norm = operator_norm(kk)
    if k_norm == 0.0:
        inclusion_residual = 0.0
    else:
        proj = range_projector(synthesis_matrix(f), rank_tol)
        eye = np.eye(f.dim)
        inclusion_residual = operator_norm((eye - proj) @ kk) / k_norm
    range_included = inclusion_residual <= tol

    degenerate = k_norm == 0.0
    lower_positive = isinstance(lower, Unbounded) or lower > tol
    if not isinstance(lower, Unbounded):
        lower = max(float(lower), 0.0)

    return CkFrameReport(
        bounds=FrameBounds(lower=lower, upper=upper, kind=CK_FRAME),
        range_included=range_included,
        is_ck_frame=range_included and lower_positive,
        residuals={"range_inclusion": float(inclusion_residual)},
        degenerate=degenerate,
    )
