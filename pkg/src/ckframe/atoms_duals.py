"""Atomic decompositions, inverse-on-range bounds, and dual pairs.

Everything here concerns a field f over X reproducing a bounded operator
k : H0 -> H.  The central objects:

* a coefficient map m : H0 -> L2(X) with k h = T_f(m h)  (atoms);
* the inverse of the frame operator on range(k), with the two-sided
  eigenvalue sandwich it must satisfy;
* dual pairs (f, g, k): five equivalent reproducing identities, plus the
  canonical dual construction g = k* (S_f|_{range k})^{-1} P f.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    CanonicalDualFailed,
    DegenerateOperator,
    DimMismatch,
    NotADualPair,
    NotInvertibleOnRange,
    RangeNotIncluded,
    SpaceMismatch,
)
from .frame_ops import (
    analysis,
    ckframe_check,
    frame_operator,
    map_field,
    synthesis,
    whitened_synthesis_matrix,
)
from .linalg import (
    DEFAULT_CHECK_TOL,
    DEFAULT_RANK_TOL,
    OperatorMatrix,
    Unbounded,
    adjoint,
    as_operator,
    hermitian_eig,
    max_psd_multiplier,
    operator_norm,
    pseudoinverse,
    range_basis,
    range_projector,
)
from .measure import SampleField, ScalarField, l2_norm


@dataclass(frozen=True)
class CoefficientMap:
    """Linear map sending h in H0 to a coefficient function on the atoms.

    matrix has one row per atom, one column per H0 coordinate.  bound is
    the operator norm from H0 into weighted L2: the constant a with
    ||m h||_{L2} <= a ||h|| for every h.
    """

    matrix: OperatorMatrix
    source_dims: tuple[int, int]
    bound: float


@dataclass(frozen=True)
class DualPairReport:
    """Residuals of the five equivalent dual-pair identities.

    c1: k h0 recovered by synthesizing f against <h0, g(.)>;
    c2: k* h recovered by synthesizing g against <h, f(.)>;
    c3, c4: the two bilinear-form identities over basis pairs;
    c5: the c4 identity pinned to the standard coordinate bases.
    All residuals are relative to max(1, ||k||).  onto_variant_residuals
    carries the norm-identity residuals (k onto, k* onto) when the
    respective surjectivity holds, None entries otherwise.
    """

    residual_c1: float
    residual_c2: float
    residual_c3: float
    residual_c4: float
    residual_c5: float
    holds: bool
    onto_variant_residuals: Optional[tuple[Optional[float], Optional[float]]]
    lower_bound_cert: float
    notes: tuple[str, ...] = ()

    def max_residual(self) -> float:
        return max(
            self.residual_c1,
            self.residual_c2,
            self.residual_c3,
            self.residual_c4,
            self.residual_c5,
        )


@dataclass(frozen=True)
class CanonicalDual:
    """Canonical dual field of (f, k), with its certified bound interval."""

    projected_frame: SampleField
    dual_field: SampleField
    lower_bound: float
    upper_bound: float


# ---------------------------------------------------------------------------
# atoms


def atom_coefficient_map(
    f: SampleField,
    k,
    rank_tol: float = DEFAULT_RANK_TOL,
    tol: float = DEFAULT_CHECK_TOL,
) -> CoefficientMap:
    """Minimal-norm coefficient map m with T_f (m h) = k h.

    Solves the weighted least-norm problem columnwise: writing B for the
    whitened synthesis matrix (columns sqrt(w_i) f_i), the solution is
    m = diag(1/sqrt(w)) pinv(B) k, and the recorded bound constant is
    ||pinv(B) k|| (the operator norm of m into weighted L2).

    Raises
    ------
    RangeNotIncluded
        If range(k) is not contained in range(T_f); no coefficient map
        can reproduce k in that case.
    """
    kk = as_operator(k)
    report = ckframe_check(f, kk, rank_tol, tol)
    if not report.range_included:
        raise RangeNotIncluded(
            f"range inclusion residual {report.residuals['range_inclusion']:.3e} "
            f"exceeds tolerance {tol:.1e}"
        )
    b = whitened_synthesis_matrix(f)
    whitened = pseudoinverse(b, rank_tol) @ kk
    w = f.space.weight_array
    matrix = whitened / np.sqrt(w)[:, None]
    return CoefficientMap(
        matrix=matrix,
        source_dims=(kk.shape[1], f.space.n_atoms),
        bound=operator_norm(whitened),
    )


def verify_atomic_decomposition(
    f: SampleField,
    k,
    m: CoefficientMap,
    tol: float = DEFAULT_CHECK_TOL,
) -> float:
    """Worst relative reconstruction error of k over a basis of H0.

    Also checks the recorded bound constant against the actual weighted
    coefficient norms; any excess is folded into the returned residual.
    """
    kk = as_operator(k)
    dim0, n_atoms = m.source_dims
    if kk.shape != (f.dim, dim0):
        raise DimMismatch(f"k has shape {kk.shape}, expected {(f.dim, dim0)}")
    if m.matrix.shape != (n_atoms, dim0) or n_atoms != f.space.n_atoms:
        raise DimMismatch("coefficient map shape does not match field")

    scale = max(1.0, operator_norm(kk))
    worst = 0.0
    worst_coeff_norm = 0.0
    for j in range(dim0):
        coeff = ScalarField(f.space, m.matrix[:, j])
        recon = synthesis(f, coeff)
        worst = max(worst, float(np.linalg.norm(kk[:, j] - recon)) / scale)
        worst_coeff_norm = max(worst_coeff_norm, l2_norm(coeff))
    bound_excess = max(0.0, worst_coeff_norm - m.bound) / max(1.0, m.bound)
    return max(worst, bound_excess)


# ---------------------------------------------------------------------------
# inverse on range(k) and the bound sandwiches


def _require_ck_frame(f, kk, rank_tol, tol):
    if operator_norm(kk) == 0.0:
        raise DegenerateOperator("k = 0 holds vacuously; no closed-range certificate")
    report = ckframe_check(f, kk, rank_tol, tol)
    lower = report.bounds.lower
    if not report.range_included or isinstance(lower, Unbounded) or lower <= tol:
        raise NotInvertibleOnRange(
            "f does not reproduce k: lower bound "
            f"{lower!r} / range inclusion {report.range_included}"
        )
    return report


def inverse_on_range(
    f: SampleField,
    k,
    rank_tol: float = DEFAULT_RANK_TOL,
    tol: float = DEFAULT_CHECK_TOL,
) -> OperatorMatrix:
    """Inverse of the frame operator on range(k), as a matrix G on H.

    G satisfies G S_f u = u for u in range(k) and annihilates the
    orthogonal complement of S_f(range(k)).  Realized as U pinv(S_f U)
    for U an orthonormal basis of range(k).

    Raises
    ------
    DegenerateOperator for k = 0; NotInvertibleOnRange when S_f drops
    rank on range(k) or (f, k) fails the frame check; RankAmbiguous when
    the rank of k is numerically ill-determined.
    """
    kk = as_operator(k)
    _require_ck_frame(f, kk, rank_tol, tol)
    u = range_basis(kk, rank_tol)
    su = frame_operator(f) @ u
    gram = pseudoinverse(su, rank_tol)
    # rank(S_f U) must match rank(U) for S_f to be injective on range(k)
    if np.linalg.matrix_rank(su, tol=rank_tol * max(1.0, operator_norm(su))) < u.shape[1]:
        raise NotInvertibleOnRange("frame operator drops rank on range(k)")
    return u @ gram


def _compressed_inverse(f: SampleField, kk: OperatorMatrix, rank_tol: float) -> OperatorMatrix:
    """Inverse of the compression of S_f to range(k), as a matrix on H.

    Hermitian counterpart of inverse_on_range: U (U* S_f U)^-1 U* maps
    range(k) back into range(k).  That invariance is what keeps the
    canonical dual's optimal bounds inside the certified interval; the
    one-sided inverse does not provide it.
    """
    u = range_basis(kk, rank_tol)
    compression = u.conj().T @ frame_operator(f) @ u
    eig = hermitian_eig(compression)
    if eig.eigenvalues[0] <= rank_tol * max(1.0, eig.eigenvalues[-1]):
        raise NotInvertibleOnRange("frame operator drops rank on range(k)")
    return u @ np.linalg.inv(compression) @ u.conj().T


def _pinv_norm(kk: OperatorMatrix, rank_tol: float) -> float:
    """||pinv(k)|| = 1 / (smallest retained singular value)."""
    return operator_norm(pseudoinverse(kk, rank_tol))


def sandwich_check(
    f: SampleField,
    k,
    rank_tol: float = DEFAULT_RANK_TOL,
    tol: float = DEFAULT_CHECK_TOL,
) -> float:
    """Worst slack of the two-sided bound on the inverted frame operator.

    For G = inverse_on_range(f, k) and unit test vectors h in
    S_f(range(k)), the quadratic form <G h, h> must lie between 1/B and
    ||pinv(k)||^2 / A, where (A, B) are the ck-frame bounds.  The exact
    extrema over the subspace are computed by compressing the form to an
    orthonormal basis; the return value is negative iff some h violates
    a side.
    """
    kk = as_operator(k)
    report = _require_ck_frame(f, kk, rank_tol, tol)
    g = inverse_on_range(f, kk, rank_tol, tol)
    u = range_basis(kk, rank_tol)
    su = frame_operator(f) @ u
    v = range_basis(su, rank_tol)
    compressed = v.conj().T @ g @ v
    compressed = 0.5 * (compressed + compressed.conj().T)
    vals = np.linalg.eigvalsh(compressed)
    a = float(report.bounds.lower)
    b = float(report.bounds.upper)
    dagger = _pinv_norm(kk, rank_tol)
    lo_margin = float(vals[0]) - 1.0 / b
    hi_margin = dagger**2 / a - float(vals[-1])
    return min(lo_margin, hi_margin)


def subspace_cframe_margin(
    f: SampleField,
    k,
    rank_tol: float = DEFAULT_RANK_TOL,
    tol: float = DEFAULT_CHECK_TOL,
) -> float:
    """Worst slack of the frame inequality for f restricted to range(k).

    On unit h in range(k), <S_f h, h> must lie in
    [A / ||pinv(k)||^2, B]; computed exactly by compressing S_f to an
    orthonormal basis of range(k).
    """
    kk = as_operator(k)
    report = _require_ck_frame(f, kk, rank_tol, tol)
    u = range_basis(kk, rank_tol)
    compressed = u.conj().T @ frame_operator(f) @ u
    compressed = 0.5 * (compressed + compressed.conj().T)
    vals = np.linalg.eigvalsh(compressed)
    a = float(report.bounds.lower)
    b = float(report.bounds.upper)
    dagger = _pinv_norm(kk, rank_tol)
    return min(float(vals[0]) - a / dagger**2, b - float(vals[-1]))


# ---------------------------------------------------------------------------
# dual pairs


def _std_basis(n: int) -> np.ndarray:
    return np.eye(n, dtype=complex)


def verify_dual_pair(
    f: SampleField,
    g: SampleField,
    k,
    tol: float = DEFAULT_CHECK_TOL,
    rank_tol: float = DEFAULT_RANK_TOL,
    basis_h: Optional[np.ndarray] = None,
    basis_h0: Optional[np.ndarray] = None,
) -> DualPairReport:
    """Check the five equivalent identities that make (f, g) a dual pair
    for k, and report each residual separately.

    By linearity each identity holds for all vectors iff it holds on one
    orthonormal basis (pair); the default is the standard coordinate
    bases, and callers may supply any other orthonormal ``basis_h`` /
    ``basis_h0`` as columns.  Condition c5 always uses the standard
    bases.  When k (resp. k*) is surjective, the corresponding norm
    identity is evaluated as well; the adjoint-side identity is checked
    in squared form, which is the only scaling consistent with c4.
    """
    kk = as_operator(k)
    if f.space != g.space:
        raise SpaceMismatch("f and g must live over the same measure space")
    n, n0 = f.dim, g.dim
    if kk.shape != (n, n0):
        raise DimMismatch(f"k has shape {kk.shape}, expected {(n, n0)}")
    e = _std_basis(n) if basis_h is None else as_operator(basis_h)
    gamma = _std_basis(n0) if basis_h0 is None else as_operator(basis_h0)
    if e.shape != (n, n) or gamma.shape != (n0, n0):
        raise DimMismatch("basis matrices must be square of the ambient dims")

    w = f.space.weight_array
    scale = max(1.0, operator_norm(kk))

    # c1: k h0 = T_f <h0, g(.)>  on a basis of H0
    c1 = 0.0
    for j in range(n0):
        recon = synthesis(f, analysis(g, gamma[:, j]))
        c1 = max(c1, float(np.linalg.norm(kk @ gamma[:, j] - recon)) / scale)

    # c2: k* h = T_g <h, f(.)>  on a basis of H
    kh = adjoint(kk)
    c2 = 0.0
    for i in range(n):
        recon = synthesis(g, analysis(f, e[:, i]))
        c2 = max(c2, float(np.linalg.norm(kh @ e[:, i] - recon)) / scale)

    # c3: <k h0, h> = integral of <h0, g(x)> <f(x), h>
    cross = (f.samples.T * w) @ g.samples.conj()  # sum_x w_x f_x g_x^H
    d3 = e.conj().T @ (kk - cross) @ gamma
    c3 = float(np.max(np.abs(d3))) / scale if d3.size else 0.0

    # c4: <k* h, h0> = integral of <h, f(x)> <g(x), h0>
    cross_adj = (g.samples.T * w) @ f.samples.conj()  # sum_x w_x g_x f_x^H
    d4 = gamma.conj().T @ (kh - cross_adj) @ e
    c4 = float(np.max(np.abs(d4))) / scale if d4.size else 0.0

    # c5: the c4 identity pinned to standard coordinates
    d5 = kh - cross_adj
    c5 = float(np.max(np.abs(d5))) / scale if d5.size else 0.0

    holds = max(c1, c2, c3, c4, c5) <= tol

    # surjectivity-conditional norm identities
    sigma = np.linalg.svd(kk, compute_uv=False)
    rank = int(np.count_nonzero(sigma > rank_tol * sigma[0])) if sigma.size and sigma[0] > 0 else 0
    onto_k = rank == n
    onto_k_star = rank == n0
    notes: list[str] = []
    onto_res: Optional[tuple[Optional[float], Optional[float]]] = None
    if onto_k or onto_k_star:
        res_k: Optional[float] = None
        res_k_star: Optional[float] = None
        sq_scale = max(1.0, float(operator_norm(kk)) ** 2)
        if onto_k:
            r = 0.0
            for j in range(n0):
                h0 = gamma[:, j]
                kh0 = kk @ h0
                integral = complex(
                    np.sum(w * (g.samples.conj() @ h0) * (f.samples @ np.conj(kh0)))
                )
                r = max(r, abs(float(np.linalg.norm(kh0)) ** 2 - integral) / sq_scale)
            res_k = r
        if onto_k_star:
            r = 0.0
            for i in range(n):
                h = e[:, i]
                ksh = kh @ h
                integral = complex(
                    np.sum(w * (f.samples.conj() @ h) * (g.samples @ np.conj(ksh)))
                )
                r = max(r, abs(float(np.linalg.norm(ksh)) ** 2 - integral) / sq_scale)
            res_k_star = r
            notes.append(
                "adjoint-side norm identity verified in squared form ||k* h||^2; "
                "the unsquared form is dimensionally inconsistent with c4"
            )
        onto_res = (res_k, res_k_star)

    upper_f = float(hermitian_eig(frame_operator(f), tol).eigenvalues[-1])
    cert = 1.0 / upper_f if upper_f > 0.0 else float("inf")

    return DualPairReport(
        residual_c1=c1,
        residual_c2=c2,
        residual_c3=c3,
        residual_c4=c4,
        residual_c5=c5,
        holds=holds,
        onto_variant_residuals=onto_res,
        lower_bound_cert=cert,
        notes=tuple(notes),
    )


def canonical_dual(
    f: SampleField,
    k,
    rank_tol: float = DEFAULT_RANK_TOL,
    tol: float = DEFAULT_CHECK_TOL,
) -> CanonicalDual:
    """Construct the canonical dual of (f, k) and verify it.

    The dual is g = k* G f pointwise, where G inverts the compression
    of S_f to range(k); the projected frame is P f for P the orthogonal
    projector onto range(k).  The pair (P f, g) must verify as a dual
    pair for k, and the optimal bounds of g (as a frame against k*)
    must land inside [1/B - tol, ||k||^2 ||pinv(k)||^2 / A + tol].

    Raises CanonicalDualFailed if either verification fails; degenerate
    and non-frame inputs raise as in inverse_on_range.
    """
    kk = as_operator(k)
    report = _require_ck_frame(f, kk, rank_tol, tol)
    g_op = _compressed_inverse(f, kk, rank_tol)
    projector = range_projector(kk, rank_tol)
    projected = map_field(projector, f)
    dual = map_field(adjoint(kk) @ g_op, f)

    pair = verify_dual_pair(projected, dual, kk, tol, rank_tol)
    if not pair.holds:
        raise CanonicalDualFailed(
            f"constructed dual fails the pair identities (max residual "
            f"{pair.max_residual():.3e} > {tol:.1e})"
        )

    a = float(report.bounds.lower)
    b = float(report.bounds.upper)
    k_norm = operator_norm(kk)
    dagger = _pinv_norm(kk, rank_tol)
    lower_bound = 1.0 / b
    upper_bound = (k_norm**2) * (dagger**2) / a

    s_dual = frame_operator(dual)
    best_lower = max_psd_multiplier(s_dual, adjoint(kk) @ kk, rank_tol, tol)
    best_upper = float(hermitian_eig(s_dual, tol).eigenvalues[-1])
    if isinstance(best_lower, Unbounded) or best_lower < lower_bound - tol:
        raise CanonicalDualFailed(
            f"dual lower bound {best_lower!r} under the certified {lower_bound:.6e}"
        )
    if best_upper > upper_bound + tol:
        raise CanonicalDualFailed(
            f"dual upper bound {best_upper:.6e} over the certified {upper_bound:.6e}"
        )

    return CanonicalDual(
        projected_frame=projected,
        dual_field=dual,
        lower_bound=lower_bound,
        upper_bound=upper_bound,
    )


def dual_frame_bounds_check(
    f: SampleField,
    g: SampleField,
    k,
    tol: float = DEFAULT_CHECK_TOL,
    rank_tol: float = DEFAULT_RANK_TOL,
) -> tuple[float, float]:
    """Margins of the reciprocal lower bounds enjoyed by a dual pair.

    For a verified pair, g satisfies the lower frame inequality against
    k with constant 1/B_f, and f the mirrored one against k* with
    constant 1/B_g (B_* the Bessel bounds).  Returns (margin_f,
    margin_g), the smallest eigenvalues of the two defect forms; both
    must be >= -tol for a genuine pair.

    Raises NotADualPair when the pair identities fail or a field is
    identically zero.
    """
    kk = as_operator(k)
    pair = verify_dual_pair(f, g, kk, tol, rank_tol)
    if not pair.holds:
        raise NotADualPair(
            f"pair identities fail (max residual {pair.max_residual():.3e})"
        )
    s_f = frame_operator(f)
    s_g = frame_operator(g)
    b_f = float(hermitian_eig(s_f, tol).eigenvalues[-1])
    b_g = float(hermitian_eig(s_g, tol).eigenvalues[-1])
    if b_f <= 0.0 or b_g <= 0.0:
        raise NotADualPair("a zero field cannot certify reciprocal bounds")
    defect_f = s_f - (kk @ adjoint(kk)) / b_g
    defect_g = s_g - (adjoint(kk) @ kk) / b_f
    margin_f = float(np.linalg.eigvalsh(0.5 * (defect_f + defect_f.conj().T))[0])
    margin_g = float(np.linalg.eigvalsh(0.5 * (defect_g + defect_g.conj().T))[0])
    return margin_f, margin_g
