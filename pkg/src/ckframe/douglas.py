"""Range inclusion, majorization, and factorization for operator pairs.

For bounded L1, L2 into a common space, three statements are equivalent:
range(L1) is contained in range(L2); L1 L1* <= lam * L2 L2* for some
lam >= 0; and L1 = L2 X for some bounded X.  The functions here decide the
inclusion numerically, produce the minimal-norm factor, and compute the
least admissible multiplier, all with the same rank conventions so the
three answers agree away from tolerance hairlines.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimMismatch
from .linalg import (
    DEFAULT_CHECK_TOL,
    DEFAULT_RANK_TOL,
    GRAY_ZONE_FACTOR,
    OperatorMatrix,
    Unbounded,
    adjoint,
    as_operator,
    max_psd_multiplier,
    operator_norm,
    pseudoinverse,
    range_projector,
)


@dataclass(frozen=True)
class DouglasResult:
    """Outcome of a factorization attempt.

    factor and lambda_min are present exactly when included is True.
    residual is min over X of ||L1 - L2 X|| / max(1, ||L1||), i.e. the
    relative distance of L1 from the achievable range; for an included
    pair it equals the factorization residual.  marginal flags inclusion
    residuals that fail but sit within 100x of the tolerance.
    """

    included: bool
    factor: Optional[OperatorMatrix]
    lambda_min: Optional[float]
    residual: float
    marginal: bool = False


def _checked_pair(l1, l2) -> tuple[OperatorMatrix, OperatorMatrix]:
    a = as_operator(l1)
    b = as_operator(l2)
    if a.shape[0] != b.shape[0]:
        raise DimMismatch(
            f"operators map into different spaces: {a.shape[0]} vs {b.shape[0]} rows"
        )
    return a, b


def _inclusion_residual(l1: OperatorMatrix, l2: OperatorMatrix, rank_tol: float) -> float:
    """min_X ||l1 - l2 X|| / max(1, ||l1||), via the range projector of l2."""
    proj = range_projector(l2, rank_tol)
    eye = np.eye(l1.shape[0])
    return operator_norm((eye - proj) @ l1) / max(1.0, operator_norm(l1))


def range_included(
    l1,
    l2,
    rank_tol: float = DEFAULT_RANK_TOL,
    tol: float = DEFAULT_CHECK_TOL,
) -> bool:
    """True iff range(l1) sits inside range(l2) at the given tolerance."""
    a, b = _checked_pair(l1, l2)
    return _inclusion_residual(a, b, rank_tol) <= tol


def minimal_multiplier(
    l1,
    l2,
    rank_tol: float = DEFAULT_RANK_TOL,
    tol: float = DEFAULT_CHECK_TOL,
) -> Optional[float]:
    """Least lam >= 0 with l1 l1* <= lam * l2 l2*, or None if none exists.

    Equals 1 / max_psd_multiplier(l2 l2*, l1 l1*) whenever both values are
    finite and nonzero; l1 = 0 gives 0.0.
    """
    a, b = _checked_pair(l1, l2)
    if _inclusion_residual(a, b, rank_tol) > tol:
        return None
    if operator_norm(a) == 0.0:
        return 0.0
    inv = max_psd_multiplier(b @ adjoint(b), a @ adjoint(a), rank_tol, tol)
    if isinstance(inv, Unbounded) or inv <= 0.0:
        # inclusion passed but the quadratic-form comparison degenerated;
        # only reachable on hairline inputs
        return None
    return 1.0 / inv


def douglas_factor(
    l1,
    l2,
    rank_tol: float = DEFAULT_RANK_TOL,
    tol: float = DEFAULT_CHECK_TOL,
) -> DouglasResult:
    """Factor l1 through l2 when possible.

    On inclusion, factor is the minimal-norm X = pinv(l2) l1 and lambda_min
    the least admissible majorization multiplier.  Otherwise both are None
    and the result records how far l1 is from range(l2).
    """
    a, b = _checked_pair(l1, l2)
    residual = _inclusion_residual(a, b, rank_tol)
    if residual > tol:
        return DouglasResult(
            included=False,
            factor=None,
            lambda_min=None,
            residual=residual,
            marginal=residual < GRAY_ZONE_FACTOR * tol,
        )
    factor = pseudoinverse(b, rank_tol) @ a
    lam = minimal_multiplier(a, b, rank_tol, tol)
    return DouglasResult(included=True, factor=factor, lambda_min=lam, residual=residual)
