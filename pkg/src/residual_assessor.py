"""
Residual assessment: turns the raw output of one check into the numbers
that end up in a report record.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

from src import coefficients as cf
from src.ring import SeriesElement


@dataclass
class CheckOutcome:
    """What a check hands back.

    `residuals` must vanish through `required_order` (default: every reliable
    coefficient). `discrepancies` are plain scalars that must be zero (exact)
    or within tolerance (float). `expect_nonzero` flips the verdict for
    negative controls. `verdict` is an extra boolean condition (alphas equal,
    polynomial identity, ...).
    """

    residuals: List[SeriesElement] = field(default_factory=list)
    required_order: Optional[int] = None
    discrepancies: List[Any] = field(default_factory=list)
    discrepancy_tol: Optional[float] = None
    expect_nonzero: bool = False
    verdict: Optional[bool] = None
    details: Dict[str, Any] = field(default_factory=dict)


class ResidualAssessor:
    """Computes vanishing order, per-order maxima and the pass verdict."""

    def __init__(self, logger, ctx: Optional[cf.RingContext] = None):
        """Initialize residual assessor."""
        self.logger = logger
        self.ctx = ctx or cf.get_context()

    def assess(self, outcome: CheckOutcome) -> Dict[str, Any]:
        """Summarize a CheckOutcome as report fields."""
        by_order = self._max_by_order(outcome.residuals)
        reliable = min((r.order for r in outcome.residuals), default=None)
        vanishing = min((r.vanishing_order(self.ctx) for r in outcome.residuals), default=None)
        first_nonzero = self._first_nonzero(outcome.residuals, vanishing)

        scalar_max = self._max_scalar(outcome.discrepancies)
        scalars_zero = self._scalars_vanish(outcome.discrepancies, outcome.discrepancy_tol)

        if outcome.residuals:
            required = reliable + 1 if outcome.required_order is None else outcome.required_order
            series_zero = vanishing >= required
        else:
            series_zero = True

        everything_zero = series_zero and scalars_zero
        passed = (not everything_zero) if outcome.expect_nonzero else everything_zero
        if outcome.verdict is not None:
            passed = passed and outcome.verdict

        overall_max = self._max_scalar(list(by_order) + ([scalar_max] if outcome.discrepancies else []))
        return {
            "vanishing_order": vanishing,
            "max_residual": cf.format_scalar(overall_max),
            "pass": bool(passed),
            "reliable_order": reliable,
            "residual_by_order": [cf.format_scalar(m) for m in by_order],
            "first_nonzero": first_nonzero,
        }

    def _max_by_order(self, residuals: Sequence[SeriesElement]) -> List[Any]:
        """Entry-wise maximum magnitude per power of t across all residuals."""
        if not residuals:
            return []
        length = max(len(r.coeffs) for r in residuals)
        out = []
        for k in range(length):
            values = [cf.max_abs(r.coefficient(k)) for r in residuals if k < len(r.coeffs)]
            out.append(max(values))
        return out

    def _first_nonzero(self, residuals: Sequence[SeriesElement], vanishing: Optional[int]) -> Optional[Dict[str, Any]]:
        if not residuals:
            return None
        for index, r in enumerate(residuals):
            if vanishing < len(r.coeffs) and r.vanishing_order(self.ctx) == vanishing:
                return {
                    "order": vanishing,
                    "residual_index": index,
                    "max_abs": cf.format_scalar(cf.max_abs(r.coefficient(vanishing))),
                }
        return None

    def _max_scalar(self, values: Sequence[Any]) -> Any:
        values = [abs(v) for v in values]
        if not values:
            return Fraction(0) if self.ctx.exact else 0.0
        return max(values)

    def _scalars_vanish(self, values: Sequence[Any], tol: Optional[float]) -> bool:
        if not values:
            return True
        limit = self.ctx.tol if tol is None else tol
        return all(v == 0 if not isinstance(v, float) else abs(v) <= limit for v in values)
