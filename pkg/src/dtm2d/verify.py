"""Float-side evaluation of truncated series and error measurement.

Everything here projects exact spectra to floats: series evaluation with a
fixed Horner summation order (so error reports are reproducible), boundary
and closed-form residuals, and exact spectrum comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING

from .rules import dt_derivative
from .spectrum import DtmError, Spectrum2D
from .taylor import trace_value

if TYPE_CHECKING:  # runtime import would be circular; solver imports verify
    from .solver import BoundarySpec

REFERENCE_FORMS = (
    "sinh(x)*cos(y)",
    "cosh(x)*sin(y)",
    "cos(2x)*cosh(2y)",
    "cos(x)*sinh(y)",
)

__all__ = [
    "GridSpec",
    "REFERENCE_FORMS",
    "ReferenceSolution",
    "boundary_residual",
    "compare_closed_form",
    "eval2d",
    "spectrum_diff",
]


@dataclass(frozen=True)
class GridSpec:
    """Evaluation grid inside the closed square [0, pi] x [0, pi]."""

    x_points: tuple[float, ...]
    y_points: tuple[float, ...]

    def __post_init__(self) -> None:
        for name, pts in (("x_points", self.x_points), ("y_points", self.y_points)):
            if not pts:
                raise DtmError(f"{name} must be nonempty")
            if any(p < 0 or p > math.pi for p in pts):
                raise DtmError(f"{name} must lie within [0, pi]")
        object.__setattr__(self, "x_points", tuple(float(p) for p in self.x_points))
        object.__setattr__(self, "y_points", tuple(float(p) for p in self.y_points))

    @classmethod
    def uniform(cls, k: int) -> "GridSpec":
        """k x k uniform grid including the endpoints."""
        if k < 2:
            raise DtmError(f"uniform grid needs k >= 2, got {k}")
        pts = tuple(i * math.pi / (k - 1) for i in range(k))
        return cls(pts, pts)


@dataclass(frozen=True)
class ReferenceSolution:
    """One of the four known closed-form solutions, as an evaluator."""

    descriptor: str

    def __post_init__(self) -> None:
        if self.descriptor not in REFERENCE_FORMS:
            raise DtmError(
                f"unknown reference {self.descriptor!r}; expected one of "
                f"{REFERENCE_FORMS}"
            )

    def __call__(self, x: float, y: float) -> float:
        if self.descriptor == "sinh(x)*cos(y)":
            return math.sinh(x) * math.cos(y)
        if self.descriptor == "cosh(x)*sin(y)":
            return math.cosh(x) * math.sin(y)
        if self.descriptor == "cos(2x)*cosh(2y)":
            return math.cos(2 * x) * math.cosh(2 * y)
        return math.cos(x) * math.sinh(y)


def eval2d(s: Spectrum2D, x: float, y: float) -> float:
    """Evaluate the truncated double series at (x, y) in float arithmetic.

    Summation order is fixed: Horner over n within each row, then Horner
    over m across rows, so repeated runs give bit-identical values.
    """
    dx = x - float(s.origin[0])
    dy = y - float(s.origin[1])
    rows: list[list[float]] = [
        [0.0] * (s.order - m + 1) for m in range(s.order + 1)
    ]
    for (m, n), c in s.entries.items():
        rows[m][n] = float(c)
    total = 0.0
    for m in range(s.order, -1, -1):
        row = 0.0
        for coeff in reversed(rows[m]):
            row = row * dy + coeff
        total = total * dx + row
    return total


_EDGE_POINTS = {
    "x=0": lambda t: (0.0, t),
    "x=pi": lambda t: (math.pi, t),
    "y=0": lambda t: (t, 0.0),
    "y=pi": lambda t: (t, math.pi),
}


def boundary_residual(
    s: Spectrum2D, bc: "BoundarySpec", samples: int
) -> dict[str, float]:
    """Per-edge max-abs deviation of the series from the boundary traces.

    Dirichlet edges compare the series itself; Neumann edges differentiate
    the spectrum first (exact rule, no finite differencing) and compare the
    coordinate derivative.  ``samples`` equally spaced points per edge,
    endpoints included.
    """
    if samples < 2:
        raise DtmError(f"need at least 2 samples per edge, got {samples}")
    ts = [i * math.pi / (samples - 1) for i in range(samples)]
    out: dict[str, float] = {}
    for cond in bc.conditions:
        if cond.kind == "dirichlet":
            series = s
        elif s.order == 0:
            series = Spectrum2D(0, s.origin, {})  # derivative of a constant
        elif cond.edge.startswith("x"):
            series = dt_derivative(s, 1, 0)
        else:
            series = dt_derivative(s, 0, 1)
        at = _EDGE_POINTS[cond.edge]
        worst = 0.0
        for t in ts:
            x, y = at(t)
            worst = max(worst, abs(eval2d(series, x, y) - trace_value(cond.trace, t)))
        out[cond.edge] = worst
    return out


def compare_closed_form(
    s: Spectrum2D, ref: ReferenceSolution, grid: GridSpec
) -> float:
    """Max-abs error of the truncated series against the closed form."""
    worst = 0.0
    for x in grid.x_points:
        for y in grid.y_points:
            worst = max(worst, abs(eval2d(s, x, y) - ref(x, y)))
    return worst


def spectrum_diff(
    u: Spectrum2D, v: Spectrum2D
) -> tuple[Fraction, list[tuple[int, int]]]:
    """Exact entrywise comparison over the union of supports.

    Returns (max-abs rational difference, sorted differing keys).
    """
    if u.order != v.order:
        raise DtmError(f"order mismatch: {u.order} vs {v.order}")
    keys = set(u.entries) | set(v.entries)
    worst = Fraction(0)
    differing: list[tuple[int, int]] = []
    for key in sorted(keys):
        delta = u.entries.get(key, Fraction(0)) - v.entries.get(key, Fraction(0))
        if delta != 0:
            differing.append(key)
            worst = max(worst, abs(delta))
    return worst, differing
