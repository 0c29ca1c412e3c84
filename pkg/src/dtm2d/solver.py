"""Laplace boundary-value problems as spectral Cauchy problems.

Transforming u_xx + u_yy = 0 turns the coefficient table into the recurrence

    (m+1)(m+2) U(m+2, n) + (n+1)(n+2) U(m, n+2) = 0,

so two consecutive seed rows (or columns) determine the whole triangle.  One
seed layer comes from the edge at the marching origin; the other is inferred
from the boundary condition on the opposite edge.  Inference has two routes:

* an exact route that matches the closure identity degree-by-degree in pi,
  treating pi as an indeterminate.  The unknown layer's terms always carry
  the opposite pi-parity from the known layer's, so the unknown block is an
  exact triangular system over the rationals.  Redundant equations are
  checked exactly; leftover indices (e.g. the additive constant of an
  all-Neumann problem) are reported as undetermined.
* a float route that collapses the pi powers numerically and back-substitutes
  per degree, then snaps the solved layer to nearby small rationals.  This is
  only well-conditioned when the closure trace carries no transcendental
  amplitude; the exact route covers those cases.

Both routes report the max-abs per-degree mismatch of the closure match as a
residual; solve_model runs the inference at an elevated working order so the
closure series are resolved well below the residual tolerances.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Optional

from .rules import dt_add, dt_derivative
from .spectrum import CoeffLike, DtmError, Spectrum2D, as_coeff, truncate
from .taylor import FuncSpec, sym_amp_series_coeff, sym_amp_value, taylor_coeffs

EDGES = ("x=0", "x=pi", "y=0", "y=pi")
BC_KINDS = ("dirichlet", "neumann")

MARCH_IN_N = "march-in-n"  # seed rows n = 0, 1; closure edge y = pi
MARCH_IN_M = "march-in-m"  # seed columns m = 0, 1; closure edge x = pi

# Working order floor for solve_model's seed inference: the catalog closure
# series have argument scales up to 2, and (2*pi)**45 / 45! ~ 7e-21 keeps the
# per-degree residual far below the warning threshold.
MIN_WORKING_ORDER = 44

RESIDUAL_ERROR = 1e-6
RESIDUAL_WARN = 1e-9
SNAP_TOL = 1e-9
SNAP_DENOM_ENV = "DTM_SEED_SNAP_DENOM"
DEFAULT_SNAP_DENOM = 10**6

__all__ = [
    "BC_KINDS",
    "BoundarySpec",
    "CauchySeed",
    "EDGES",
    "EdgeCondition",
    "InferenceError",
    "InferredLayer",
    "MARCH_IN_M",
    "MARCH_IN_N",
    "Model",
    "ModelReport",
    "infer_missing_seed",
    "model_catalog",
    "propagate",
    "propagate_closed_form",
    "residual_laplacian",
    "solve_example",
    "solve_model",
]


class InferenceError(DtmError):
    """Closure condition cannot be met within tolerance."""


@dataclass(frozen=True)
class EdgeCondition:
    """One boundary condition: value or normal-derivative trace on an edge."""

    edge: str
    kind: str
    trace: FuncSpec

    def __post_init__(self) -> None:
        if self.edge not in EDGES:
            raise DtmError(f"unknown edge {self.edge!r}; expected one of {EDGES}")
        if self.kind not in BC_KINDS:
            raise DtmError(f"unknown condition kind {self.kind!r}")


@dataclass(frozen=True)
class BoundarySpec:
    """Exactly four conditions, one per edge of (0, pi) x (0, pi)."""

    conditions: tuple[EdgeCondition, ...]

    def __post_init__(self) -> None:
        edges = [c.edge for c in self.conditions]
        if sorted(edges) != sorted(EDGES):
            raise DtmError(
                f"need exactly one condition per edge {EDGES}, got {edges}"
            )

    def on(self, edge: str) -> EdgeCondition:
        for c in self.conditions:
            if c.edge == edge:
                return c
        raise DtmError(f"unknown edge {edge!r}")


@dataclass(frozen=True)
class CauchySeed:
    """Two seed layers along the marching origin.

    For march-in-n, layer0[m] = U(m, 0) and layer1[m] = U(m, 1); for
    march-in-m, layer0[n] = U(0, n) and layer1[n] = U(1, n).  Both layers
    have length order + 1; the last layer1 entry lies outside the triangle
    and is ignored by propagation.
    """

    axis: str
    order: int
    layer0: tuple[Fraction, ...]
    layer1: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if self.axis not in (MARCH_IN_N, MARCH_IN_M):
            raise DtmError(f"unknown marching axis {self.axis!r}")
        if self.order < 0:
            raise DtmError(f"order must be non-negative, got {self.order}")
        for name, layer in (("layer0", self.layer0), ("layer1", self.layer1)):
            if len(layer) != self.order + 1:
                raise DtmError(
                    f"{name} must have length {self.order + 1}, got {len(layer)}"
                )
        object.__setattr__(self, "layer0", tuple(as_coeff(c) for c in self.layer0))
        object.__setattr__(self, "layer1", tuple(as_coeff(c) for c in self.layer1))


def _transpose(s: Spectrum2D) -> Spectrum2D:
    swapped = {(n, m): v for (m, n), v in s.entries.items()}
    return Spectrum2D(s.order, (s.origin[1], s.origin[0]), swapped)


def propagate(seed: CauchySeed) -> Spectrum2D:
    """March the Laplace recurrence from the seed layers to the full triangle.

    Marching in n fills U(m, n+2) = -[(m+1)(m+2) / ((n+1)(n+2))] U(m+2, n);
    marching in m is the transposed computation.
    """
    n_order = seed.order
    table: dict[tuple[int, int], Fraction] = {}
    for m in range(n_order + 1):
        if seed.layer0[m] != 0:
            table[(m, 0)] = seed.layer0[m]
        if m + 1 <= n_order and seed.layer1[m] != 0:
            table[(m, 1)] = seed.layer1[m]
    for n in range(n_order - 1):
        for m in range(n_order - n - 1):
            prev = table.get((m + 2, n))
            if prev is not None:
                table[(m, n + 2)] = -Fraction((m + 1) * (m + 2), (n + 1) * (n + 2)) * prev
    result = Spectrum2D(n_order, (Fraction(0), Fraction(0)), table)
    return _transpose(result) if seed.axis == MARCH_IN_M else result


def _even_transfer(m: int, k: int) -> Fraction:
    """Seed-to-entry factor: U(m, 2k) = _even_transfer(m, k) * layer0[m + 2k]."""
    return Fraction(
        (-1) ** k * math.factorial(m + 2 * k),
        math.factorial(m) * math.factorial(2 * k),
    )


def _odd_transfer(m: int, k: int) -> Fraction:
    """U(m, 2k+1) = _odd_transfer(m, k) * layer1[m + 2k]."""
    return Fraction(
        (-1) ** k * math.factorial(m + 2 * k),
        math.factorial(m) * math.factorial(2 * k + 1),
    )


def propagate_closed_form(seed: CauchySeed, m: int, n: int) -> Fraction:
    """Entry (m, n) directly from the iterated recurrence's closed form.

    Must agree entrywise with :func:`propagate`; kept independent of it so
    each checks the other.
    """
    if m < 0 or n < 0:
        raise DtmError(f"negative index ({m},{n})")
    if m + n > seed.order:
        raise DtmError(f"index ({m},{n}) exceeds order {seed.order}")
    if seed.axis == MARCH_IN_M:
        m, n = n, m
    if n % 2 == 0:
        return _even_transfer(m, n // 2) * seed.layer0[m + n]
    return _odd_transfer(m, (n - 1) // 2) * seed.layer1[m + n - 1]


def residual_laplacian(s: Spectrum2D) -> Spectrum2D:
    """Spectrum of u_xx + u_yy; empty exactly when s satisfies the recurrence."""
    if s.order < 2:
        raise DtmError(f"need order >= 2 to form the Laplacian, got {s.order}")
    return dt_add(dt_derivative(s, 2, 0), dt_derivative(s, 0, 2))


# --------------------------------------------------------------------------
# Seed inference
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class InferredLayer:
    """Result of closing the Cauchy problem against the opposite edge."""

    coeffs: tuple[Fraction, ...]
    method: str                      # "exact" or "float"
    residual: float                  # max-abs per-degree closure mismatch
    warning: Optional[str] = None
    undetermined: tuple[int, ...] = ()
    pre_snap: Optional[tuple[float, ...]] = None


def _layer_match_terms(m: int, layer_index: int, closure_kind: str, order: int):
    """Closure-match terms of one seed layer at x-degree m.

    Yields (j, rational coefficient, pi power) per spectrum entry involved:
    Dirichlet matches sum_n U(m, n) pi**n, Neumann sum_n n U(m, n) pi**(n-1).
    """
    k = 0
    while True:
        j = m + 2 * k
        n = 2 * k + layer_index
        if m + n > order:
            return
        if layer_index == 0:
            if closure_kind == "dirichlet":
                yield j, _even_transfer(m, k), 2 * k
            elif k >= 1:
                yield j, 2 * k * _even_transfer(m, k), 2 * k - 1
        else:
            if closure_kind == "dirichlet":
                yield j, _odd_transfer(m, k), 2 * k + 1
            else:
                yield j, (2 * k + 1) * _odd_transfer(m, k), 2 * k
        k += 1


def _closure_targets(trace: FuncSpec, order: int):
    """Per-term exact trace coefficients with their amplitude tokens."""
    parts = []
    for term in trace.flat_terms():
        rational = replace(term, sym_amp="none")
        parts.append((taylor_coeffs(rational, order), term.sym_amp))
    return parts


def _match_residual(
    layer0: Iterable[Fraction],
    layer1: Iterable[Fraction],
    closure_kind: str,
    targets,
    order: int,
) -> float:
    """Max-abs float mismatch of the per-degree closure match, all degrees."""
    pi = math.pi
    layer0 = list(layer0)
    layer1 = list(layer1)
    worst = 0.0
    for m in range(order + 1):
        lhs = 0.0
        for j, coef, power in _layer_match_terms(m, 0, closure_kind, order):
            if layer0[j]:
                lhs += float(coef) * pi**power * float(layer0[j])
        for j, coef, power in _layer_match_terms(m, 1, closure_kind, order):
            if layer1[j]:
                lhs += float(coef) * pi**power * float(layer1[j])
        rhs = sum(float(q[m]) * sym_amp_value(token) for q, token in targets)
        worst = max(worst, abs(lhs - rhs))
    return worst


def _infer_exact(known, known_index, closure_kind, targets, order):
    """Match the unknown layer's pi-parity block degree-by-degree, exactly.

    Returns (coeffs, undetermined, inconsistency) where inconsistency is the
    max-abs violation among redundant equations (0.0 when fully consistent).
    The unknown and known layers always occupy opposite pi parities, so the
    known layer never enters these equations.
    """
    unknown_index = 1 - known_index
    values: list[Optional[Fraction]] = [None] * (order + 1)
    inconsistency = 0.0
    for m in range(order, -1, -1):
        for j, coef, power in _layer_match_terms(m, unknown_index, closure_kind, order):
            rhs = Fraction(0)
            for q, token in targets:
                s = sym_amp_series_coeff(token, power)
                if s != 0:
                    rhs += q[m] * s
            if values[j] is None:
                values[j] = rhs / coef
            elif coef * values[j] != rhs:
                inconsistency = max(inconsistency, abs(float(coef * values[j] - rhs)))
    undetermined = tuple(j for j in range(order + 1) if values[j] is None)
    coeffs = tuple(v if v is not None else Fraction(0) for v in values)
    return coeffs, undetermined, inconsistency


def _snap(value: float, denom_bound: int) -> Fraction:
    """Nearest small-denominator rational within tolerance, else the exact float."""
    if abs(value) <= SNAP_TOL:
        return Fraction(0)
    candidate = Fraction(value).limit_denominator(denom_bound)
    if abs(float(candidate) - value) <= SNAP_TOL:
        return candidate
    return Fraction(value)


def _infer_float(known, known_index, closure_kind, targets, order, denom_bound):
    """Back-substitute the collapsed per-degree equations, then rationalize."""
    pi = math.pi
    unknown_index = 1 - known_index
    known_f = [float(c) for c in known]
    target_f = [
        sum(float(q[m]) * sym_amp_value(token) for q, token in targets)
        for m in range(order + 1)
    ]
    raw: list[Optional[float]] = [None] * (order + 1)
    for m in range(order, -1, -1):
        lead: Optional[tuple[int, float]] = None
        rhs = target_f[m]
        for j, coef, power in _layer_match_terms(m, known_index, closure_kind, order):
            rhs -= float(coef) * pi**power * known_f[j]
        for j, coef, power in _layer_match_terms(m, unknown_index, closure_kind, order):
            if lead is None:
                lead = (j, float(coef) * pi**power)
            else:
                solved = raw[j]
                rhs -= float(coef) * pi**power * (solved if solved is not None else 0.0)
        if lead is not None and raw[lead[0]] is None:
            raw[lead[0]] = rhs / lead[1]
    undetermined = tuple(j for j in range(order + 1) if raw[j] is None)
    pre_snap = tuple(0.0 if v is None else v for v in raw)
    coeffs = tuple(_snap(v, denom_bound) for v in pre_snap)
    return coeffs, undetermined, pre_snap


def infer_missing_seed(
    known_layer: Iterable[CoeffLike],
    known_layer_index: int,
    axis: str,
    closure_edge: EdgeCondition,
    order: int,
    *,
    method: str = "auto",
    snap_denom: Optional[int] = None,
) -> InferredLayer:
    """Find the seed layer that makes the propagated series meet the far edge.

    ``closure_edge`` must lie opposite the marching origin (y=pi for
    march-in-n, x=pi for march-in-m).  Indices the closure cannot see are
    returned as zero and listed in ``undetermined``; the caller decides what
    to pin there (the additive constant of an all-Neumann problem).
    """
    if known_layer_index not in (0, 1):
        raise DtmError(f"known_layer_index must be 0 or 1, got {known_layer_index}")
    if axis not in (MARCH_IN_N, MARCH_IN_M):
        raise DtmError(f"unknown marching axis {axis!r}")
    expected_edge = "y=pi" if axis == MARCH_IN_N else "x=pi"
    if closure_edge.edge != expected_edge:
        raise DtmError(
            f"closure edge must be {expected_edge} for {axis}, got {closure_edge.edge}"
        )
    if method not in ("auto", "exact", "float"):
        raise DtmError(f"unknown inference method {method!r}")
    known = [as_coeff(c) for c in known_layer]
    if len(known) != order + 1:
        raise DtmError(f"known layer must have length {order + 1}, got {len(known)}")
    if snap_denom is None:
        snap_denom = int(os.environ.get(SNAP_DENOM_ENV, DEFAULT_SNAP_DENOM))

    targets = _closure_targets(closure_edge.trace, order)
    kind = closure_edge.kind

    def measure(coeffs) -> float:
        pair = (coeffs, known) if known_layer_index == 1 else (known, coeffs)
        return _match_residual(pair[0], pair[1], kind, targets, order)

    def finish(coeffs, used, residual, undetermined, pre_snap=None) -> InferredLayer:
        if residual > RESIDUAL_ERROR:
            raise InferenceError(
                f"closure condition on {closure_edge.edge} inconsistent: "
                f"per-degree residual {residual:.3e} exceeds {RESIDUAL_ERROR:.0e} "
                f"(method={used}, order={order}); raise the order or fix the data"
            )
        warning = None
        if residual > RESIDUAL_WARN:
            warning = f"closure residual {residual:.3e} above {RESIDUAL_WARN:.0e}"
        return InferredLayer(coeffs, used, residual, warning, undetermined, pre_snap)

    exact_result = None
    if method in ("auto", "exact"):
        coeffs, undetermined, inconsistency = _infer_exact(
            known, known_layer_index, kind, targets, order
        )
        if method == "exact":
            if inconsistency > 0.0:
                raise InferenceError(
                    f"exact parity matching inconsistent (max violation "
                    f"{inconsistency:.3e}); closure data does not factor through "
                    f"the pi-degree identity"
                )
            return finish(coeffs, "exact", measure(coeffs), undetermined)
        if inconsistency == 0.0:
            residual = measure(coeffs)
            if residual <= RESIDUAL_WARN:
                return finish(coeffs, "exact", residual, undetermined)
            exact_result = (coeffs, residual, undetermined)

    coeffs, undetermined, pre_snap = _infer_float(
        known, known_layer_index, kind, targets, order, snap_denom
    )
    residual = measure(coeffs)
    if exact_result is not None and exact_result[1] < residual:
        coeffs, residual, undetermined = exact_result
        return finish(coeffs, "exact", residual, undetermined)
    return finish(coeffs, "float", residual, undetermined, pre_snap)


# --------------------------------------------------------------------------
# Model assembly
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ModelReport:
    """Solved spectrum plus the residual evidence for one model run."""

    model: str
    order: int
    spectrum: Spectrum2D
    pde_residual_spectrum: Spectrum2D
    boundary_residuals: dict[str, float]
    closed_form_error: Optional[float]
    inference_method: str
    inference_residual: float
    warning: Optional[str]
    working_order: int
    size: int

    @property
    def pde_residual_is_zero(self) -> bool:
        return self.pde_residual_spectrum.is_zero()


@dataclass(frozen=True)
class Model:
    """A catalog entry: boundary data plus its known closed-form solution."""

    model_id: str
    bc: BoundarySpec
    reference: Optional[str]
    default_order: int
    origin_value: Fraction = field(default_factory=lambda: Fraction(0))


def _choose_axis(bc: BoundarySpec) -> str:
    """March along whichever axis carries nonzero seed data, preferring n."""
    if not bc.on("y=0").trace.is_zero():
        return MARCH_IN_N
    if not bc.on("x=0").trace.is_zero():
        return MARCH_IN_M
    if not bc.on("y=pi").trace.is_zero():
        return MARCH_IN_N
    return MARCH_IN_M


def solve_model(
    bc: BoundarySpec,
    order: int,
    *,
    model_id: str = "custom",
    origin_value: CoeffLike = 0,
    reference: Optional[str] = None,
    grid=None,
    boundary_samples: int = 41,
    method: str = "auto",
    snap_denom: Optional[int] = None,
) -> ModelReport:
    """Seed, infer, propagate and verify one boundary-value model.

    The seed edge (y=0 or x=0, by marching axis) must have an exact trace;
    the opposite edge closes the problem through :func:`infer_missing_seed`.
    ``origin_value`` pins u at the expansion origin when the closure leaves
    that entry undetermined (the additive constant of all-Neumann data).
    Inference runs at a working order of at least MIN_WORKING_ORDER so that
    closure series are resolved; the result is truncated back to ``order``.
    """
    from . import verify  # local import: verify depends on solver types

    if order < 0:
        raise DtmError(f"order must be non-negative, got {order}")
    axis = _choose_axis(bc)
    seed_edge = "y=0" if axis == MARCH_IN_N else "x=0"
    closure_edge = "y=pi" if axis == MARCH_IN_N else "x=pi"
    seed_cond = bc.on(seed_edge)
    known_index = 0 if seed_cond.kind == "dirichlet" else 1

    working = max(order, MIN_WORKING_ORDER)
    try:
        known = taylor_coeffs(seed_cond.trace, working)
    except DtmError as exc:
        raise DtmError(
            f"seed edge {seed_edge} must have an exact trace: {exc}"
        ) from exc

    inferred = infer_missing_seed(
        known,
        known_index,
        axis,
        bc.on(closure_edge),
        working,
        method=method,
        snap_denom=snap_denom,
    )
    unknown = list(inferred.coeffs)
    origin_value = as_coeff(origin_value)
    if origin_value != 0:
        if known_index == 1 and 0 in inferred.undetermined:
            unknown[0] = origin_value
        else:
            raise DtmError(
                "origin_value can only pin an entry the closure left "
                "undetermined (all-Neumann data with an unknown layer0)"
            )

    layers = (known, unknown) if known_index == 0 else (unknown, known)
    seed = CauchySeed(axis, working, tuple(layers[0]), tuple(layers[1]))
    full = propagate(seed)
    spectrum = truncate(full, order)

    if order >= 2:
        pde_residual = residual_laplacian(spectrum)
    else:
        pde_residual = Spectrum2D(0, (Fraction(0), Fraction(0)), {})
    residuals = verify.boundary_residual(spectrum, bc, boundary_samples)
    closed_form = None
    if reference is not None:
        closed_form = verify.compare_closed_form(
            spectrum, verify.ReferenceSolution(reference), grid or verify.GridSpec.uniform(21)
        )
    return ModelReport(
        model=model_id,
        order=order,
        spectrum=spectrum,
        pde_residual_spectrum=pde_residual,
        boundary_residuals=residuals,
        closed_form_error=closed_form,
        inference_method=inferred.method,
        inference_residual=inferred.residual,
        warning=inferred.warning,
        working_order=working,
        size=len(spectrum.entries),
    )


def _dirichlet(edge: str, trace: FuncSpec) -> EdgeCondition:
    return EdgeCondition(edge, "dirichlet", trace)


def _neumann(edge: str, trace: FuncSpec) -> EdgeCondition:
    return EdgeCondition(edge, "neumann", trace)


_ZERO = FuncSpec(kind="zero")


def model_catalog() -> dict[str, Model]:
    """The four built-in boundary-value models and their closed forms."""
    return {
        "example1": Model(
            "example1",
            BoundarySpec((
                _dirichlet("y=0", FuncSpec(kind="sinh")),
                _dirichlet("y=pi", FuncSpec(kind="sinh", amplitude=-1)),
                _dirichlet("x=0", _ZERO),
                _dirichlet("x=pi", FuncSpec(kind="cos", sym_amp="sinh_pi")),
            )),
            reference="sinh(x)*cos(y)",
            default_order=36,
        ),
        "example2": Model(
            "example2",
            BoundarySpec((
                _dirichlet("y=0", _ZERO),
                _dirichlet("y=pi", _ZERO),
                _dirichlet("x=0", FuncSpec(kind="sin")),
                _dirichlet("x=pi", FuncSpec(kind="sin", sym_amp="cosh_pi")),
            )),
            reference="cosh(x)*sin(y)",
            default_order=36,
        ),
        "example3": Model(
            "example3",
            BoundarySpec((
                _neumann("y=0", _ZERO),
                _neumann("y=pi", FuncSpec(kind="cos", arg_scale=2, amplitude=2, sym_amp="sinh_2pi")),
                _neumann("x=0", _ZERO),
                _neumann("x=pi", _ZERO),
            )),
            reference="cos(2x)*cosh(2y)",
            default_order=60,
            origin_value=Fraction(1),
        ),
        "example4": Model(
            "example4",
            BoundarySpec((
                _neumann("y=0", FuncSpec(kind="cos")),
                _neumann("y=pi", FuncSpec(kind="cos", sym_amp="cosh_pi")),
                _neumann("x=0", _ZERO),
                _neumann("x=pi", _ZERO),
            )),
            reference="cos(x)*sinh(y)",
            default_order=36,
        ),
    }


def solve_example(model_id: str | int, order: Optional[int] = None, **kwargs) -> ModelReport:
    """Solve a built-in model ("example1" .. "example4", or 1..4)."""
    if isinstance(model_id, int):
        model_id = f"example{model_id}"
    catalog = model_catalog()
    if model_id not in catalog:
        raise DtmError(
            f"unknown model {model_id!r}; choose from {sorted(catalog)}"
        )
    model = catalog[model_id]
    return solve_model(
        model.bc,
        model.default_order if order is None else order,
        model_id=model.model_id,
        origin_value=model.origin_value,
        reference=model.reference,
        **kwargs,
    )
