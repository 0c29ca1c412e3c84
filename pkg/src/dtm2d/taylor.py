"""Boundary-trace descriptors and exact 1D Taylor coefficient generation.

A trace is a closed-form function of one variable built from a small library
(sin, cos, sinh, cosh, exp, polynomials, zero), an exact rational argument
scale and amplitude, an optional symbolic amplitude token for the handful of
transcendental constants that occur in boundary data (sinh(pi) and friends),
and optional summation of such terms.  Exact coefficients never absorb the
tokens; the float layer resolves them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .spectrum import CoeffLike, DtmError, Spectrum2D, as_coeff, coeff_str

KINDS = ("sin", "cos", "sinh", "cosh", "exp", "polynomial", "zero")
SYM_AMPS = ("none", "sinh_pi", "cosh_pi", "sinh_2pi", "cosh_2pi")

__all__ = [
    "FuncSpec",
    "KINDS",
    "SYM_AMPS",
    "funcspec_from_json",
    "funcspec_to_json",
    "outer_product",
    "sym_amp_series_coeff",
    "sym_amp_value",
    "taylor_coeffs",
    "taylor_coeffs_float",
    "trace_value",
]


def sym_amp_value(token: str) -> float:
    """Float value of a symbolic amplitude token."""
    if token == "none":
        return 1.0
    if token == "sinh_pi":
        return math.sinh(math.pi)
    if token == "cosh_pi":
        return math.cosh(math.pi)
    if token == "sinh_2pi":
        return math.sinh(2 * math.pi)
    if token == "cosh_2pi":
        return math.cosh(2 * math.pi)
    raise DtmError(f"unknown symbolic amplitude {token!r}")


def sym_amp_series_coeff(token: str, p: int) -> Fraction:
    """Coefficient of pi**p in the defining series of a token.

    sinh(c*pi) = sum over odd p of c**p pi**p / p!, cosh likewise over even p;
    the trivial token "none" is the constant 1.
    """
    if p < 0:
        return Fraction(0)
    if token == "none":
        return Fraction(1) if p == 0 else Fraction(0)
    if token == "sinh_pi":
        return Fraction(1, math.factorial(p)) if p % 2 == 1 else Fraction(0)
    if token == "cosh_pi":
        return Fraction(1, math.factorial(p)) if p % 2 == 0 else Fraction(0)
    if token == "sinh_2pi":
        return Fraction(2**p, math.factorial(p)) if p % 2 == 1 else Fraction(0)
    if token == "cosh_2pi":
        return Fraction(2**p, math.factorial(p)) if p % 2 == 0 else Fraction(0)
    raise DtmError(f"unknown symbolic amplitude {token!r}")


@dataclass(frozen=True)
class FuncSpec:
    """Symbolic descriptor of a 1D boundary trace: amplitude * f(scale * t).

    ``sym_amp`` multiplies the whole term by a transcendental constant that
    the exact layer keeps symbolic.  A sum of terms is expressed with
    ``terms`` set and all other fields at their defaults.
    """

    kind: str = "zero"
    arg_scale: Fraction = Fraction(1)
    amplitude: Fraction = Fraction(1)
    sym_amp: str = "none"
    poly_coeffs: Optional[tuple[Fraction, ...]] = None
    terms: Optional[tuple["FuncSpec", ...]] = None

    def __post_init__(self) -> None:
        if self.terms is not None:
            if not self.terms:
                raise DtmError("sum trace needs at least one term")
            for t in self.terms:
                if t.terms is not None:
                    raise DtmError("nested sum traces are not supported")
            return
        if self.kind not in KINDS:
            raise DtmError(f"unknown trace kind {self.kind!r}")
        if self.sym_amp not in SYM_AMPS:
            raise DtmError(f"unknown symbolic amplitude {self.sym_amp!r}")
        object.__setattr__(self, "arg_scale", as_coeff(self.arg_scale))
        object.__setattr__(self, "amplitude", as_coeff(self.amplitude))
        if self.kind == "polynomial":
            if not self.poly_coeffs:
                raise DtmError("polynomial trace needs coefficients")
            object.__setattr__(
                self, "poly_coeffs", tuple(as_coeff(c) for c in self.poly_coeffs)
            )
        elif self.poly_coeffs is not None:
            raise DtmError(f"{self.kind} trace cannot carry poly_coeffs")

    def is_zero(self) -> bool:
        """True when the trace is identically zero."""
        if self.terms is not None:
            return all(t.is_zero() for t in self.terms)
        if self.kind == "zero" or self.amplitude == 0:
            return True
        if self.kind == "polynomial":
            return all(c == 0 for c in self.poly_coeffs)
        return False

    def flat_terms(self) -> tuple["FuncSpec", ...]:
        """The trace as a tuple of single-library terms."""
        return self.terms if self.terms is not None else (self,)


def _base_coeff(kind: str, poly: Optional[tuple[Fraction, ...]], k: int) -> Fraction:
    if kind == "sin":
        return Fraction((-1) ** ((k - 1) // 2), math.factorial(k)) if k % 2 else Fraction(0)
    if kind == "cos":
        return Fraction((-1) ** (k // 2), math.factorial(k)) if k % 2 == 0 else Fraction(0)
    if kind == "sinh":
        return Fraction(1, math.factorial(k)) if k % 2 else Fraction(0)
    if kind == "cosh":
        return Fraction(1, math.factorial(k)) if k % 2 == 0 else Fraction(0)
    if kind == "exp":
        return Fraction(1, math.factorial(k))
    if kind == "polynomial":
        return poly[k] if k < len(poly) else Fraction(0)
    return Fraction(0)  # zero


def taylor_coeffs(f: FuncSpec, order: int) -> list[Fraction]:
    """Exact coefficients of the trace at t = 0, length order + 1.

    Coefficient k is f^(k)(0)/k!.  Traces carrying a symbolic amplitude are
    rejected: the exact layer never multiplies tokens into rationals.
    """
    if order < 0:
        raise DtmError(f"order must be non-negative, got {order}")
    out = [Fraction(0)] * (order + 1)
    for term in f.flat_terms():
        if term.sym_amp != "none":
            raise DtmError(
                "trace carries a symbolic amplitude; exact coefficients are "
                "not defined (use taylor_coeffs_float)"
            )
        scale_pow = Fraction(1)
        for k in range(order + 1):
            base = _base_coeff(term.kind, term.poly_coeffs, k)
            if base != 0:
                out[k] += term.amplitude * scale_pow * base
            scale_pow *= term.arg_scale
    return out


def taylor_coeffs_float(f: FuncSpec, order: int) -> list[float]:
    """Float coefficients with symbolic amplitudes resolved."""
    out = [0.0] * (order + 1)
    for term in f.flat_terms():
        token = sym_amp_value(term.sym_amp)
        scale_pow = Fraction(1)
        for k in range(order + 1):
            base = _base_coeff(term.kind, term.poly_coeffs, k)
            if base != 0:
                out[k] += token * float(term.amplitude * scale_pow * base)
            scale_pow *= term.arg_scale
    return out


def trace_value(f: FuncSpec, t: float) -> float:
    """Evaluate the trace at t using the platform's transcendental functions."""
    total = 0.0
    for term in f.flat_terms():
        if term.kind == "zero" or term.amplitude == 0:
            continue
        u = float(term.arg_scale) * t
        if term.kind == "sin":
            base = math.sin(u)
        elif term.kind == "cos":
            base = math.cos(u)
        elif term.kind == "sinh":
            base = math.sinh(u)
        elif term.kind == "cosh":
            base = math.cosh(u)
        elif term.kind == "exp":
            base = math.exp(u)
        else:  # polynomial, Horner in u
            base = 0.0
            for c in reversed(term.poly_coeffs):
                base = base * u + float(c)
        total += float(term.amplitude) * sym_amp_value(term.sym_amp) * base
    return total


def outer_product(
    f_coeffs: Sequence[CoeffLike], g_coeffs: Sequence[CoeffLike], order: int
) -> Spectrum2D:
    """Rank-one spectrum U(m, n) = F(m) G(n) over the triangle m + n <= order."""
    if len(f_coeffs) < order + 1 or len(g_coeffs) < order + 1:
        raise DtmError(
            f"need at least {order + 1} coefficients per factor, got "
            f"{len(f_coeffs)} and {len(g_coeffs)}"
        )
    fs = [as_coeff(c) for c in f_coeffs[: order + 1]]
    gs = [as_coeff(c) for c in g_coeffs[: order + 1]]
    table: dict[tuple[int, int], Fraction] = {}
    for m, fm in enumerate(fs):
        if fm == 0:
            continue
        for n in range(order - m + 1):
            value = fm * gs[n]
            if value != 0:
                table[(m, n)] = value
    return Spectrum2D(order, (Fraction(0), Fraction(0)), table)


def funcspec_to_json(f: FuncSpec) -> dict:
    """JSON-ready dict form; sums nest their terms under "terms"."""
    if f.terms is not None:
        return {"terms": [funcspec_to_json(t) for t in f.terms]}
    data = {
        "kind": f.kind,
        "arg_scale": coeff_str(f.arg_scale),
        "amplitude": coeff_str(f.amplitude),
        "sym_amp": f.sym_amp,
    }
    if f.poly_coeffs is not None:
        data["poly_coeffs"] = [coeff_str(c) for c in f.poly_coeffs]
    return data


def funcspec_from_json(data: Mapping) -> FuncSpec:
    """Inverse of :func:`funcspec_to_json`."""
    if "terms" in data:
        return FuncSpec(terms=tuple(funcspec_from_json(t) for t in data["terms"]))
    try:
        kind = data["kind"]
    except KeyError as exc:
        raise DtmError("trace JSON needs a 'kind' or 'terms' field") from exc
    poly = data.get("poly_coeffs")
    return FuncSpec(
        kind=kind,
        arg_scale=as_coeff(data.get("arg_scale", 1)),
        amplitude=as_coeff(data.get("amplitude", 1)),
        sym_amp=data.get("sym_amp", "none"),
        poly_coeffs=tuple(as_coeff(c) for c in poly) if poly is not None else None,
    )
