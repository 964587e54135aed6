"""Rotated-Dirichlet-sum sections, their derivatives and the two AFE forms.

A CoefficientModel bundles everything that distinguishes the Riemann sum from
the period-5 counterexample: the coefficient pattern, which rotation phase to
use, and the two term-count rules,

    robust cutoff     N(t) = floor(t/2)          (section evaluation),
    classical cutoff  N(g) = floor(sqrt(g/2pi))  (values at Gram points).

The section of dimension N is

    Z_N(t; a) = c_1 cos(theta(t)) + sum_{k=1..N} a_k c_{k+1}/sqrt(k+1)
                                              * cos(theta(t) - ln(k+1) t),

so a = 0 gives the pure cosine core and a = 1 the working approximation of
the target function. Derivatives in t come in two flavours: "main" replaces
theta' by its main term (1/2) ln(t/2pi) — the convention every closed form
downstream is stated in — and "full" keeps the correction series.

All sums run in ascending term order with compensated accumulation
(numerics.csum), so repeated runs emit bit-identical values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import (DimensionError, DomainError, FlatPointError,
                     IndexRangeError, NonConvergenceError, NotAGramPointError)
from .numerics import csum, running_csum
from .special import ThetaKind, theta, theta_deriv, theta_main_deriv

TWO_PI = 2.0 * math.pi


def robust_cutoff_half_t(t: float) -> int:
    return max(1, int(math.floor(t / 2.0)))


def classical_cutoff_sqrt(g: float) -> int:
    return max(1, int(math.floor(math.sqrt(g / TWO_PI))))


@dataclass(frozen=True)
class CoefficientModel:
    """Immutable description of one rotated Dirichlet sum."""

    name: str
    theta_kind: ThetaKind
    coeff_period: tuple[float, ...] | None = None  # None means c_m = 1 for all m
    robust_cutoff: Callable[[float], int] = robust_cutoff_half_t
    classical_cutoff: Callable[[float], int] = classical_cutoff_sqrt

    def coefficients(self, count: int) -> np.ndarray:
        """c_m for m = 1..count."""
        if self.coeff_period is None:
            return np.ones(count)
        pattern = np.asarray(self.coeff_period, dtype=float)
        return pattern[np.arange(count) % len(pattern)]

    def theta(self, t):
        return theta(self.theta_kind, t)

    def theta_deriv(self, t: float, order: int = 1) -> float:
        return theta_deriv(self.theta_kind, t, order)

    def theta_main(self, t: float) -> float:
        return theta_main_deriv(self.theta_kind, t)


def riemann_model() -> CoefficientModel:
    return CoefficientModel(name="riemann", theta_kind=ThetaKind.RIEMANN_SIEGEL)


@lru_cache(maxsize=32)
def _basis(model: CoefficientModel, m_count: int):
    """Per-term arrays for m = 1..m_count: ln m, c_m/sqrt(m)."""
    m = np.arange(1, m_count + 1, dtype=float)
    ln_m = np.log(m)
    q = model.coefficients(m_count) / np.sqrt(m)
    return ln_m, q


def _as_weights(a, n: int):
    """Normalize a parameter point: scalar -> uniform, sequence -> validated array."""
    if a is None:
        return 0.0
    if isinstance(a, (int, float)):
        return float(a)
    arr = np.asarray(a, dtype=float)
    if arr.ndim != 1 or arr.shape[0] != n:
        raise DimensionError(f"parameter point has dimension {arr.shape}, expected ({n},)")
    return arr


def section_eval(model: CoefficientModel, t, a, *, orders: tuple[int, ...] = (0,),
                 deriv_mode: str = "main", n_terms: int | None = None) -> dict[int, float]:
    """Evaluate Z_N(t; a) and its requested t-derivatives in one trig pass.

    n_terms pins the section dimension N (defaults to the robust cutoff at t);
    continuation code passes it explicitly so the dimension never jumps while
    t slides across an even integer.
    """
    n = model.robust_cutoff(t.real if isinstance(t, complex) else t) \
        if n_terms is None else n_terms
    w = _as_weights(a, n)
    ln_m, q = _basis(model, n + 1)
    th = model.theta(t)
    phases = th - t * ln_m
    if isinstance(w, float):
        full = None
    else:
        full = np.empty(n + 1)
        full[0] = 1.0
        full[1:] = w

    out: dict[int, float] = {}
    if 0 in orders:
        terms = q * np.cos(phases)
        out[0] = _weighted(terms, w, full)
    if 1 in orders or 2 in orders:
        if deriv_mode == "main":
            tp = model.theta_main(t)
            factors = tp - ln_m
        elif deriv_mode == "full":
            tp = model.theta_deriv(t, 1)
            factors = tp - ln_m
        else:
            raise ValueError(f"unknown deriv_mode {deriv_mode!r}")
        if 1 in orders:
            terms = -q * np.sin(phases) * factors
            out[1] = _weighted(terms, w, full)
        if 2 in orders:
            terms = -q * np.cos(phases) * factors * factors
            if deriv_mode == "full":
                terms = terms - q * np.sin(phases) * model.theta_deriv(t, 2)
            out[2] = _weighted(terms, w, full)
    return out


def _csum_any(terms: np.ndarray):
    if np.iscomplexobj(terms):
        return complex(csum(terms.real), csum(terms.imag))
    return csum(terms)


def _weighted(terms: np.ndarray, w, full):
    if isinstance(w, float):
        head = terms[0] if np.iscomplexobj(terms) else float(terms[0])
        if w == 0.0:
            return head
        return head + w * _csum_any(terms[1:])
    return _csum_any(full * terms)


def z_section(model: CoefficientModel, t, a) -> float:
    """The section value Z_N(t; a); a may be a scalar (uniform point) or a vector."""
    return section_eval(model, t, a)[0]


def z_section_deriv(model: CoefficientModel, t: float, a, order: int = 1,
                    mode: str = "main") -> float:
    """Analytic d/dt of the section, order 1 or 2.

    mode "main" uses theta' = (1/2) ln(t/2pi) exactly as in the closed forms;
    mode "full" keeps the asymptotic correction terms of theta'.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    return section_eval(model, t, a, orders=(order,), deriv_mode=mode)[order]


@dataclass(frozen=True)
class ClassicalValues:
    """Classical-AFE value pair at a Gram point."""
    n: int
    z: float
    zprime: float

    @property
    def viscosity(self) -> float:
        if self.z == 0.0:
            return math.inf
        return abs(self.zprime / self.z)


def gram_index_of(model: CoefficientModel, g: float, tol: float = 1e-6) -> int:
    """Recover n from theta(g)/pi, complaining if g is not a Gram point."""
    x = model.theta(g) / math.pi
    n = int(round(x))
    if abs(x - n) > tol:
        raise NotAGramPointError(f"theta({g})/pi = {x} is not integral within {tol}")
    return n


def localized_sum(model: CoefficientModel, g: float, a_lo: int, b_hi: int,
                  which: str = "z", *, n_override: int | None = None) -> float:
    """Partial classical-AFE sum over term indices k in [a_lo, b_hi].

    which = "z":       2 (-1)^n sum c_k cos(ln k g)/sqrt(k)
    which = "zprime":  (-1)^n sum c_k ln(g/(2 pi k^2)) sin(ln k g)/sqrt(k)

    localized_sum(1, N(n)) reproduces classical_afe bit for bit: both go
    through this very routine.
    """
    n_cut = model.classical_cutoff(g)
    if not (1 <= a_lo <= b_hi <= n_cut):
        raise IndexRangeError(f"need 1 <= {a_lo} <= {b_hi} <= {n_cut}")
    n = gram_index_of(model, g) if n_override is None else n_override
    sign = -1.0 if n % 2 else 1.0
    terms = _classical_terms(model, g, which)[a_lo - 1:b_hi]
    factor = 2.0 * sign if which == "z" else sign
    return factor * csum(terms)


def _classical_terms(model: CoefficientModel, g: float, which: str) -> np.ndarray:
    """Unsigned classical-AFE term array for k = 1..N(g)."""
    n_cut = model.classical_cutoff(g)
    k = np.arange(1, n_cut + 1, dtype=float)
    ln_k = np.log(k)
    c = model.coefficients(n_cut)
    if which == "z":
        return c * np.cos(ln_k * g) / np.sqrt(k)
    if which == "zprime":
        length = 2.0 * (model.theta_main(g) - ln_k)  # ln(g / (2 pi k^2)) analogue
        return c * length * np.sin(ln_k * g) / np.sqrt(k)
    raise ValueError(f"which must be 'z' or 'zprime', got {which!r}")


def classical_afe(model: CoefficientModel, g: float) -> ClassicalValues:
    """Z(g_n) and Z'(g_n) from the classical AFE (error term not added)."""
    if not g >= 10.0:
        raise DomainError(f"classical_afe requires g >= 10, got {g}")
    n = gram_index_of(model, g)
    n_cut = model.classical_cutoff(g)
    z = localized_sum(model, g, 1, n_cut, "z", n_override=n)
    zp = localized_sum(model, g, 1, n_cut, "zprime", n_override=n)
    return ClassicalValues(n=n, z=z, zprime=zp)


def classical_partial_sums(model: CoefficientModel, g: float, which: str) -> np.ndarray:
    """Running partial sums S(k) of the classical AFE, k = 1..N(g), signed."""
    n = gram_index_of(model, g)
    sign = -1.0 if n % 2 else 1.0
    factor = 2.0 * sign if which == "z" else sign
    return factor * running_csum(_classical_terms(model, g, which))


@dataclass
class NewtonResult:
    t: float
    iterates: list[float]
    converged: bool
    final_value: float


def find_zero_newton(model: CoefficientModel, t0: float, max_iter: int = 50,
                     tol: float = 1e-10) -> NewtonResult:
    """Newton iteration t <- t - Z(t)/Z'(t) at a = 1, with full iterate history.

    Stops when |Z| < tol, or when the step falls below rounding scale (the
    summation noise of a ~1e5-term section sits above 1e-10 at large heights,
    so a pure value test could spin forever at the fixed point). Raises
    FlatPointError if |Z'| falls below 1e-12 and NonConvergenceError if the
    budget runs out; both carry the iterate list.
    """
    if not t0 >= 10.0:
        raise DomainError(f"find_zero_newton requires t0 >= 10, got {t0}")
    t = float(t0)
    iterates = [t]
    step_floor = 1e-13 * max(1.0, abs(t0))
    for _ in range(max_iter):
        vals = section_eval(model, t, 1.0, orders=(0, 1))
        z, zp = vals[0], vals[1]
        if abs(z) < tol:
            return NewtonResult(t=t, iterates=iterates, converged=True, final_value=z)
        if abs(zp) < 1e-12:
            raise FlatPointError(f"flat point at t={t}: |Z'|={abs(zp):.3e}", iterates)
        step = z / zp
        t = t - step
        iterates.append(t)
        if abs(step) <= step_floor:
            return NewtonResult(t=t, iterates=iterates, converged=True,
                                final_value=z_section(model, t, 1.0))
    z = z_section(model, t, 1.0)
    if abs(z) < tol:
        return NewtonResult(t=t, iterates=iterates, converged=True, final_value=z)
    raise NonConvergenceError(
        f"no convergence after {max_iter} iterations (|Z|={abs(z):.3e})", iterates)
