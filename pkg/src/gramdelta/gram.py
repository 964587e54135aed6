"""Gram points, core zeros, good/bad classification, blocks and viscosity scans.

Seeds come from the Lambert-W closed forms; refinement is Newton on the
monotone residual theta(t) - target, driven to machine accuracy (the spec
floor of 1e-9 relative falls out for free). Two target conventions:

    gram_point(n):  theta(t) = pi n
    core_zero(n):   theta(t) = pi (n - 1/2)

For the Riemann seeds the printed core-zero closed form lands one Gram gap
below the (n - 1/2) branch; the monotone Newton bridges that offset, which is
what makes core_zero(6708) = 7004.95 rather than 7004.05.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .errors import DomainError, IndeterminateSignError
from .numerics import newton_scalar
from .special import ThetaKind, lambert_w0
from .zmodel import CoefficientModel, classical_afe, section_eval, z_section

_INV_E = math.exp(-1.0)


class GramKind(Enum):
    GOOD = "good"
    BAD = "bad"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class GramRecord:
    n: int
    t: float
    z_value: float
    zprime_value: float
    kind: GramKind
    viscosity: float

    @property
    def is_bad(self) -> bool:
        return self.kind is GramKind.BAD


@dataclass(frozen=True)
class GramBlock:
    """Run {g_start, ..., g_(start+length)} with good endpoints, bad interior."""
    start: int
    length: int
    interior_bad: tuple[int, ...]

    @property
    def is_isolated(self) -> bool:
        return self.length == 2


def _seed_gram(kind: ThetaKind, n: int) -> float:
    if kind is ThetaKind.RIEMANN_SIEGEL:
        if n < 0:
            raise DomainError(f"Riemann Gram index must be >= 0, got {n}")
        x = (8.0 * n + 1.0) / (8.0 * math.e)
        return (8.0 * n + 1.0) * math.pi / (4.0 * lambert_w0(x))
    if n < 1:
        raise DomainError(f"DH Gram index must be >= 1, got {n}")
    c = n - 0.125
    return 2.0 * math.pi * c / lambert_w0(5.0 * c * _INV_E)


def _seed_core(kind: ThetaKind, n: int) -> float:
    if kind is ThetaKind.RIEMANN_SIEGEL:
        x = (8.0 * n - 11.0) / (8.0 * math.e)
        if x < -_INV_E:
            raise DomainError(f"core-zero seed argument {x} below -1/e (n={n})")
        return (8.0 * n - 11.0) * math.pi / (4.0 * lambert_w0(x))
    c = n - 0.625
    if 5.0 * c * _INV_E < -_INV_E:
        raise DomainError(f"DH core-zero seed out of W domain (n={n})")
    return 2.0 * math.pi * c / lambert_w0(5.0 * c * _INV_E)


def _refine_theta(model: CoefficientModel, t0: float, target: float) -> float:
    def f_and_df(t: float) -> tuple[float, float]:
        return model.theta(t) - target, model.theta_deriv(t, 1)

    t, _, _ = newton_scalar(f_and_df, t0, rel_step_tol=1e-13, max_iter=16)
    return t


def gram_point(model: CoefficientModel, n: int) -> float:
    """The n-th Gram point: seed by the closed form, refine theta(t) = pi n."""
    seed = _seed_gram(model.theta_kind, n)
    return _refine_theta(model, seed, math.pi * n)


def gram_point_seed(model: CoefficientModel, n: int) -> float:
    """Unrefined Lambert-W seed (exposed for the seed-gap checks)."""
    return _seed_gram(model.theta_kind, n)


def core_zero(model: CoefficientModel, n: int) -> float:
    """The n-th zero of the cosine core, on the branch theta(t) = pi (n - 1/2)."""
    seed = _seed_core(model.theta_kind, n)
    return _refine_theta(model, seed, math.pi * (n - 0.5))


_SMALL = 1e-4
_CLASSICAL_ERROR_SCALE = 3.0  # multiplies g^(-1/4), the dropped AFE error term


def classify(model: CoefficientModel, n: int) -> GramRecord:
    """GramRecord for index n; good means (-1)^n Z(g_n) > 0.

    The first look is the classical AFE, whose dropped error term is
    O(g^(-1/4)); whenever |Z| is within a few multiples of that, the verdict
    is re-derived from the robust section at a = 1 (error O(1/g), decisive at
    every height of interest: it is what separates good g_90 from bad g_126).
    If the robust value is below 1e-4 too, the record is flagged
    indeterminate rather than silently classified.

    Viscosity |Z'/Z| is taken from the robust pair, which tracks the true
    logarithmic derivative; z_value/zprime_value keep the classical pair that
    the adjustment identities are built on.
    """
    g = gram_point(model, n)
    vals = classical_afe(model, g)
    sign = -1.0 if n % 2 else 1.0
    if abs(vals.z) < max(_SMALL, _CLASSICAL_ERROR_SCALE * g ** -0.25):
        robust = z_section(model, g, 1.0)
        if abs(robust) < _SMALL:
            kind = GramKind.INDETERMINATE
        else:
            kind = GramKind.GOOD if sign * robust > 0 else GramKind.BAD
    else:
        kind = GramKind.GOOD if sign * vals.z > 0 else GramKind.BAD
    return GramRecord(n=n, t=g, z_value=vals.z, zprime_value=vals.zprime,
                      kind=kind, viscosity=_robust_viscosity(model, g))


def _robust_viscosity(model: CoefficientModel, g: float) -> float:
    vals = section_eval(model, g, 1.0, orders=(0, 1), deriv_mode="full")
    if vals[0] == 0.0:
        return math.inf
    return abs(vals[1] / vals[0])


class RecordSource:
    """Classification with memoization; a cache store can be layered on top."""

    def __init__(self, model: CoefficientModel, store=None):
        self.model = model
        self.store = store
        self._memo: dict[int, GramRecord] = {}

    def get(self, n: int) -> GramRecord:
        rec = self._memo.get(n)
        if rec is not None:
            return rec
        if self.store is not None:
            rec = self.store.get(self.model.name, n)
        if rec is None:
            rec = classify(self.model, n)
            if self.store is not None:
                self.store.put(self.model.name, rec)
        self._memo[n] = rec
        return rec

    def range(self, n_from: int, n_to: int) -> list[GramRecord]:
        return [self.get(n) for n in range(n_from, n_to + 1)]


def _require_determinate(rec: GramRecord) -> GramRecord:
    if rec.kind is GramKind.INDETERMINATE:
        raise IndeterminateSignError(f"Gram point n={rec.n} is indeterminate")
    return rec


def blocks(model: CoefficientModel, n_from: int, n_to: int,
           source: RecordSource | None = None) -> list[GramBlock]:
    """Maximal Gram blocks covering every bad index in [n_from, n_to].

    A block that starts or ends outside the requested window is completed by
    classifying beyond the edge, so the partition into blocks is exact.
    """
    if n_from >= n_to:
        raise ValueError(f"need n_from < n_to, got [{n_from}, {n_to}]")
    src = source or RecordSource(model)
    lowest = 0 if model.theta_kind is ThetaKind.RIEMANN_SIEGEL else 1
    out: list[GramBlock] = []
    n = n_from
    while n <= n_to:
        rec = _require_determinate(src.get(n))
        if rec.kind is not GramKind.BAD:
            n += 1
            continue
        lo = n
        while lo - 1 >= lowest and _require_determinate(src.get(lo - 1)).kind is GramKind.BAD:
            lo -= 1
        hi = n
        while _require_determinate(src.get(hi + 1)).kind is GramKind.BAD:
            hi += 1
        out.append(GramBlock(start=lo - 1, length=hi - lo + 2,
                             interior_bad=tuple(range(lo, hi + 1))))
        n = hi + 1
    return out


@dataclass(frozen=True)
class BadPointReport:
    n: int
    t: float
    viscosity: float
    isolated: bool
    corrupt: bool


@dataclass
class GbgScanReport:
    """Every bad point in range, with the repulsion-conjecture verdict."""
    n_from: int
    n_to: int
    bound: float
    bad_points: list[BadPointReport] = field(default_factory=list)

    @property
    def offenders(self) -> list[BadPointReport]:
        return [b for b in self.bad_points if b.corrupt and b.isolated]

    @property
    def conjecture_holds(self) -> bool:
        return not self.offenders


def gbg_scan(model: CoefficientModel, n_from: int, n_to: int,
             bound: float = 4.0, source: RecordSource | None = None) -> GbgScanReport:
    """Scan for bad points; corrupt means viscosity < bound.

    The verdict asserts that no corrupt point is isolated (good neighbours on
    both sides).
    """
    src = source or RecordSource(model)
    report = GbgScanReport(n_from=n_from, n_to=n_to, bound=bound)
    for n in range(n_from, n_to + 1):
        rec = _require_determinate(src.get(n))
        if rec.kind is not GramKind.BAD:
            continue
        left = _require_determinate(src.get(n - 1)).kind if n - 1 >= 0 else GramKind.GOOD
        right = _require_determinate(src.get(n + 1)).kind
        isolated = left is GramKind.GOOD and right is GramKind.GOOD
        report.bad_points.append(BadPointReport(
            n=n, t=rec.t, viscosity=rec.viscosity, isolated=isolated,
            corrupt=rec.viscosity < bound))
    return report
