"""Trajectory statistics: Birkhoff averages, correlation sequences, and
the finite-horizon weak-mixing statistic, with exact closed forms where
the geometry allows them.

Weak mixing asks that the Cesaro average of |mu(S^i A  cap  B) - mu(A)mu(B)|
tend to 0.  At desk scale only finite-t trends are observable, so verdicts
read "consistent with weak mixing" (statistic below 0.01) or "inconsistent"
(above 0.05), never the limit statement itself.  Two independent tracks are
provided: an exact track for pairs with closed-form correlations (circle
interval overlaps, cylinder independence) and a Monte-Carlo track for
everything else; the spectral predicates give a third, non-numeric opinion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Union

import numpy as np

from .koopman import SpectrumDescriptor
from .systems import (
    BernoulliSpec,
    CylinderSet,
    SampleBatch,
    SymbolWindow,
    SystemSpec,
    iterate_batch,
    sample_batch,
)

__all__ = [
    "CorrelationPoint",
    "NoClosedFormError",
    "TestSet",
    "birkhoff_average",
    "correlation",
    "orbit_track",
    "spectral_ergodicity_check",
    "spectral_weak_mixing_check",
    "weak_mixing_statistic",
    "weak_mixing_verdict",
]

CONSISTENT_BELOW = 0.01
INCONSISTENT_ABOVE = 0.05


class NoClosedFormError(ValueError):
    """Exact correlation was requested for a pair without a closed form."""


def _as_fraction(x) -> Fraction:
    # floats convert exactly (binary rationals), so 0.5 stays 1/2
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class TestSet:
    """A measurable test set with an exactly computable measure.

    Kinds: a half-open u-interval [a, b) (full in every other coordinate),
    a torus rectangle [a, b) x [c, d), a sequence cylinder, or a product
    of a u-interval with a cylinder.  Interval endpoints are stored as
    exact rationals.
    """

    __test__ = False  # not a test-suite class, despite the name

    kind: str
    a: Optional[Fraction] = None
    b: Optional[Fraction] = None
    c: Optional[Fraction] = None
    d: Optional[Fraction] = None
    cylinder: Optional[CylinderSet] = None

    def __post_init__(self) -> None:
        if self.kind not in ("u-interval", "rectangle", "cylinder", "product"):
            raise ValueError(f"unknown test-set kind {self.kind!r}")
        if self.kind in ("u-interval", "rectangle", "product"):
            if not (0 <= self.a < self.b <= 1):
                raise ValueError("u-interval bounds must satisfy 0 <= a < b <= 1")
        if self.kind == "rectangle" and not (0 <= self.c < self.d <= 1):
            raise ValueError("v-interval bounds must satisfy 0 <= c < d <= 1")
        if self.kind in ("cylinder", "product") and self.cylinder is None:
            raise ValueError(f"{self.kind} test set needs a cylinder")

    # -- constructors ------------------------------------------------------

    @classmethod
    def u_interval(cls, a, b) -> "TestSet":
        return cls(kind="u-interval", a=_as_fraction(a), b=_as_fraction(b))

    @classmethod
    def rectangle(cls, a, b, c, d) -> "TestSet":
        return cls(
            kind="rectangle",
            a=_as_fraction(a),
            b=_as_fraction(b),
            c=_as_fraction(c),
            d=_as_fraction(d),
        )

    @classmethod
    def from_cylinder(cls, cylinder: CylinderSet) -> "TestSet":
        return cls(kind="cylinder", cylinder=cylinder)

    @classmethod
    def product_set(cls, a, b, cylinder: CylinderSet) -> "TestSet":
        return cls(
            kind="product", a=_as_fraction(a), b=_as_fraction(b), cylinder=cylinder
        )

    # -- measure -----------------------------------------------------------

    def exact_measure(self, spec: SystemSpec) -> Fraction:
        """The measure as an exact rational (cylinder probabilities enter
        by their exact binary-float values)."""
        if self.kind == "u-interval":
            return self.b - self.a
        if self.kind == "rectangle":
            return (self.b - self.a) * (self.d - self.c)
        cyl = _exact_cylinder_measure(spec.bernoulli, self.cylinder)
        if self.kind == "cylinder":
            return cyl
        return (self.b - self.a) * cyl

    def measure(self, spec: SystemSpec) -> float:
        return float(self.exact_measure(spec))

    # -- membership --------------------------------------------------------

    def contains_batch(self, spec: SystemSpec, batch: SampleBatch) -> np.ndarray:
        """Boolean membership array for a sample batch."""
        result = None
        if self.kind in ("u-interval", "rectangle", "product"):
            if batch.u is None:
                raise ValueError(f"{self.kind} set needs a u coordinate")
            result = (batch.u >= float(self.a)) & (batch.u < float(self.b))
        if self.kind == "rectangle":
            result &= (batch.v >= float(self.c)) & (batch.v < float(self.d))
        if self.kind in ("cylinder", "product"):
            inside = np.ones(len(batch), dtype=bool)
            bern = spec.bernoulli
            for pos, sym in self.cylinder.constraints:
                inside &= batch.symbol_indices_at(pos) == bern.index_of(sym)
            result = inside if result is None else (result & inside)
        return result

    def to_json(self) -> dict:
        data: dict = {"kind": self.kind}
        if self.a is not None:
            data["a"] = str(self.a)
            data["b"] = str(self.b)
        if self.c is not None:
            data["c"] = str(self.c)
            data["d"] = str(self.d)
        if self.cylinder is not None:
            data["cylinder"] = self.cylinder.to_json()
        return data

    def label(self) -> str:
        if self.kind == "u-interval":
            return f"u in [{self.a}, {self.b})"
        if self.kind == "rectangle":
            return f"[{self.a},{self.b}) x [{self.c},{self.d})"
        if self.kind == "cylinder":
            cons = ", ".join(f"w{p}={s}" for p, s in self.cylinder.constraints)
            return "{" + cons + "}"
        return f"u in [{self.a}, {self.b}) x " + TestSet.from_cylinder(self.cylinder).label()


def _exact_cylinder_measure(bern: BernoulliSpec, cyl: CylinderSet) -> Fraction:
    out = Fraction(1)
    for _, sym in cyl.constraints:
        out *= _as_fraction(bern.prob_of(sym))
    return out


# ---------------------------------------------------------------------------
# orbit tracks and Birkhoff averages
# ---------------------------------------------------------------------------


@dataclass
class OrbitTrack:
    """Coordinate arrays along one orbit: step j holds S^j x0."""

    spec: SystemSpec
    length: int
    u: Optional[np.ndarray] = None
    v: Optional[np.ndarray] = None
    window: Optional[SymbolWindow] = None

    def symbols(self, position: int = 0) -> np.ndarray:
        """Symbol value at ``position`` of the shifted sequence, per step:
        the original sequence read at position + j."""
        if self.window is None:
            raise ValueError(f"{self.spec.kind} orbits carry no symbols")
        values = [
            self.window.symbol_at(position + j) for j in range(self.length)
        ]
        return np.asarray(values, dtype=float)

    def indicator(self, test_set: TestSet) -> np.ndarray:
        out = None
        if test_set.kind in ("u-interval", "rectangle", "product"):
            if self.u is None:
                raise ValueError("test set needs a u coordinate")
            out = (self.u >= float(test_set.a)) & (self.u < float(test_set.b))
        if test_set.kind == "rectangle":
            out &= (self.v >= float(test_set.c)) & (self.v < float(test_set.d))
        if test_set.kind in ("cylinder", "product"):
            inside = np.ones(self.length, dtype=bool)
            for pos, sym in test_set.cylinder.constraints:
                inside &= self.symbols(pos) == sym
            out = inside if out is None else (out & inside)
        return out.astype(float)


def orbit_track(spec: SystemSpec, x0, n: int) -> OrbitTrack:
    """Closed-form orbit of length n.

    x0 is a bare u value or TorusPoint for the rotation, a TorusPoint for
    the skew map, a SymbolWindow for the shift, or a (u, SymbolWindow)
    pair for the product.  The v track of the skew map accumulates the u
    track (pairwise summation keeps the roundoff near machine precision
    even over 10^6 steps).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    gamma = spec.gamma.to_float() if spec.gamma is not None else None
    steps = np.arange(n)
    if spec.kind == "rotation":
        u0 = x0.u if hasattr(x0, "u") else float(x0)
        return OrbitTrack(spec, n, u=(u0 + steps * gamma) % 1.0)
    if spec.kind == "skew":
        u = (x0.u + steps * gamma) % 1.0
        increments = np.concatenate(([0.0], np.cumsum(u[:-1])))
        return OrbitTrack(spec, n, u=u, v=(x0.v + increments) % 1.0)
    if spec.kind == "bernoulli":
        return OrbitTrack(spec, n, window=x0)
    point, window = x0
    u0 = point.u if hasattr(point, "u") else float(point)
    return OrbitTrack(spec, n, u=(u0 + steps * gamma) % 1.0, window=window)


Observable = Union[TestSet, Callable[[OrbitTrack], np.ndarray]]


def birkhoff_average(spec: SystemSpec, f: Observable, x0, n: int) -> float:
    """The time average (1/n) sum_{j<n} f(S^j x0).

    ``f`` is a TestSet (averaged as its indicator) or a callable taking
    the OrbitTrack and returning per-step values.  For ergodic systems
    this tends to the space average; the function itself makes no claim
    beyond the finite sum.
    """
    track = orbit_track(spec, x0, n)
    values = track.indicator(f) if isinstance(f, TestSet) else f(track)
    return float(np.mean(values))


# ---------------------------------------------------------------------------
# correlations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CorrelationPoint:
    """mu(S^i(A) cap B), exactly or estimated."""

    i: int
    estimate: float
    exact: bool
    stderr: float = 0.0

    def to_json(self) -> dict:
        return {
            "i": self.i,
            "estimate": self.estimate,
            "exact": self.exact,
            "stderr": self.stderr,
        }


def _interval_overlap_mod1(shift, a1, b1, a2, b2):
    """Exact length of ([a1, b1) + shift) cap [a2, b2) on the circle.

    ``shift`` may be a Fraction or an exact quadratic real; comparisons
    and arithmetic stay in exact arithmetic throughout.
    """
    lo = a1 + shift
    hi = b1 + shift
    pieces = [(lo, hi)] if not hi > 1 else [(lo, Fraction(1)), (Fraction(0), hi - 1)]
    total = None
    for plo, phi in pieces:
        left = plo if plo > a2 else a2
        right = phi if phi < b2 else b2
        if right > left:
            piece = right - left
            total = piece if total is None else total + piece
    return Fraction(0) if total is None else total


def _exact_u_shift(spec: SystemSpec, i: int):
    """frac(i * gamma) in exact arithmetic (Fraction or quadratic real)."""
    if not spec.gamma.is_exact:
        raise NoClosedFormError(
            "exact correlations need an exact rotation number"
        )
    return spec.gamma.frac_multiple(i)


def _shifted_cylinder(cyl: CylinderSet, i: int) -> CylinderSet:
    """S^i(A) for a cylinder A: constraints move from p to p - i."""
    return cyl.translate(-i)


def _merge_measure(bern: BernoulliSpec, first: CylinderSet, second: CylinderSet) -> Fraction:
    merged: dict[int, object] = {}
    for pos, sym in list(first.constraints) + list(second.constraints):
        if pos in merged and merged[pos] != sym:
            return Fraction(0)
        merged[pos] = sym
    out = Fraction(1)
    for sym in merged.values():
        out *= _as_fraction(bern.prob_of(sym))
    return out


def _exact_correlation_value(spec: SystemSpec, A: TestSet, B: TestSet, i: int):
    """Exact mu(S^i(A) cap B) where a closed form exists, else raises."""
    kind = spec.kind
    if kind == "bernoulli":
        if A.kind != "cylinder" or B.kind != "cylinder":
            raise NoClosedFormError("shift correlations need cylinder sets")
        return _merge_measure(spec.bernoulli, _shifted_cylinder(A.cylinder, i), B.cylinder)
    if kind == "rotation":
        if A.kind != "u-interval" or B.kind != "u-interval":
            raise NoClosedFormError("rotation correlations need u-intervals")
        return _interval_overlap_mod1(_exact_u_shift(spec, i), A.a, A.b, B.a, B.b)
    if kind == "skew":
        # only u-interval sets (full in v) reduce to the rotation factor;
        # the v coordinate mixes u into itself and admits no closed form here
        if A.kind != "u-interval" or B.kind != "u-interval":
            raise NoClosedFormError(
                "skew correlations have closed forms only for u-interval sets"
            )
        return _interval_overlap_mod1(_exact_u_shift(spec, i), A.a, A.b, B.a, B.b)
    # product: u-factor and sequence factor evolve independently
    if A.kind == "u-interval" and B.kind == "u-interval":
        return _interval_overlap_mod1(_exact_u_shift(spec, i), A.a, A.b, B.a, B.b)
    if A.kind == "cylinder" and B.kind == "cylinder":
        return _merge_measure(spec.bernoulli, _shifted_cylinder(A.cylinder, i), B.cylinder)
    if A.kind == "product" and B.kind == "product":
        u_part = _interval_overlap_mod1(_exact_u_shift(spec, i), A.a, A.b, B.a, B.b)
        w_part = _merge_measure(
            spec.bernoulli, _shifted_cylinder(A.cylinder, i), B.cylinder
        )
        return u_part * w_part
    raise NoClosedFormError(
        "product correlations need matching u-interval, cylinder, or product sets"
    )


def correlation(
    spec: SystemSpec,
    A: TestSet,
    B: TestSet,
    i: int,
    mode: str = "exact",
    samples: int = 100_000,
    rng: Optional[np.random.Generator] = None,
) -> CorrelationPoint:
    """mu(S^i(A) cap B).

    ``mode="exact"`` uses closed forms (interval overlap on the rotation
    factor, constraint merging on the shift factor) and raises
    :class:`NoClosedFormError` where none exists.  ``mode="monte-carlo"``
    estimates E[1_A(x) 1_B(S^i x)] from a sample batch, which has the
    same value since the measure is preserved.
    """
    if i < 0:
        raise ValueError("i must be >= 0")
    if mode == "exact":
        value = _exact_correlation_value(spec, A, B, i)
        return CorrelationPoint(i=i, estimate=float(value), exact=True)
    if mode != "monte-carlo":
        raise ValueError(f"unknown mode {mode!r}")
    if rng is None:
        raise ValueError("monte-carlo mode needs an rng")
    width = _window_for(spec, A, B, i, samples)
    batch = sample_batch(spec, rng, samples, window_half_width=width)
    in_a = A.contains_batch(spec, batch)
    in_b = B.contains_batch(spec, iterate_batch(batch, i))
    hits = in_a & in_b
    p_hat = float(np.mean(hits))
    stderr = math.sqrt(max(p_hat * (1.0 - p_hat), 0.0) / samples)
    return CorrelationPoint(i=i, estimate=p_hat, exact=False, stderr=stderr)


def _window_for(spec: SystemSpec, A: TestSet, B: TestSet, i: int, samples: int) -> int:
    positions = [0]
    for ts in (A, B):
        if ts.cylinder is not None:
            positions.extend(abs(p) for p in ts.cylinder.positions)
    width = max(positions) + abs(i) + 1
    if spec.kind in ("bernoulli", "product") and samples * (2 * width + 1) > 2 * 10**8:
        raise ValueError(
            "sampled sequence windows would exceed memory at this lag; "
            "use exact mode or reduce the lag/sample count"
        )
    return width


# ---------------------------------------------------------------------------
# weak mixing
# ---------------------------------------------------------------------------


def weak_mixing_statistic(
    spec: SystemSpec,
    A: TestSet,
    B: TestSet,
    t: int,
    mode: str = "exact",
    samples: int = 100_000,
    rng: Optional[np.random.Generator] = None,
) -> float:
    """The finite-t Cesaro average (1/t) sum_{i<t} |mu(S^i A cap B) - mu(A)mu(B)|.

    In exact mode every term is computed in exact arithmetic and only the
    running sum is a float.  In monte-carlo mode one batch is drawn and
    reused across lags; the estimate stays consistent because each lag's
    indicator mean is unbiased.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    if mode == "exact":
        product = A.exact_measure(spec) * B.exact_measure(spec)
        total = 0.0
        for i in range(t):
            value = _exact_correlation_value(spec, A, B, i) - product
            sign = value < 0
            total += -float(value) if sign else float(value)
        return total / t
    if mode != "monte-carlo":
        raise ValueError(f"unknown mode {mode!r}")
    if rng is None:
        raise ValueError("monte-carlo mode needs an rng")
    width = _window_for(spec, A, B, t, samples)
    batch = sample_batch(spec, rng, samples, window_half_width=width)
    in_a = A.contains_batch(spec, batch)
    product = float(A.exact_measure(spec) * B.exact_measure(spec))
    total = 0.0
    for i in range(t):
        in_b = B.contains_batch(spec, iterate_batch(batch, i))
        total += abs(float(np.mean(in_a & in_b)) - product)
    return total / t


def weak_mixing_verdict(statistic: float) -> str:
    """Map the finite-t statistic to a trend verdict (never the limit)."""
    if statistic < CONSISTENT_BELOW:
        return "consistent with weak mixing"
    if statistic > INCONSISTENT_ABOVE:
        return "inconsistent with weak mixing"
    return "inconclusive"


# ---------------------------------------------------------------------------
# spectral predicates
# ---------------------------------------------------------------------------


def spectral_weak_mixing_check(descriptor: SpectrumDescriptor) -> bool:
    """True iff the point part is exactly {1} and 1 is simple."""
    return len(descriptor.point_generators) == 0 and descriptor.point_part_simple


def spectral_ergodicity_check(descriptor: SpectrumDescriptor) -> bool:
    """True iff the proper value 1 is simple in the descriptor."""
    return descriptor.point_part_simple
