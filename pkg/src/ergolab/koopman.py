"""Koopman operators on character bases, symbolically.

The composition operator of each system acts on a countable basis by
permuting indices and multiplying by unimodular constants:

* skew, on ``g[k,m](u,v) = e(k u) e(m v)`` (``e(x) = exp(2 pi i x)``):
  ``U g[k,m] = e(k gamma) g[k+m, m]``
* rotation, on ``e(k u)``: multiplication by ``e(k gamma)``
* shift, on an orthonormal family ``d[k,m]`` (chain m, position k):
  ``X d[k,m] = d[k+1, m]``
* product, on ``p[l,k,m] = e(l u) d[k,m]``:
  ``V p[l,k,m] = e(l gamma) p[l, k+1, m]``

Everything here stays symbolic: a phase is a rational turn plus an
integer multiple of gamma, and the angle's numeric value is only needed
for reporting.  Renormalizing the chain bases (``f[k,m]`` on the skew
side, ``t[l,k,m]`` on the product side) makes every chain step phase-free,
which is what the explicit intertwiner between the two systems pairs up.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, NamedTuple, Optional, Sequence

from .quadratic import ExactnessError, RotationNumber, integral_combination
from .systems import SystemSpec

__all__ = [
    "FourierMode",
    "GroupComparison",
    "IncompatibleSpectraError",
    "IntertwinerCheck",
    "IntertwinerPairing",
    "Orbit",
    "Phase",
    "PhasedMode",
    "ProductBasisIndex",
    "SpectrumDescriptor",
    "build_intertwiner",
    "is_one_simple",
    "koopman_apply_product",
    "koopman_apply_skew",
    "koopman_apply_skew_inverse",
    "koopman_apply_skew_normalized",
    "normalizing_phase",
    "orbit_decompose",
    "point_spectrum_groups_equal",
    "proper_modes_of_skew",
    "spectrum_of",
    "verify_intertwiner",
]

INFINITE = "infinite"


@dataclass(frozen=True)
class Phase:
    """The unimodular constant ``e((turn) + (gamma_mult) * gamma)``.

    ``turn`` is an exact rational number of turns, stored reduced to
    [0, 1); ``gamma_mult`` counts copies of the (symbolic) angle gamma.
    Phases form a group under multiplication and equality is exact.
    """

    turn: Fraction = Fraction(0)
    gamma_mult: int = 0

    def __post_init__(self) -> None:
        t = Fraction(self.turn)
        object.__setattr__(self, "turn", t - (t.numerator // t.denominator))

    @classmethod
    def one(cls) -> "Phase":
        return cls()

    @classmethod
    def from_turn(cls, turn) -> "Phase":
        return cls(turn=Fraction(turn))

    @classmethod
    def from_gamma(cls, mult: int) -> "Phase":
        return cls(gamma_mult=mult)

    @property
    def is_one(self) -> bool:
        return self.turn == 0 and self.gamma_mult == 0

    def __mul__(self, other: "Phase") -> "Phase":
        if not isinstance(other, Phase):
            return NotImplemented
        return Phase(self.turn + other.turn, self.gamma_mult + other.gamma_mult)

    def inverse(self) -> "Phase":
        return Phase(-self.turn, -self.gamma_mult)

    def value(self, gamma: Optional[RotationNumber] = None) -> complex:
        """Numeric unit complex number; needs gamma when gamma_mult != 0."""
        angle = float(self.turn)
        if self.gamma_mult:
            if gamma is None:
                raise ValueError("gamma_mult != 0 requires an angle to evaluate")
            if gamma.is_exact:
                angle += float(gamma.frac_multiple(self.gamma_mult))
            else:
                angle += self.gamma_mult * gamma.to_float()
        return cmath.exp(2j * cmath.pi * angle)

    def to_json(self) -> dict:
        return {
            "turn": [self.turn.numerator, self.turn.denominator],
            "gamma_mult": self.gamma_mult,
        }

    def __str__(self) -> str:
        if self.is_one:
            return "1"
        bits = []
        if self.turn:
            bits.append(f"{self.turn}")
        if self.gamma_mult:
            bits.append(f"{self.gamma_mult}g")
        return "e(" + "+".join(bits) + ")"


class FourierMode(NamedTuple):
    """Index of the torus character e(k u + m v)."""

    k: int
    m: int


class PhasedMode(NamedTuple):
    phase: Phase
    mode: FourierMode


class ProductBasisIndex(NamedTuple):
    """Index of ``e(l u)`` (tail None) or ``e(l u) d[k,m]`` (tail (k, m))."""

    l: int
    tail: Optional[tuple[int, int]] = None

    @property
    def is_constant_tail(self) -> bool:
        return self.tail is None


# ---------------------------------------------------------------------------
# symbolic operator actions
# ---------------------------------------------------------------------------


def koopman_apply_skew(mode: FourierMode) -> PhasedMode:
    """U g[k,m] = e(k gamma) g[k+m, m]; symbolic in gamma."""
    k, m = mode
    return PhasedMode(Phase.from_gamma(k), FourierMode(k + m, m))


def koopman_apply_skew_inverse(mode: FourierMode) -> PhasedMode:
    k, m = mode
    return PhasedMode(Phase.from_gamma(-(k - m)), FourierMode(k - m, m))


def normalizing_phase(k: int, m: int) -> Phase:
    """The constant ``a[k,m]`` with ``f[k,m] = a[k,m] g[k,m]`` and
    ``U f[k,m] = f[k+m,m]``.

    The functional equation ``a[k+m,m] = e(k gamma) a[k,m]`` pins the
    whole chain once one member is fixed; we anchor ``a[r,m] = 1`` at the
    chain representative ``r = k mod |m|``.  Walking j steps from the
    anchor multiplies the phases ``e((r + t m) gamma)`` for t < j, giving
    the exponent ``j r + m j (j - 1) / 2`` (an integer for every j).
    """
    if m == 0:
        raise ValueError("m = 0 rows are proper modes; no normalization applies")
    r = k % abs(m)
    j = (k - r) // m
    return Phase.from_gamma(j * r + m * (j * (j - 1) // 2))


def koopman_apply_skew_normalized(mode: FourierMode) -> PhasedMode:
    """Action on the f-basis: chain steps are phase-free."""
    k, m = mode
    if m == 0:
        return PhasedMode(Phase.from_gamma(k), mode)
    return PhasedMode(Phase.one(), FourierMode(k + m, m))


def koopman_apply_product(
    index: ProductBasisIndex, normalized: bool = False
) -> tuple[Phase, ProductBasisIndex]:
    """V on the product basis.

    Raw: ``V p[l,k,m] = e(l gamma) p[l,k+1,m]``.  With ``normalized``
    the t-basis ``t[l,k,m] = e(l k gamma) p[l,k,m]`` is used instead and
    chain steps carry phase exactly 1.  Constant tails are proper
    functions either way: phase ``e(l gamma)``, index unchanged.
    """
    l, tail = index
    if tail is None:
        return Phase.from_gamma(l), index
    k, m = tail
    phase = Phase.one() if normalized else Phase.from_gamma(l)
    return phase, ProductBasisIndex(l, (k + 1, m))


# ---------------------------------------------------------------------------
# orbit structure of a truncation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Orbit:
    """One orbit of basis indices under the Koopman index map.

    ``kind`` is "fixed" (a proper mode, with its proper value) or
    "chain".  Chain members are listed in operator order; ``partial``
    marks chains cut by the truncation boundary.
    """

    kind: str
    label: tuple
    members: tuple
    phase: Optional[Phase] = None
    partial: bool = False


def orbit_decompose(truncation: int, kind: str) -> list[Orbit]:
    """All orbits of the basis indices with coordinates in
    ``[-truncation, truncation]``.

    Every orbit is either a fixed index (point spectrum) or a free chain
    (Lebesgue part); cycles of length > 1 never occur, which is exactly
    why finite combinations over chain rows cannot be proper functions.
    """
    if truncation < 0:
        raise ValueError("truncation must be >= 0")
    B = truncation
    orbits: list[Orbit] = []
    if kind == "rotation":
        for k in range(-B, B + 1):
            orbits.append(
                Orbit("fixed", ("point", k), (k,), phase=Phase.from_gamma(k))
            )
        return orbits
    if kind == "skew":
        for k in range(-B, B + 1):
            orbits.append(
                Orbit(
                    "fixed",
                    ("point", k),
                    (FourierMode(k, 0),),
                    phase=Phase.from_gamma(k),
                )
            )
        for m in _signed_range(1, B):
            for r in range(abs(m)):
                ks = [k for k in range(-B, B + 1) if k % abs(m) == r]
                members = tuple(
                    FourierMode(k, m) for k in sorted(ks, key=lambda k: (k - r) // m)
                )
                orbits.append(
                    Orbit("chain", ("chain", m, r), members, partial=True)
                )
        return orbits
    if kind == "bernoulli":
        orbits.append(Orbit("fixed", ("point", 0), ("const",), phase=Phase.one()))
        for m in range(-B, B + 1):
            members = tuple((k, m) for k in range(-B, B + 1))
            orbits.append(Orbit("chain", ("chain", m), members, partial=True))
        return orbits
    if kind == "product":
        for l in range(-B, B + 1):
            orbits.append(
                Orbit(
                    "fixed",
                    ("point", l),
                    (ProductBasisIndex(l, None),),
                    phase=Phase.from_gamma(l),
                )
            )
        for l in range(-B, B + 1):
            for m in range(-B, B + 1):
                members = tuple(
                    ProductBasisIndex(l, (k, m)) for k in range(-B, B + 1)
                )
                orbits.append(
                    Orbit("chain", ("chain", l, m), members, partial=True)
                )
        return orbits
    raise ValueError(f"unknown system kind {kind!r}")


def _signed_range(lo: int, hi: int) -> Iterator[int]:
    for a in range(lo, hi + 1):
        yield a
        yield -a


def proper_modes_of_skew(truncation: int) -> list[tuple[FourierMode, Phase]]:
    """The complete point spectrum of the skew within a truncation.

    Returns the modes (k, 0) with proper value e(k gamma), after
    certifying from the orbit decomposition that every other orbit is a
    free chain (no repeats, no cycles), so no finite combination over
    m != 0 rows is a proper function.
    """
    out = []
    for orbit in orbit_decompose(truncation, "skew"):
        if orbit.kind == "fixed":
            out.append((orbit.members[0], orbit.phase))
        else:
            members = orbit.members
            if len(set(members)) != len(members):
                raise AssertionError(f"orbit {orbit.label} revisits an index")
            for a, b in zip(members, members[1:]):
                if koopman_apply_skew(a).mode != b:
                    raise AssertionError(f"orbit {orbit.label} is not a chain")
    return out


# ---------------------------------------------------------------------------
# spectra
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpectrumDescriptor:
    """Point part (group generators, simplicity) plus Lebesgue multiplicity.

    The tag is forced by the parts: no Lebesgue part means pure-point,
    a trivial simple point part means pure-continuous, anything else is
    mixed.
    """

    point_generators: tuple[RotationNumber, ...]
    lebesgue_multiplicity: object  # 0, a positive int, or INFINITE
    one_multiplicity: int = 1
    tag: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        mult = self.lebesgue_multiplicity
        if mult != INFINITE and (not isinstance(mult, int) or mult < 0):
            raise ValueError(f"bad Lebesgue multiplicity {mult!r}")
        if not isinstance(self.one_multiplicity, int) or self.one_multiplicity < 1:
            raise ValueError("the proper value 1 has multiplicity >= 1")
        expected = self._expected_tag()
        if self.tag and self.tag != expected:
            raise ValueError(
                f"tag {self.tag!r} inconsistent with parts (expected {expected!r})"
            )
        object.__setattr__(self, "tag", expected)

    def _expected_tag(self) -> str:
        if self.lebesgue_multiplicity == 0:
            return "pure-point"
        if not self.point_generators and self.point_part_simple:
            return "pure-continuous"
        return "mixed"

    @property
    def point_part_simple(self) -> bool:
        """Is the proper value 1 simple?  Requires both declared
        multiplicity one and no integer combination of generators
        collapsing onto an integer."""
        return self.one_multiplicity == 1 and is_one_simple(self.point_generators)

    def point_values(self, bound: int) -> list[Phase]:
        """Proper values of the generated group with multiples in
        [-bound, bound] (single-generator descriptors only)."""
        if not self.point_generators:
            return [Phase.one()]
        if len(self.point_generators) > 1:
            raise NotImplementedError("enumeration for multi-generator groups")
        return [Phase.from_gamma(k) for k in range(-bound, bound + 1)]

    def to_json(self) -> dict:
        return {
            "point_generators": [g.to_json() for g in self.point_generators],
            "point_part_simple": self.point_part_simple,
            "one_multiplicity": self.one_multiplicity,
            "lebesgue_multiplicity": self.lebesgue_multiplicity,
            "tag": self.tag,
        }


def is_one_simple(generators: Sequence[RotationNumber], bound: int = 8) -> bool:
    """Is the proper value 1 simple for the given point-spectrum generators?

    1 fails to be simple iff some nontrivial integer combination of the
    generators is an integer; searched exactly for coefficients up to
    ``bound``.  A single irrational generator never produces one, so the
    search is skipped (this also covers decimal angles, which are
    irrational by contract).
    """
    gens = list(generators)
    if len(gens) <= 1:
        return True
    if any(not g.is_exact for g in gens):
        raise ExactnessError("simplicity search needs exact generators")

    def combos(i: int, coeffs: list[int]) -> Iterator[list[int]]:
        if i == len(gens):
            if any(coeffs):
                yield coeffs
            return
        for c in range(-bound, bound + 1):
            yield from combos(i + 1, coeffs + [c])

    for coeffs in combos(0, []):
        if integral_combination(list(zip(gens, coeffs))):
            return False
    return True


def spectrum_of(spec: SystemSpec) -> SpectrumDescriptor:
    """The Koopman spectral invariants of a system.

    rotation: pure point, group generated by gamma, all values simple.
    skew/product: the same point part plus countable Lebesgue spectrum.
    bernoulli: only the constant, plus countable Lebesgue spectrum.
    """
    if spec.kind == "rotation":
        return SpectrumDescriptor((spec.gamma,), 0)
    if spec.kind in ("skew", "product"):
        return SpectrumDescriptor((spec.gamma,), INFINITE)
    if spec.kind == "bernoulli":
        return SpectrumDescriptor((), INFINITE)
    raise ValueError(f"unknown system kind {spec.kind!r}")


# ---------------------------------------------------------------------------
# point-spectrum group comparison (exact)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GroupComparison:
    equal: bool
    relation: Optional[tuple[int, int]]  # (a, b): g2 = a g1, g1 = b g2 (mod 1)
    detail: str

    @property
    def verdict(self) -> str:
        return "equal" if self.equal else "not-equal-within-bound"


def point_spectrum_groups_equal(
    gamma1: RotationNumber, gamma2: RotationNumber, bound: int = 64
) -> GroupComparison:
    """Do gamma1 and gamma2 generate the same subgroup of R/Z?

    Searches exactly for integers |a|, |b| <= bound with
    ``gamma2 = a*gamma1 (mod 1)`` and ``gamma1 = b*gamma2 (mod 1)``;
    both must exist for equality (and then a*b = 1 since the angles are
    irrational, i.e. gamma2 = +/- gamma1 mod 1).  Refuses inexact angles.
    """
    if not (gamma1.is_exact and gamma2.is_exact):
        raise ExactnessError("group comparison requires exact angles")
    if bound < 1:
        raise ValueError("bound must be positive")

    def member(target: RotationNumber, gen: RotationNumber) -> Optional[int]:
        for a in range(1, bound + 1):
            for s in (a, -a):
                if integral_combination([(gen, s), (target, -1)]):
                    return s
        return None

    a = member(gamma2, gamma1)
    b = member(gamma1, gamma2) if a is not None else None
    if a is not None and b is not None:
        return GroupComparison(True, (a, b), f"gamma2 = {a}*gamma1 (mod 1)")
    return GroupComparison(
        False, None, f"no multiplier within |a| <= {bound} in one direction or both"
    )


# ---------------------------------------------------------------------------
# the intertwiner
# ---------------------------------------------------------------------------


class IncompatibleSpectraError(ValueError):
    """The two systems' spectral invariants do not match."""


@dataclass
class IntertwinerPairing:
    """A basis pairing realizing a unitary W with U = W* V W on a truncation.

    Labels name the *normalized* bases: ``("point", k)`` for proper
    modes and ``("chain", chain_label, position)`` for Lebesgue chains
    (f-basis on the skew side, t-basis on the product side, d-basis for
    a shift).  ``mapping`` sends side-A labels to side-B labels;
    ``eps`` is the sign relating the two angles (gammaB = eps * gammaA
    mod 1).  The chain enumeration orders are recorded so the arbitrary
    relabeling choice is reproducible.
    """

    spec_a: SystemSpec
    spec_b: SystemSpec
    truncation: int
    eps: int
    mapping: dict
    chain_order_a: tuple
    chain_order_b: tuple

    def to_json(self) -> dict:
        return {
            "system_a": self.spec_a.to_json(),
            "system_b": self.spec_b.to_json(),
            "truncation": self.truncation,
            "eps": self.eps,
            "pairs": [[list(k), list(v)] for k, v in sorted(self.mapping.items())],
            "chain_order_a": [list(c) for c in self.chain_order_a],
            "chain_order_b": [list(c) for c in self.chain_order_b],
        }


@dataclass(frozen=True)
class IntertwinerCheck:
    mismatches: int
    max_phase_residual: float
    checked: int


def _chain_labels(spec: SystemSpec, B: int) -> list[tuple]:
    """Canonical enumeration of Lebesgue chain labels within truncation B."""
    if spec.kind == "skew":
        out = []
        for m in _signed_range(1, B):
            for r in range(abs(m)):
                out.append(("chain", m, r))
        return out
    if spec.kind == "product":
        labels = [
            ("chain", l, m) for l in range(-B, B + 1) for m in range(-B, B + 1)
        ]
        labels.sort(key=lambda c: (max(abs(c[1]), abs(c[2])), c[1], c[2]))
        return labels
    if spec.kind == "bernoulli":
        return [("chain", m) for m in [0] + list(_signed_range(1, B))]
    if spec.kind == "rotation":
        return []
    raise ValueError(spec.kind)


def _chain_positions(spec: SystemSpec, label: tuple, B: int) -> list[int]:
    """Operator-order positions of a chain that fall inside the truncation."""
    if spec.kind == "skew":
        _, m, r = label
        return sorted((k - r) // m for k in range(-B, B + 1) if k % abs(m) == r)
    return list(range(-B, B + 1))


def _point_label_range(spec: SystemSpec, B: int) -> list[int]:
    if spec.kind == "bernoulli":
        return [0]
    return list(range(-B, B + 1))


def label_step(label: tuple) -> tuple[Phase, tuple]:
    """One Koopman step on a normalized basis label.

    Point modes are fixed with phase e(k gamma); chain positions advance
    by one with phase exactly 1.  (For a Bernoulli system k is 0 and the
    phase is 1.)
    """
    if label[0] == "point":
        return Phase.from_gamma(label[1]), label
    head, pos = label[:-1], label[-1]
    return Phase.one(), head + (pos + 1,)


def build_intertwiner(
    spec_a: SystemSpec, spec_b: SystemSpec, truncation: int
) -> IntertwinerPairing:
    """Pair the normalized bases of two spectrally compatible systems.

    Point modes are matched by proper value (k maps to eps*k); chains
    are matched in canonical enumeration order, position to position.
    Raises :class:`IncompatibleSpectraError` when the descriptors differ
    structurally (different point groups or Lebesgue multiplicities).
    """
    if truncation < 0:
        raise ValueError("truncation must be >= 0")
    da, db = spectrum_of(spec_a), spectrum_of(spec_b)
    if da.lebesgue_multiplicity != db.lebesgue_multiplicity:
        raise IncompatibleSpectraError(
            f"Lebesgue multiplicities differ: {da.lebesgue_multiplicity} "
            f"vs {db.lebesgue_multiplicity}"
        )
    eps = 1
    if len(da.point_generators) != len(db.point_generators):
        raise IncompatibleSpectraError("point spectra differ in rank")
    if da.point_generators:
        ga, gb = da.point_generators[0], db.point_generators[0]
        cmp = point_spectrum_groups_equal(ga, gb, bound=max(64, truncation))
        if not cmp.equal:
            raise IncompatibleSpectraError(
                f"point-spectrum groups differ within bound: {cmp.detail}"
            )
        eps = cmp.relation[0]
        if abs(eps) != 1:  # irrational angles force a*b = 1
            raise AssertionError("group equality with |a| != 1 is impossible")

    mapping: dict = {}
    for k in _point_label_range(spec_a, truncation):
        kb = eps * k
        if abs(kb) <= truncation:
            mapping[("point", k)] = ("point", kb)

    chains_a = _chain_labels(spec_a, truncation)
    chains_b = _chain_labels(spec_b, truncation)
    for ca, cb in zip(chains_a, chains_b):
        pos_a = _chain_positions(spec_a, ca, truncation)
        pos_b = set(_chain_positions(spec_b, cb, truncation))
        for j in pos_a:
            if j in pos_b:
                mapping[ca + (j,)] = cb + (j,)
    return IntertwinerPairing(
        spec_a=spec_a,
        spec_b=spec_b,
        truncation=truncation,
        eps=eps,
        mapping=mapping,
        chain_order_a=tuple(chains_a),
        chain_order_b=tuple(chains_b),
    )


def _phases_match(pa: Phase, pb: Phase, eps: int) -> bool:
    # A-side phases reference gammaA, B-side phases gammaB = eps*gammaA
    # (mod 1), so the values agree iff turns agree and multipliers agree
    # after the sign twist.
    return pa.turn == pb.turn and pa.gamma_mult == eps * pb.gamma_mult


def verify_intertwiner(
    pairing: IntertwinerPairing, truncation: Optional[int] = None
) -> IntertwinerCheck:
    """Check U = W* V W on every interior index of the pairing, exactly.

    An index is interior when its Koopman image is still paired; chain
    ends at the truncation boundary are skipped.  Returns the number of
    mismatched images or phases, the largest numeric phase discrepancy,
    and how many indices were checked.
    """
    B = pairing.truncation if truncation is None else truncation
    if B > pairing.truncation:
        raise ValueError(
            f"pairing was built at truncation {pairing.truncation} < {B}"
        )
    mapping = pairing.mapping
    gamma_a = pairing.spec_a.gamma
    mismatches = 0
    max_residual = 0.0
    checked = 0
    for la, lb in mapping.items():
        pa, la_next = label_step(la)
        if la_next not in mapping:
            continue  # boundary of a truncated chain
        checked += 1
        pb, lb_next = label_step(lb)
        ok = mapping[la_next] == lb_next and _phases_match(pa, pb, pairing.eps)
        if not ok:
            mismatches += 1
            try:
                va = pa.value(gamma_a)
                vb = pb.value(pairing.spec_b.gamma)
                max_residual = max(max_residual, abs(va - vb))
            except ValueError:
                max_residual = max(max_residual, 2.0)
    return IntertwinerCheck(mismatches, max_residual, checked)
