"""The adelic space of arithmeticoids: one local curve point per place of the field.

An arithmeticoid is stored sparsely: a finite map of deviations from the
standard point, plus a lazy global Frobenius shift (the shift multiplies every
finite Beltrami exponent by p^shift and is materialized per place on demand).
On top of the space: the L*-action, the unit (Lubin-Tate) action on concrete
layers, a metric, normalization coordinates, the product-formula hyperplane
and period map, and the toy mutation of Tate parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field, replace
from fractions import Fraction

from sympy import primerange

from .numfield import (
    FieldElement,
    InfiniteOrder,
    NumberField,
    Place,
    archimedean_place,
    ord as ord_at,
    places_over,
)
from .ffcurve import (
    LocalPoint,
    LocalPointArch,
    LocalPointNonArch,
    arch_act,
    frobenius_point,
    standard_point,
)
from .tilt import lubin_tate_act

DISTANCE_PREFIX = 60  # indices always summed; tail error < 2^-60


class AdelicError(ValueError):
    """Domain violation in the adelic space."""


# ---------------------------------------------------------------------------
# canonical place enumeration: archimedean first, then finite by (prime, conjugate)

_PLACE_CACHE: dict = {}


def canonical_place_list(field: NumberField, count: int) -> list[Place]:
    """The first `count` places in the canonical stable enumeration."""
    cached = _PLACE_CACHE.setdefault(field, [archimedean_place(field)])
    p = cached[-1].prime if not cached[-1].is_archimedean else 1
    while len(cached) < count:
        p = int(next(primerange(p + 1, 2 * p + 3)))
        cached.extend(places_over(field, p))
    return cached[:count]


def place_index(v: Place) -> int:
    """1-based position of a place in the canonical enumeration."""
    if v.is_archimedean:
        return 1
    n = 1
    for q in primerange(2, v.prime):
        n += len(places_over(v.field, int(q)))
    return n + 1 + v.conjugate_index


# ---------------------------------------------------------------------------
# arithmeticoids

@dataclass(frozen=True)
class Arithmeticoid:
    """A point of the adelic space: sparse deviations over the standard point.

    deviations holds only places whose local point differs from standard; the
    global Frobenius is kept as the lazy exponent frobenius_shift applied to
    every finite place on top of the stored data.
    """

    field: NumberField
    deviations: tuple = ()  # ((Place, LocalPoint), ...) canonically sorted
    frobenius_shift: int = 0
    label: str = ""

    def __post_init__(self):
        for v, pt in self.deviations:
            if v.field != self.field:
                raise AdelicError("deviation place from a different field")
            if v.is_archimedean != isinstance(pt, LocalPointArch):
                raise AdelicError("deviation point kind does not match its place")

    def deviation_map(self) -> dict:
        return dict(self.deviations)

    def component(self, v: Place) -> LocalPoint:
        """Materialize the local point at v, applying the lazy Frobenius shift."""
        pt = self.deviation_map().get(v)
        if pt is None:
            pt = standard_point(v)
        if v.is_archimedean:
            return pt  # phi_infinity is the identity
        if self.frobenius_shift:
            pt = frobenius_point(pt, self.frobenius_shift)
        return pt

    def support(self) -> list[Place]:
        return [v for v, _ in self.deviations]


def _sorted_deviations(entries: dict) -> tuple:
    return tuple(sorted(entries.items(), key=lambda kv: place_index(kv[0])))


def make_arithmeticoid(field: NumberField, deviations: dict | None = None,
                       frobenius_shift: int = 0, label: str = "") -> Arithmeticoid:
    """Normalize and prune: stored deviations must differ from the standard point."""
    entries = {}
    for v, pt in (deviations or {}).items():
        if pt != standard_point(v):
            entries[v] = pt
    return Arithmeticoid(field, _sorted_deviations(entries), frobenius_shift, label)


def standard_arithmeticoid(field: NumberField, label: str = "y0") -> Arithmeticoid:
    return Arithmeticoid(field, (), 0, label)


def deform(y: Arithmeticoid, v: Place, pt: LocalPoint, label: str | None = None) -> Arithmeticoid:
    """Replace the local component at v (pre-shift data), pruning standard points."""
    entries = y.deviation_map()
    if pt == standard_point(v):
        entries.pop(v, None)
    else:
        entries[v] = pt
    return Arithmeticoid(
        y.field, _sorted_deviations(entries), y.frobenius_shift,
        label if label is not None else y.label,
    )


# ---------------------------------------------------------------------------
# actions

def global_frobenius(y: Arithmeticoid, m: int = 1) -> Arithmeticoid:
    """phi^m at every finite place at once; archimedean components unchanged."""
    if m == 0:
        return y
    label = f"phi^{m}({y.label})" if y.label else ""
    return replace(y, frobenius_shift=y.frobenius_shift + m, label=label)


def divisor_support(x: FieldElement) -> list[tuple[Place, int]]:
    """All (place, ord) with nonzero order, from the norm's prime support."""
    from sympy import factorint

    if x.is_zero():
        raise InfiniteOrder("0 has no divisor")
    den = math.lcm(x.a.denominator, x.b.denominator)
    nrm = FieldElement(x.field, x.a * den, x.b * den).norm()
    primes = set(factorint(int(abs(nrm))).keys()) | set(factorint(den).keys())
    out = []
    for p in sorted(primes):
        for v in places_over(x.field, int(p)):
            o = ord_at(x, v)
            if o:
                out.append((v, o))
    return out


def lstar_act(x: FieldElement, y: Arithmeticoid) -> Arithmeticoid:
    """x acts by Frobenius^{ord_v(x)} at finite places and |x|_v at the archimedean one."""
    if x.field != y.field:
        raise AdelicError("element and arithmeticoid fields differ")
    if x.is_zero():
        raise AdelicError("L* action needs x != 0")
    entries = y.deviation_map()
    for v, o in divisor_support(x):
        base = entries.get(v, standard_point(v))
        moved = frobenius_point(base, o)
        if moved == standard_point(v):
            entries.pop(v, None)
        else:
            entries[v] = moved
    arch = archimedean_place(y.field)
    modulus = float(abs(x.norm()))  # Artin |x|_v at the (complex or real) place
    if modulus != 1.0:
        base = entries.get(arch, standard_point(arch))
        moved = arch_act(modulus, base)
        if moved == standard_point(arch):
            entries.pop(arch, None)
        else:
            entries[arch] = moved
    label = f"{x}.{y.label}" if y.label else ""
    return Arithmeticoid(y.field, _sorted_deviations(entries), y.frobenius_shift, label)


def stabilizer_check(x: FieldElement, y: Arithmeticoid) -> bool:
    """True iff x acts trivially: every ord vanishes and the archimedean modulus is 1.

    Decided exactly: the ord profile comes from the norm's prime support and the
    modulus is the exact rational |N(x)|.
    """
    if x.is_zero():
        raise AdelicError("stabilizer check needs x != 0")
    if abs(x.norm()) != 1:
        return False
    return not divisor_support(x)


def aut_act(units: dict, y: Arithmeticoid) -> Arithmeticoid:
    """Lubin-Tate unit action on concrete layers; Beltrami data never moves."""
    entries = y.deviation_map()
    for v, u in units.items():
        pt = entries.get(v)
        if pt is None or isinstance(pt, LocalPointArch) or pt.concrete is None:
            raise AdelicError(f"aut_act needs a concrete layer at {v}")
        entries[v] = LocalPointNonArch(v, pt.e, lubin_tate_act(u, pt.concrete))
    return Arithmeticoid(y.field, _sorted_deviations(entries), y.frobenius_shift, y.label)


# ---------------------------------------------------------------------------
# metric

def _per_place_distance(y1: Arithmeticoid, y2: Arithmeticoid, v: Place) -> float:
    a, b = y1.component(v), y2.component(v)
    if v.is_archimedean:
        return abs(math.log(a.s) - math.log(b.s))
    r = a.e / b.e
    return abs(math.log(r.numerator) - math.log(r.denominator))


def distance(y1: Arithmeticoid, y2: Arithmeticoid) -> float:
    """sum_n 2^-n d_n/(1+d_n) over the canonical enumeration.

    Deterministic truncation: the first DISTANCE_PREFIX indices are always
    summed, plus every index carrying an explicit deviation of either argument;
    the omitted tail is bounded by 2^-DISTANCE_PREFIX.
    """
    if y1.field != y2.field:
        raise AdelicError("distance needs a common field")
    indices = {place_index(v): v for v in y1.support()}
    indices.update({place_index(v): v for v in y2.support()})
    prefix = canonical_place_list(y1.field, DISTANCE_PREFIX)
    for n, v in enumerate(prefix, start=1):
        indices[n] = v
    total = 0.0
    for n in sorted(indices):
        d = _per_place_distance(y1, y2, indices[n])
        if d:
            total += 2.0 ** (-n) * d / (1.0 + d)
    return total


# ---------------------------------------------------------------------------
# normalization coordinates and the period map

@dataclass(frozen=True)
class NormalizationCoordinate:
    """Per-place exponents restoring the standard absolute values.

    alpha_v = (e_v f_v) / e at a finite place with Beltrami exponent e (exact
    Fraction, = 1 at the standard point) and 1/s at the archimedean place. The
    lazy Frobenius shift contributes p^-shift at every finite place; overrides
    hold the deviation places.
    """

    field: NumberField
    shift: int
    arch: float
    overrides: tuple  # ((Place, Fraction), ...)

    def at(self, v: Place):
        if v.is_archimedean:
            return self.arch
        for w, a in self.overrides:
            if w == v:
                return a
        return Fraction(v.prime) ** (-self.shift)


def normalization_coordinate(y: Arithmeticoid) -> NormalizationCoordinate:
    overrides = []
    arch = 1.0
    for v, pt in y.deviations:
        if v.is_archimedean:
            arch = 1.0 / pt.s
        else:
            shifted = frobenius_point(pt, y.frobenius_shift) if y.frobenius_shift else pt
            overrides.append((v, Fraction(v.e * v.f) / shifted.e))
    return NormalizationCoordinate(y.field, y.frobenius_shift, arch, tuple(overrides))


@dataclass(frozen=True)
class HyperplanePoint:
    """Projective class of a normalization-coordinate vector.

    Equality divides both vectors by their gauge (the first non-1 coordinate in
    canonical place order) and then compares: exact at finite places, 1e-12 at
    the archimedean one. Within the sparse-deviation class two vectors are
    projectively equal only with scalar 1, but the gauge convention is applied
    regardless.
    """

    coords: NormalizationCoordinate

    def _gauge(self):
        c = self.coords
        if c.arch != 1.0:
            return c.arch
        override_map = {place_index(v): a for v, a in c.overrides}
        if c.shift == 0:
            if not override_map:
                return Fraction(1)
            return override_map[min(override_map)]
        # shift rule: every finite coordinate differs from 1; the first finite
        # place in canonical order carries the gauge
        first = canonical_place_list(c.field, 2)[1]
        return override_map.get(place_index(first), Fraction(first.prime) ** (-c.shift))

    def __eq__(self, other) -> bool:
        if not isinstance(other, HyperplanePoint):
            return NotImplemented
        a, b = self.coords, other.coords
        if a.field != b.field or a.shift != b.shift:
            return False
        ga, gb = self._gauge(), other._gauge()
        if not math.isclose(a.arch / float(ga), b.arch / float(gb), rel_tol=0, abs_tol=1e-12):
            return False
        places = {place_index(v): v for v, _ in a.overrides}
        places.update({place_index(v): v for v, _ in b.overrides})
        for _, v in sorted(places.items()):
            xa, xb = a.at(v), b.at(v)
            if isinstance(ga, Fraction) and isinstance(gb, Fraction):
                if xa / ga != xb / gb:
                    return False
            elif not math.isclose(float(xa) / float(ga), float(xb) / float(gb),
                                  rel_tol=0, abs_tol=1e-12):
                return False
        # scalar consistency on the unlisted places: p^-shift / gauge must match
        return math.isclose(float(ga), float(gb), rel_tol=0, abs_tol=1e-12)

    def __hash__(self):
        return hash((self.coords.field, self.coords.shift))


def period_map(y: Arithmeticoid) -> HyperplanePoint:
    """The projective class of the alpha-vector; all-ones exactly at the standard point."""
    return HyperplanePoint(normalization_coordinate(y))


@dataclass(frozen=True)
class HyperplaneReport:
    """Exact finite parts and float residual of sum_v alpha_v log|x|_{K_{y_v}}."""

    finite_coefficients: dict  # prime -> exact coefficient of log p
    archimedean_term: float
    residual: float

    @property
    def exact(self) -> bool:
        return all(c == 0 for c in self.finite_coefficients.values())


def hyperplane_pairing(y: Arithmeticoid, x: FieldElement) -> HyperplaneReport:
    """Evaluate the hyperplane equation of Thm-style period data on x in L*.

    At a finite place the normalized value alpha_v log|x|_{K_y} is the exact
    Artin coefficient -f_v ord_v(x) of log p independent of the deformation;
    the archimedean term is (1/s) * s log|x|_std = log|N(x)|. The finite
    coefficients therefore cancel the archimedean prime content exactly.
    """
    from sympy import factorint

    if x.is_zero():
        raise AdelicError("hyperplane pairing needs x != 0")
    finite: dict[int, Fraction] = {}
    for v, o in divisor_support(x):
        e_beltrami = y.component(v).e
        alpha = Fraction(v.e * v.f) / e_beltrami
        curve_coeff = -(e_beltrami / v.e) * o  # log|x|_{K_y} = curve_coeff * log p
        finite[v.prime] = finite.get(v.prime, Fraction(0)) + alpha * curve_coeff
    nrm = abs(x.norm())
    arch_term = math.log(nrm.numerator) - math.log(nrm.denominator)  # (1/s)*(s log|x|_std)
    total = arch_term + sum(float(c) * math.log(p) for p, c in finite.items())
    # add back the norm's prime content to expose exact cancellation
    content: dict[int, Fraction] = dict(finite)
    for q, m in factorint(nrm.numerator).items():
        content[int(q)] = content.get(int(q), Fraction(0)) + m
    for q, m in factorint(nrm.denominator).items():
        content[int(q)] = content.get(int(q), Fraction(0)) - m
    return HyperplaneReport(content, arch_term, abs(total))


# ---------------------------------------------------------------------------
# toy mutation of Tate parameters

@dataclass(frozen=True)
class TateSymbol:
    """A formal Tate parameter carrying only its size: log|q| < 0 when admissible."""

    name: str
    log_abs: float


@dataclass(frozen=True)
class MutationEntry:
    name: str
    inverted: bool
    log_abs_before: float
    log_abs_after: float

    @property
    def admissible(self) -> bool:
        return self.log_abs_after < 0


@dataclass(frozen=True)
class MutationReport:
    entries: tuple
    inverted_count: int

    @property
    def flagged(self) -> tuple:
        return tuple(e for e in self.entries if not e.admissible)

    @property
    def fresh_parameters_required(self) -> bool:
        return bool(self.flagged)


def mutate_tate_parameters(params, independent_count: int) -> MutationReport:
    """sigma(q_j) = q_j^{-1} on the first `independent_count` symbols.

    Inverting a parameter with |q| < 1 lands outside the admissible disk, so
    every inverted symbol is flagged and the mutated curve demands a fresh
    parameter list.
    """
    params = list(params)
    r = independent_count
    if not 0 <= r <= len(params):
        raise AdelicError(f"independent_count {r} out of range 0..{len(params)}")
    for q in params:
        if not q.log_abs < 0:
            raise AdelicError(f"|{q.name}| >= 1 is not an admissible Tate parameter")
    entries = []
    for j, q in enumerate(params):
        if j < r:
            entries.append(MutationEntry(q.name, True, q.log_abs, -q.log_abs))
        else:
            entries.append(MutationEntry(q.name, False, q.log_abs, q.log_abs))
    return MutationReport(tuple(entries), r)


# ---------------------------------------------------------------------------
# serialization

def arithmeticoid_to_json(y: Arithmeticoid) -> dict:
    devs = []
    for v, pt in y.deviations:
        rec: dict = {"place": v.to_json()}
        if isinstance(pt, LocalPointArch):
            rec["s"] = pt.s
        else:
            rec["e"] = f"{pt.e.numerator}/{pt.e.denominator}"
            if pt.concrete is not None:
                rec["hahn"] = pt.concrete.to_json()
        devs.append(rec)
    return {
        "field": str(y.field),
        "label": y.label,
        "deviations": devs,
        "frobenius_shift": y.frobenius_shift,
    }


def arithmeticoid_from_json(data: dict) -> Arithmeticoid:
    from .tilt import DEFAULT_CAP, DEFAULT_K, hahn

    field = NumberField.parse(data["field"])
    entries = {}
    for rec in data.get("deviations", []):
        pj = rec["place"]
        if pj.get("prime") is None:
            v = archimedean_place(field)
            entries[v] = LocalPointArch(float(rec["s"]))
            continue
        v = Place(field, int(pj["prime"]), int(pj.get("e", 1)), int(pj.get("f", 1)),
                  int(pj.get("conjugate_index", 0)))
        concrete = None
        if "hahn" in rec:
            terms = {
                Fraction(t["exponent"]): tuple(t["coeff"])
                for t in rec["hahn"]
            }
            concrete = hahn(v.prime, terms, DEFAULT_CAP, DEFAULT_K)
        entries[v] = LocalPointNonArch(v, Fraction(rec["e"]), concrete)
    return make_arithmeticoid(field, entries, int(data.get("frobenius_shift", 0)),
                              str(data.get("label", "")))
