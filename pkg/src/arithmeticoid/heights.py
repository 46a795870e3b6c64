"""Deformation-dependent heights, degrees, and the monoid bookkeeping behind them.

The height of a projective point against an arithmeticoid y is a sum of local
terms.  At a finite place the term is alpha_v * log|x|_{K_y}; both factors move
with the local Beltrami exponent but their product collapses to the rigid
Artin value -f_v * ord_v(x) * log p, which we keep as an exact Fraction
coefficient of log p.  At the archimedean place the raw pairing s * log|x| is
used without dividing the normalization back out, so archimedean deformations
are visible to the height (this is what makes the stabilized height a strict
improvement for suitable samples).  With s = 1 the raw pairing equals the
normalized one and the classical product-formula invariance holds on the nose.

Also here: arithmetic degrees of ideloids, the divisor monoids (integral,
perfected, realified) with Frobenius pullback, inversion of the modular
j-expansion to recover a Tate parameter p-adically, and the norm comparison
of Teichmueller lifts against two local points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from itertools import combinations_with_replacement

from .numfield import (
    FieldElement,
    NumberField,
    Place,
    archimedean_place,
    _log_fraction,
)
from .ffcurve import LocalPointArch, LocalPointNonArch, curve_log_abs
from .adelic import (
    Arithmeticoid,
    divisor_support,
    lstar_act,
    place_index,
)
from .padic import PadicScalar

J_DATA_RESOURCE = "data/j_qexp.txt"
J_DATA_MAX_N = 64  # shipped coefficient range


class HeightError(ValueError):
    pass


# ---------------------------------------------------------------------------
# projective points

@dataclass(frozen=True)
class ProjectivePoint:
    """Homogeneous coordinates over the field; at least one must be nonzero."""

    field: NumberField
    coords: tuple

    def __post_init__(self):
        if not self.coords:
            raise HeightError("projective point needs coordinates")
        for x in self.coords:
            if x.field != self.field:
                raise HeightError("coordinate from a different field")
        if all(x.is_zero() for x in self.coords):
            raise HeightError("all coordinates vanish")

    def scale(self, lam: FieldElement) -> "ProjectivePoint":
        if lam.is_zero():
            raise HeightError("scaling by zero")
        return ProjectivePoint(self.field, tuple(x * lam for x in self.coords))

    def __str__(self) -> str:
        return "(" + " : ".join(str(x) for x in self.coords) + ")"


def projective_point(field: NumberField, *coords) -> ProjectivePoint:
    elts = tuple(x if isinstance(x, FieldElement) else field.element(Fraction(x))
                 for x in coords)
    return ProjectivePoint(field, elts)


# ---------------------------------------------------------------------------
# height reports

@dataclass(frozen=True)
class FiniteTerm:
    """One finite place's share: contribution = alpha * log_scale * log(prime)."""

    place: Place
    alpha: Fraction      # normalization coordinate at the place
    log_scale: Fraction  # log|x|_{K_y} = log_scale * log(prime), best coordinate

    @property
    def coefficient(self) -> Fraction:
        return self.alpha * self.log_scale

    @property
    def value(self) -> float:
        return float(self.coefficient) * math.log(self.place.prime)


@dataclass(frozen=True)
class ArchTerm:
    s: float
    log_abs: float  # best coordinate's log|x| at the standard metric

    @property
    def value(self) -> float:
        # raw pairing; equals alpha * log|x| only when s = 1
        return self.s * self.log_abs


@dataclass(frozen=True)
class HeightReport:
    label: str
    finite: tuple          # FiniteTerm entries, canonical place order
    archimedean: ArchTerm

    @property
    def total(self) -> float:
        return sum(t.value for t in self.finite) + self.archimedean.value

    def finite_coefficient(self, p: int) -> Fraction:
        """Exact coefficient of log p summed over the places above p."""
        return sum((t.coefficient for t in self.finite if t.place.prime == p),
                   Fraction(0))

    def to_csv(self) -> str:
        lines = ["place,alpha,log_abs,contribution"]
        for t in self.finite:
            lines.append(f"{t.place},{t.alpha},{t.log_scale}*log({t.place.prime})"
                         f",{t.value:.17g}")
        a = self.archimedean
        alpha = 1.0 / a.s
        lines.append(f"v_inf,{alpha:.17g},{a.log_abs:.17g},{a.value:.17g}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "finite": [
                {
                    "place": str(t.place),
                    "alpha": str(t.alpha),
                    "log_scale": str(t.log_scale),
                    "value": t.value,
                }
                for t in self.finite
            ],
            "archimedean": {"s": self.archimedean.s,
                            "log_abs": self.archimedean.log_abs,
                            "value": self.archimedean.value},
            "total": self.total,
        }


def height(y: Arithmeticoid, point: ProjectivePoint) -> HeightReport:
    """Per-place best coordinate, summed; finite parts exact, archimedean raw.

    Places where every coordinate is a unit contribute 0 and are omitted from
    the report.  Zero coordinates are skipped (their local size is -infinity).
    """
    if y.field != point.field:
        raise HeightError("point and arithmeticoid fields differ")
    nonzero = [x for x in point.coords if not x.is_zero()]
    support = {}
    for x in nonzero:
        for v, o in divisor_support(x):
            support.setdefault(v, {})[id(x)] = o
    terms = []
    for v in sorted(support, key=place_index):
        pt = y.component(v)
        alpha = Fraction(v.local_degree) / pt.e
        best = max(curve_log_abs(Fraction(support[v].get(id(x), 0)), v.e, pt.e)
                   for x in nonzero)
        terms.append(FiniteTerm(v, alpha, best))
    arch = y.component(archimedean_place(y.field))
    log_abs = max(_log_fraction(abs(x.norm())) for x in nonzero)
    return HeightReport(
        label=f"h_{y.label or 'y'}{point}",
        finite=tuple(terms),
        archimedean=ArchTerm(arch.s, log_abs),
    )


def scalar_height(y: Arithmeticoid, z: FieldElement) -> HeightReport:
    """Height of (1 : z); the constant coordinate clamps every local term at 0."""
    return height(y, ProjectivePoint(y.field, (y.field.one(), z)))


def stabilized_height(y: Arithmeticoid, z: FieldElement, sample=None) -> float:
    """sup over the sampled L*-orbit of y; 1 is always adjoined, so this
    dominates the plain height and is reported as a lower bound for the sup."""
    if sample is None:
        sample = default_sample(y.field)
    best = scalar_height(y, z).total
    for a in sample:
        if a.is_zero():
            raise HeightError("sample elements must be nonzero")
        if abs(a.norm()) == 1 and not divisor_support(a):
            continue  # acts trivially
        best = max(best, scalar_height(lstar_act(a, y), z).total)
    return best


def stabilized_height_report(y: Arithmeticoid, z: FieldElement, sample=None):
    """(value, witness) version; witness None means the orbit point y itself."""
    if sample is None:
        sample = default_sample(y.field)
    best, witness = scalar_height(y, z).total, None
    for a in sample:
        t = scalar_height(lstar_act(a, y), z).total
        if t > best:
            best, witness = t, a
    return best, witness


def default_sample(field: NumberField, max_factors: int = 3, prime_bound: int = 50):
    """-1 and all products of up to max_factors factors p or 1/p, p <= prime_bound."""
    from sympy import primerange

    gens = []
    for p in primerange(2, prime_bound + 1):
        gens.append(Fraction(p))
        gens.append(Fraction(1, p))
    seen = {Fraction(1), Fraction(-1)}
    for k in range(1, max_factors + 1):
        for combo in combinations_with_replacement(gens, k):
            prod = Fraction(1)
            for g in combo:
                prod *= g
            seen.add(prod)
            seen.add(-prod)
    return [field.element(q) for q in sorted(seen, key=lambda q: (q.denominator, q))]


# ---------------------------------------------------------------------------
# ideloids and arithmetic degree

@dataclass(frozen=True)
class Ideloid:
    """Finitely supported idele-class datum: exact orders at finite places plus
    a real log-modulus at the archimedean one."""

    field: NumberField
    entries: tuple = ()      # ((Place, Fraction order, unit tag), ...)
    arch_log: float = 0.0

    def __post_init__(self):
        for v, o, _tag in self.entries:
            if v.field != self.field or v.is_archimedean:
                raise HeightError("ideloid entries live at finite places of the field")
            if o == 0:
                raise HeightError("ideloid entries must have nonzero order")


def make_ideloid(field: NumberField, orders: dict | None = None,
                 arch_log: float = 0.0) -> Ideloid:
    entries = tuple(sorted(
        ((v, Fraction(o), "1") for v, o in (orders or {}).items() if o != 0),
        key=lambda t: place_index(t[0])))
    return Ideloid(field, entries, arch_log)


def ideloid_from_element(x: FieldElement) -> Ideloid:
    return make_ideloid(x.field, dict(divisor_support(x)),
                        _log_fraction(abs(x.norm())))


def ideloid_mul(a: Ideloid, b: Ideloid) -> Ideloid:
    if a.field != b.field:
        raise HeightError("ideloid fields differ")
    orders = {v: o for v, o, _ in a.entries}
    for v, o, _ in b.entries:
        orders[v] = orders.get(v, Fraction(0)) + o
    return make_ideloid(a.field, orders, a.arch_log + b.arch_log)


@dataclass(frozen=True)
class DegreeReport:
    finite: tuple        # ((prime, Fraction coefficient of log p), ...)
    archimedean: float

    @property
    def total(self) -> float:
        return (sum(float(c) * math.log(p) for p, c in self.finite)
                + self.archimedean)


def arithmetic_degree(y: Arithmeticoid, ideal: Ideloid) -> DegreeReport:
    """Sum of alpha_v * log|x_v| over the support.  The finite part collapses
    to -f_v * order * log p, so the degree descends along the L* action."""
    if y.field != ideal.field:
        raise HeightError("ideloid and arithmeticoid fields differ")
    by_prime = {}
    for v, o, _tag in ideal.entries:
        pt = y.component(v)
        alpha = Fraction(v.local_degree) / pt.e
        coeff = alpha * curve_log_abs(o, v.e, pt.e)
        by_prime[v.prime] = by_prime.get(v.prime, Fraction(0)) + coeff
    finite = tuple((p, c) for p, c in sorted(by_prime.items()) if c != 0)
    return DegreeReport(finite, ideal.arch_log)


# ---------------------------------------------------------------------------
# divisor monoids

MODES = ("integer", "perfection", "real")


@dataclass(frozen=True)
class Frobenioid:
    """Descriptor for the divisor monoid over the field in one of three value
    regimes: integral exponents, p-power-divided exponents, real exponents."""

    field: NumberField
    mode: str

    def __post_init__(self):
        if self.mode not in MODES:
            raise HeightError(f"unknown monoid mode {self.mode!r}")

    def element(self, exponents: dict) -> "FrobenioidElement":
        entries = []
        for v, c in exponents.items():
            if v.field != self.field or v.is_archimedean:
                raise HeightError("exponents live at finite places of the field")
            c = self._check_value(v, c)
            if c != 0:
                entries.append((v, c))
        entries.sort(key=lambda t: place_index(t[0]))
        return FrobenioidElement(self, tuple(entries))

    def _check_value(self, v: Place, c):
        if self.mode == "real":
            c = float(c)
            if c < 0:
                raise HeightError("negative exponent")
            return c
        c = Fraction(c)
        if c < 0:
            raise HeightError("negative exponent")
        if self.mode == "integer":
            if c.denominator != 1:
                raise HeightError("integral monoid requires integer exponents")
        else:  # perfection: denominators are powers of the residue prime
            den = c.denominator
            while den % v.prime == 0:
                den //= v.prime
            if den != 1:
                raise HeightError(
                    f"perfection at {v} only divides by powers of {v.prime}")
        return c


@dataclass(frozen=True)
class FrobenioidElement:
    monoid: Frobenioid
    entries: tuple  # ((Place, exponent), ...) nonzero, canonical order

    def exponent(self, v: Place):
        for w, c in self.entries:
            if w == v:
                return c
        return Fraction(0) if self.monoid.mode != "real" else 0.0

    def is_identity(self) -> bool:
        return not self.entries


def frobenioid_of(field: NumberField) -> Frobenioid:
    return Frobenioid(field, "integer")


def frobenioid_of_arithmeticoid(y: Arithmeticoid) -> Frobenioid:
    # deformation erases no divisors but perfects the exponent lattice
    return Frobenioid(y.field, "perfection")


def perfection(m: Frobenioid) -> Frobenioid:
    if m.mode == "real":
        raise HeightError("realified monoid has no further perfection")
    return Frobenioid(m.field, "perfection")


def realify(m: Frobenioid) -> Frobenioid:
    return Frobenioid(m.field, "real")


def monoid_map(elt: FrobenioidElement, target: Frobenioid) -> FrobenioidElement:
    """Push exponents along integer -> perfection -> real; injective on entries."""
    if target.field != elt.monoid.field:
        raise HeightError("monoid fields differ")
    order = {m: i for i, m in enumerate(MODES)}
    if order[target.mode] < order[elt.monoid.mode]:
        raise HeightError("no map back toward the integral monoid")
    return target.element(dict(elt.entries))


def frobenioid_add(a: FrobenioidElement, b: FrobenioidElement) -> FrobenioidElement:
    if a.monoid != b.monoid:
        raise HeightError("cannot add across monoids")
    exps = dict(a.entries)
    for v, c in b.entries:
        exps[v] = exps.get(v, 0) + c
    return a.monoid.element(exps)


def frobenius_pullback(elt: FrobenioidElement, m: int = 1) -> FrobenioidElement:
    """Divide each exponent by p^m (p the residue prime of its place)."""
    if m < 0:
        raise HeightError("pullback exponent must be >= 0")
    exps = {}
    for v, c in elt.entries:
        if elt.monoid.mode == "real":
            exps[v] = c / v.prime ** m
        else:
            exps[v] = Fraction(c, v.prime ** m)
    return elt.monoid.element(exps)


def principal_divisor(x: FieldElement) -> tuple:
    """Signed divisor of x in the group completion: +1 at a simple zero."""
    if x.is_zero():
        raise HeightError("0 has no divisor")
    return tuple(divisor_support(x))


# ---------------------------------------------------------------------------
# the modular j-expansion and its inversion

def _poly_mul_trunc(a: list, b: list, n: int) -> list:
    out = [0] * n
    for i, ai in enumerate(a):
        if ai == 0 or i >= n:
            continue
        for j, bj in enumerate(b):
            if i + j >= n:
                break
            out[i + j] += ai * bj
    return out


@lru_cache(maxsize=None)
def j_expansion_coefficients(n_max: int) -> tuple:
    """Exact integers c_n with j(q) = sum c_n q^n over n >= -1, computed from
    the weight-4 Eisenstein series cubed over the discriminant product."""
    from sympy import divisor_sigma

    n = n_max + 2  # track q^0 .. q^{n-1} of q*j
    e4 = [1] + [240 * int(divisor_sigma(k, 3)) for k in range(1, n)]
    num = _poly_mul_trunc(_poly_mul_trunc(e4, e4, n), e4, n)
    den = [1] + [0] * (n - 1)
    for k in range(1, n):
        factor = [0] * n
        for i in range(0, 25):
            if i * k >= n:
                break
            factor[i * k] = (-1) ** i * math.comb(24, i)
        den = _poly_mul_trunc(den, factor, n)
    inv = [1] + [0] * (n - 1)
    for m in range(1, n):
        inv[m] = -sum(den[i] * inv[m - i] for i in range(1, m + 1))
    series = _poly_mul_trunc(num, inv, n)
    return tuple((k - 1, series[k]) for k in range(n))


def write_j_data(path, n_max: int = J_DATA_MAX_N):
    """Regenerate the shipped coefficient table."""
    lines = [
        "# q-expansion of the modular j-invariant: j(q) = sum over n >= -1 of c_n q^n.",
        "# Computed exactly as E4(q)^3 / Delta(q) with E4 = 1 + 240 sum sigma_3(k) q^k",
        "# and Delta = q prod (1 - q^k)^24; regenerate with",
        "# arithmeticoid.heights.write_j_data.  Lines are 'n c_n'.",
    ]
    for k, c in j_expansion_coefficients(n_max):
        lines.append(f"{k} {c}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_j_coefficients(path=None) -> dict:
    """Parse 'n c_n' lines; '#' starts a comment.  Defaults to the shipped table."""
    if path is None:
        text = (resources.files("arithmeticoid") / J_DATA_RESOURCE).read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    out = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        n_str, c_str = line.split()
        out[int(n_str)] = int(c_str)
    if out.get(-1) != 1:
        raise HeightError("coefficient table must start with the simple pole")
    return out


def tate_j_value(q: PadicScalar, coeffs: dict) -> PadicScalar:
    """Evaluate the expansion at a parameter of positive valuation."""
    if q.val <= 0:
        raise HeightError("expansion needs |q| < 1, so positive valuation")
    total = q.inverse()
    total = total + PadicScalar.from_fraction(coeffs.get(0, 744), q.p, q.prec)
    n = 1
    while n * q.val <= q.abs_precision:
        c = coeffs.get(n)
        if c is None:
            raise HeightError(
                f"coefficient table too short: need c_{n} at this precision")
        total = total + PadicScalar.from_fraction(c, q.p, q.prec) * q ** n
        n += 1
    return total


def invert_j_series(p: int, j_value, precision: int, coeff_path=None) -> PadicScalar:
    """Solve j(q) = j for q with v_p(q) = -v_p(j) > 0.

    Fixed point of q -> 1/(j - c_0 - sum_{n>=1} c_n q^n), contracting because
    the correction terms sit at strictly positive valuation.  Requires
    v_p(j) < 0; an integral j lies outside the regime this expansion inverts.
    """
    if precision < 1:
        raise HeightError("precision must be >= 1")
    coeffs = load_j_coefficients(coeff_path)
    rel = precision + 4
    j = PadicScalar.from_fraction(Fraction(j_value), p, rel)
    if j.is_zero() or j.val >= 0:
        raise HeightError("j must have negative valuation (pole of the expansion)")
    k = -j.val
    c0 = PadicScalar.from_fraction(coeffs.get(0, 744), p, rel)
    q = j.inverse()
    for _ in range(64):
        tail = None
        n = 1
        while n * k <= q.abs_precision:
            c = coeffs.get(n)
            if c is None:
                raise HeightError(
                    f"coefficient table too short: need c_{n} at this precision")
            term = PadicScalar.from_fraction(c, p, rel) * q ** n
            tail = term if tail is None else tail + term
            n += 1
        d = j - c0 if tail is None else j - c0 - tail
        q_next = d.inverse()
        if q_next.agrees_with(q, k + precision):
            # claim only the digits the fixed point has actually verified
            return q_next.truncated(k + precision)
        q = q_next
    raise HeightError("series inversion did not stabilize")


# ---------------------------------------------------------------------------
# Teichmueller lift comparison

@dataclass(frozen=True)
class LiftComparison:
    """Norms of one multiplicative lift against two local points: the lift of a
    value of valuation t has size p^{-e*t} at a point of Beltrami exponent e."""

    prime: int
    exponents: tuple  # (Fraction, Fraction): norm_i = p^{-exponents[i]}

    @property
    def norms(self) -> tuple:
        return tuple(float(self.prime) ** float(-c) for c in self.exponents)

    @property
    def equal(self) -> bool:
        return self.exponents[0] == self.exponents[1]


def compare_teichmueller_lifts(x_valuation, y1: LocalPointNonArch,
                               y2: LocalPointNonArch) -> LiftComparison:
    if isinstance(y1, LocalPointArch) or isinstance(y2, LocalPointArch):
        raise HeightError("lift comparison is a finite-place construction")
    if y1.place != y2.place:
        raise HeightError("the two points must sit over the same place")
    t = Fraction(x_valuation)
    return LiftComparison(y1.place.prime, (y1.e * t, y2.e * t))
