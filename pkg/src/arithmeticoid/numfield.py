"""Exact places, valuations, and absolute values over Q and imaginary quadratics.

Supported base fields are Q and Q(sqrt(-d)) for squarefree d > 0. Elements are
exact rational coordinates in the integral basis (1, omega), where
omega = (1 + sqrt(-d))/2 when d = 3 (mod 4) and omega = sqrt(-d) otherwise.
Finite absolute values are kept as exact rational exponents of log p; only the
archimedean contribution is floating point.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from sympy import factorint, primerange
from sympy.ntheory.residue_ntheory import sqrt_mod


class FieldError(ValueError):
    """Unsupported field kind or malformed element."""


class InfiniteOrder(ValueError):
    """Valuation requested for the zero element."""


def _squarefree(n: int) -> bool:
    for q, m in factorint(n).items():
        if m > 1:
            return False
    return True


_FIELD_RE = re.compile(r"^Q(?:\(sqrt\((-\d+)\)\))?$")


@dataclass(frozen=True)
class NumberField:
    """Q (d is None) or the imaginary quadratic field Q(sqrt(-d))."""

    d: int | None = None

    def __post_init__(self):
        if self.d is not None:
            if self.d <= 0:
                raise FieldError(f"need squarefree d > 0, got d = {self.d}")
            if not _squarefree(self.d):
                raise FieldError(f"d = {self.d} is not squarefree")

    @property
    def degree(self) -> int:
        return 1 if self.d is None else 2

    @property
    def discriminant(self) -> int:
        if self.d is None:
            return 1
        return -self.d if self.d % 4 == 3 else -4 * self.d

    @property
    def half_basis(self) -> bool:
        # omega = (1 + sqrt(-d))/2 exactly when d = 3 (mod 4)
        return self.d is not None and self.d % 4 == 3

    @property
    def omega_trace(self) -> int:
        return 1 if self.half_basis else 0

    @property
    def omega_norm(self) -> int:
        if self.d is None:
            return 0
        return (1 + self.d) // 4 if self.half_basis else self.d

    @classmethod
    def parse(cls, text: str) -> "NumberField":
        m = _FIELD_RE.match(text.strip())
        if not m:
            raise FieldError(f"cannot parse field {text!r}; expected Q or Q(sqrt(-d))")
        if m.group(1) is None:
            return cls(None)
        return cls(-int(m.group(1)))

    def element(self, a, b=0) -> "FieldElement":
        return FieldElement(self, Fraction(a), Fraction(b))

    def one(self) -> "FieldElement":
        return self.element(1)

    def zero(self) -> "FieldElement":
        return self.element(0)

    def omega(self) -> "FieldElement":
        if self.d is None:
            raise FieldError("Q has no quadratic generator")
        return self.element(0, 1)

    def __str__(self) -> str:
        return "Q" if self.d is None else f"Q(sqrt(-{self.d}))"


@dataclass(frozen=True)
class FieldElement:
    """a + b*omega with exact Fraction coordinates; b = 0 over Q."""

    field: NumberField
    a: Fraction
    b: Fraction

    def __post_init__(self):
        if self.field.d is None and self.b != 0:
            raise FieldError("Q element with nonzero omega coordinate")

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_one(self) -> bool:
        return self.a == 1 and self.b == 0

    def conjugate(self) -> "FieldElement":
        # omega-bar = trace(omega) - omega
        return FieldElement(self.field, self.a + self.b * self.field.omega_trace, -self.b)

    def norm(self) -> Fraction:
        if self.field.d is None:
            return self.a
        t, n = self.field.omega_trace, self.field.omega_norm
        return self.a * self.a + self.a * self.b * t + self.b * self.b * n

    def trace(self) -> Fraction:
        if self.field.d is None:
            return self.a
        return 2 * self.a + self.b * self.field.omega_trace

    def __add__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(self.field, self.a + other.a, self.b + other.b)

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(self.field, self.a - other.a, self.b - other.b)

    def __neg__(self) -> "FieldElement":
        return FieldElement(self.field, -self.a, -self.b)

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        t, n = self.field.omega_trace, self.field.omega_norm
        # omega^2 = t*omega - n
        a = self.a * other.a - self.b * other.b * n
        b = self.a * other.b + self.b * other.a + self.b * other.b * t
        return FieldElement(self.field, a, b)

    def inverse(self) -> "FieldElement":
        if self.is_zero():
            raise ZeroDivisionError("inverse of 0")
        if self.field.d is None:
            return FieldElement(self.field, 1 / self.a, Fraction(0))
        nrm = self.norm()
        c = self.conjugate()
        return FieldElement(self.field, c.a / nrm, c.b / nrm)

    def __truediv__(self, other: "FieldElement") -> "FieldElement":
        return self * other.inverse()

    def __pow__(self, k: int) -> "FieldElement":
        if k < 0:
            return self.inverse() ** (-k)
        out = self.field.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def as_complex(self) -> complex:
        if self.field.d is None:
            return complex(self.a)
        t = self.field.omega_trace
        omega = complex(t / 2, math.sqrt(-self.field.discriminant) / 2)
        return complex(self.a) + complex(self.b) * omega

    def _check(self, other: "FieldElement"):
        if self.field != other.field:
            raise FieldError("mixed-field arithmetic")

    @classmethod
    def parse(cls, field: NumberField, text: str) -> "FieldElement":
        """Parse "a" or "a,b" with rational a, b (coordinates in the integral basis)."""
        parts = [s.strip() for s in text.split(",")]
        if len(parts) == 1:
            return field.element(Fraction(parts[0]))
        if len(parts) == 2:
            return field.element(Fraction(parts[0]), Fraction(parts[1]))
        raise FieldError(f"cannot parse element {text!r}")

    def __str__(self) -> str:
        if self.field.d is None or self.b == 0:
            return str(self.a)
        sign, mag = ("+", self.b) if self.b > 0 else ("-", -self.b)
        w = "w" if mag == 1 else f"{mag}*w"
        if self.a == 0:
            return w if sign == "+" else f"-{w}"
        return f"{self.a}{sign}{w}"


@dataclass(frozen=True)
class Place:
    """A place of the field: prime is None at the archimedean place.

    For a split rational prime the two places above it carry
    conjugate_index 0 and 1, ordered by the smaller root of the minimal
    polynomial of omega mod p.
    """

    field: NumberField
    prime: int | None
    e: int = 1
    f: int = 1
    conjugate_index: int = 0

    @property
    def is_archimedean(self) -> bool:
        return self.prime is None

    @property
    def local_degree(self) -> int:
        return self.e * self.f

    def to_json(self) -> dict:
        return {
            "prime": self.prime,
            "e": self.e,
            "f": self.f,
            "conjugate_index": self.conjugate_index,
        }

    def __str__(self) -> str:
        if self.is_archimedean:
            return "v_inf"
        tag = "'" * self.conjugate_index
        return f"v{self.prime}{tag}"


def archimedean_place(field: NumberField) -> Place:
    # local degree over R: 1 for Q, 2 for the complex place
    return Place(field, None, 1, field.degree, 0)


def splitting_type(field: NumberField, p: int) -> str:
    if field.d is None:
        return "rational"
    D = field.discriminant
    if D % p == 0:
        return "ramified"
    if p == 2:
        return "split" if D % 8 == 1 else "inert"
    return "split" if pow(D, (p - 1) // 2, p) == 1 else "inert"


def places_over(field: NumberField, p: int) -> tuple[Place, ...]:
    kind = splitting_type(field, p)
    if kind == "rational":
        return (Place(field, p, 1, 1, 0),)
    if kind == "ramified":
        return (Place(field, p, 2, 1, 0),)
    if kind == "inert":
        return (Place(field, p, 1, 2, 0),)
    return (Place(field, p, 1, 1, 0), Place(field, p, 1, 1, 1))


def places_up_to(field: NumberField, bound: int) -> list[Place]:
    """The archimedean place plus every finite place over a rational prime <= bound."""
    if bound < 2:
        raise FieldError(f"bound must be >= 2, got {bound}")
    out = [archimedean_place(field)]
    for p in primerange(2, bound + 1):
        out.extend(places_over(field, int(p)))
    return out


@lru_cache(maxsize=None)
def _split_roots(field: NumberField, p: int) -> tuple[int, int]:
    """The two roots of the minimal polynomial of omega mod p, ascending."""
    t, n = field.omega_trace, field.omega_norm
    if p == 2:
        roots = sorted(r for r in (0, 1) if (r * r - t * r + n) % 2 == 0)
    else:
        s = sqrt_mod(field.discriminant, p)
        inv2 = pow(2, -1, p)
        roots = sorted({(t + s) * inv2 % p, (t - s) * inv2 % p})
    if len(roots) != 2:
        raise FieldError(f"{p} does not split in {field}")
    return roots[0], roots[1]


def _hensel_root(field: NumberField, p: int, index: int, k: int) -> int:
    """Lift the chosen root of m_omega to a root mod p^k (Newton doubling)."""
    t, n = field.omega_trace, field.omega_norm
    r = _split_roots(field, p)[index]
    prec, mod = 1, p
    while prec < k:
        prec = min(2 * prec, k)
        mod = p ** prec
        deriv = (2 * r - t) % mod
        r = (r - (r * r - t * r + n) * pow(deriv, -1, mod)) % mod
    return r


def _int_valuation(n: int, p: int) -> int:
    if n == 0:
        raise InfiniteOrder("valuation of 0")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def ord(x: FieldElement, v: Place) -> int:
    """Normalized additive valuation at a finite place: ord(uniformizer) = 1."""
    if v.is_archimedean:
        raise FieldError("ord is defined at finite places only")
    if x.is_zero():
        raise InfiniteOrder("0 has infinite order at every place")
    p = v.prime
    den = math.lcm(x.a.denominator, x.b.denominator)
    u = int(x.a * den)
    w = int(x.b * den)
    shift = -v.e * _int_valuation(den, p)
    if x.field.d is None:
        return shift + _int_valuation(u, p)
    kind = splitting_type(x.field, p)
    if kind == "inert":
        if u == 0:
            return shift + _int_valuation(w, p)
        if w == 0:
            return shift + _int_valuation(u, p)
        return shift + min(_int_valuation(u, p), _int_valuation(w, p))
    norm_val = _int_valuation(int(FieldElement(x.field, Fraction(u), Fraction(w)).norm()), p)
    if kind == "ramified":
        return shift + norm_val
    # split: evaluate u + w*r at the Hensel root for this conjugate index
    k = norm_val + 1
    r = _hensel_root(x.field, p, v.conjugate_index, k)
    t = (u + w * r) % (p ** k)
    if t == 0:
        raise FieldError("split valuation exceeded its norm bound")  # unreachable for x != 0
    return shift + _int_valuation(t, p)


@dataclass(frozen=True)
class LogAbs:
    """log|x|_v in the Artin normalization.

    Finite places store the exact coefficient of log p; the archimedean place
    stores only the float value (coeff and prime are None there).
    """

    coeff: Fraction | None
    prime: int | None
    value: float

    def __float__(self) -> float:
        return self.value


def _log_fraction(q: Fraction) -> float:
    return math.log(q.numerator) - math.log(q.denominator)


def standard_abs(x: FieldElement, v: Place) -> LogAbs:
    """log|x|_v: |x|_v = |N(x)|_p at finite v, |N_{L_v/R}(x)| at the archimedean place."""
    if x.is_zero():
        raise InfiniteOrder("|0|_v is not defined")
    if v.is_archimedean:
        nrm = abs(x.norm())
        return LogAbs(None, None, _log_fraction(nrm))
    c = Fraction(-v.f * ord(x, v))
    return LogAbs(c, v.prime, float(c) * math.log(v.prime))


@dataclass(frozen=True)
class ProductFormulaReport:
    finite_exponent_sums: dict  # prime -> exact coefficient of log p over all v | p
    norm_exponents: dict        # prime -> ord_p of |N(x)|, exact
    archimedean_log: float
    residual: float

    @property
    def exact(self) -> bool:
        # finite sums must cancel the archimedean coefficients prime by prime
        keys = set(self.finite_exponent_sums) | set(self.norm_exponents)
        return all(
            self.finite_exponent_sums.get(p, Fraction(0)) == -self.norm_exponents.get(p, Fraction(0))
            for p in keys
        )


def product_formula_check(x: FieldElement) -> ProductFormulaReport:
    """Sum log|x|_v over all places; exact prime-by-prime cancellation plus a float residual."""
    if x.is_zero():
        raise InfiniteOrder("product formula needs x != 0")
    nrm = abs(x.norm())
    norm_exponents: dict[int, Fraction] = {}
    for q, m in factorint(nrm.numerator).items():
        norm_exponents[int(q)] = norm_exponents.get(int(q), Fraction(0)) + m
    for q, m in factorint(nrm.denominator).items():
        norm_exponents[int(q)] = norm_exponents.get(int(q), Fraction(0)) - m
    finite_sums: dict[int, Fraction] = {}
    for p in sorted(norm_exponents):
        total = Fraction(0)
        for v in places_over(x.field, p):
            total += standard_abs(x, v).coeff
        finite_sums[p] = total
    arch = standard_abs(x, archimedean_place(x.field)).value
    residual = abs(arch + sum(float(c) * math.log(p) for p, c in finite_sums.items()))
    return ProductFormulaReport(finite_sums, norm_exponents, arch, residual)


def roots_of_unity(field: NumberField) -> list[FieldElement]:
    """The exact torsion subgroup of L*."""
    one = field.one()
    if field.d == 1:
        i = field.omega()
        return [one, -one, i, -i]
    if field.d == 3:
        w = field.omega()  # primitive sixth root: w^2 = w - 1
        return [one, -one, w, -w, w - one, one - w]
    return [one, -one]
