"""Characteristic-p perfectoid model: Hahn series over F_{p^k} with rational exponents.

Elements are finite sorted exponent-to-coefficient maps below an exact rational
precision cap. The coefficient field is F_{p^k} (default k = 12) realized as
polynomial residues mod a deterministically chosen irreducible, so p-th roots
exist and Frobenius is exactly invertible. On top of the series field: the
Artin-Hasse exponential, the Lubin-Tate unit action on 1 + m, Teichmueller
lifts, and Witt vectors of length <= 3 via universal sum/product polynomials
solved once from ghost components.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

DEFAULT_K = 12
DEFAULT_CAP = Fraction(64)


class TiltError(ValueError):
    """Domain violation in the characteristic-p model."""


# ---------------------------------------------------------------------------
# coefficient field F_{p^k}

def _poly_trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mulmod(a, b, f, p):
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    # reduce mod monic f
    k = len(f) - 1
    for i in range(len(out) - 1, k - 1, -1):
        c = out[i]
        if c:
            out[i] = 0
            for j in range(k):
                out[i - k + j] = (out[i - k + j] - c * f[j]) % p
    return _poly_trim(out)


def _poly_powmod(a, e, f, p):
    result = [1]
    base = list(a)
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, f, p)
        base = _poly_mulmod(base, base, f, p)
        e >>= 1
    return result


def _poly_gcd(a, b, p):
    a, b = list(a), list(b)
    while b:
        # a mod b with b made monic
        inv = pow(b[-1], -1, p)
        b = [(c * inv) % p for c in b]
        while len(a) >= len(b):
            c = a[-1]
            if c:
                for j in range(len(b)):
                    a[len(a) - len(b) + j] = (a[len(a) - len(b) + j] - c * b[j]) % p
            a.pop()
            _poly_trim(a)
            if not a:
                break
        a, b = b, a
    return a


def _is_irreducible(f, p):
    k = len(f) - 1
    x = [0, 1]
    x_red = _poly_powmod(x, 1, f, p)  # x reduced mod f (differs for k = 1)
    if _poly_powmod(x, p ** k, f, p) != x_red:
        return False
    for q in {d for d in (2, 3, 5, 7, 11) if k % d == 0}:
        h = _poly_powmod(x, p ** (k // q), f, p)
        diff = list(h)
        while len(diff) < 2:
            diff.append(0)
        diff[1] = (diff[1] - 1) % p
        g = _poly_gcd(f, _poly_trim(diff), p)
        if len(g) - 1 > 0:
            return False
    return True


@lru_cache(maxsize=None)
def coeff_field(p: int, k: int = DEFAULT_K) -> "CoeffField":
    return CoeffField(p, k)


class CoeffField:
    """F_{p^k} as residues mod the first irreducible monic of degree k.

    Elements are coefficient tuples of length k (little-endian); the modulus is
    found by scanning constant-first, so the choice is deterministic.
    """

    def __init__(self, p: int, k: int):
        if p < 2 or k < 1:
            raise TiltError(f"bad coefficient field parameters p={p}, k={k}")
        self.p = p
        self.k = k
        self.modulus = self._find_modulus()
        self.zero = (0,) * k
        self.one = tuple([1] + [0] * (k - 1))

    def _find_modulus(self):
        p, k = self.p, self.k
        c = 0
        while True:
            digits, n = [], c
            for _ in range(k):
                n, r = divmod(n, p)
                digits.append(r)
            f = digits + [1]
            if _is_irreducible(f, p):
                return f
            c += 1
            if c > p ** k:
                raise TiltError("no irreducible modulus found")  # unreachable

    def _pad(self, a):
        return tuple(list(a) + [0] * (self.k - len(a)))

    def from_int(self, c: int):
        return self._pad([c % self.p])

    def add(self, a, b):
        return tuple((x + y) % self.p for x, y in zip(a, b))

    def neg(self, a):
        return tuple((-x) % self.p for x in a)

    def mul(self, a, b):
        return self._pad(_poly_mulmod(_poly_trim(list(a)), _poly_trim(list(b)), self.modulus, self.p))

    def pow(self, a, e: int):
        if e < 0:
            return self.pow(self.inv(a), -e)
        return self._pad(_poly_powmod(_poly_trim(list(a)), e, self.modulus, self.p))

    def inv(self, a):
        if a == self.zero:
            raise ZeroDivisionError("inverse of 0 in F_{p^k}")
        return self.pow(a, self.p ** self.k - 2)

    def pth_root(self, a):
        # x -> x^p is bijective; the inverse is x -> x^(p^(k-1))
        return self.pow(a, self.p ** (self.k - 1))


# ---------------------------------------------------------------------------
# Hahn series

@dataclass(frozen=True)
class HahnSeries:
    """Finite-support series sum c_e t^e, exponents rational and below cap."""

    p: int
    k: int
    terms: tuple  # ((Fraction exponent, coeff tuple), ...) strictly increasing
    cap: Fraction

    @property
    def field(self) -> CoeffField:
        return coeff_field(self.p, self.k)

    def is_zero(self) -> bool:
        return not self.terms

    def valuation(self) -> Fraction | None:
        """Least exponent, or None for the (truncation-)zero series."""
        return self.terms[0][0] if self.terms else None

    def leading(self):
        if not self.terms:
            raise TiltError("zero series has no leading term")
        return self.terms[0]

    def coefficient(self, e) -> tuple:
        e = Fraction(e)
        for a, c in self.terms:
            if a == e:
                return c
        return self.field.zero

    def to_json(self) -> list:
        return [
            {"exponent": f"{a.numerator}/{a.denominator}", "coeff": list(c)}
            for a, c in self.terms
        ]

    def __add__(self, other):
        return hahn_add(self, other)

    def __sub__(self, other):
        return hahn_add(self, hahn_neg(other))

    def __mul__(self, other):
        return hahn_mul(self, other)

    def __neg__(self):
        return hahn_neg(self)

    def __str__(self):
        if not self.terms:
            return f"O(t^{self.cap})"
        bits = []
        for a, c in self.terms:
            cs = str(list(c)) if any(x for x in c[1:]) else str(c[0])
            bits.append(f"{cs}*t^({a})")
        return " + ".join(bits) + f" + O(t^{self.cap})"


def _check_compatible(x: HahnSeries, y: HahnSeries):
    if x.p != y.p or x.k != y.k:
        raise TiltError("mixed coefficient fields")


def hahn(p: int, terms: dict, cap=DEFAULT_CAP, k: int = DEFAULT_K) -> HahnSeries:
    """Normalize a {exponent: coeff} map: drop zeros and over-cap terms, sort."""
    fld = coeff_field(p, k)
    cap = Fraction(cap)
    norm = []
    for e, c in terms.items():
        e = Fraction(e)
        if isinstance(c, int):
            c = fld.from_int(c)
        if c != fld.zero and e < cap:
            norm.append((e, tuple(c)))
    norm.sort(key=lambda t: t[0])
    return HahnSeries(p, k, tuple(norm), cap)


def hahn_zero(p: int, cap=DEFAULT_CAP, k: int = DEFAULT_K) -> HahnSeries:
    return hahn(p, {}, cap, k)


def hahn_one(p: int, cap=DEFAULT_CAP, k: int = DEFAULT_K) -> HahnSeries:
    return hahn(p, {Fraction(0): 1}, cap, k)


def monomial(p: int, exponent, coeff=1, cap=DEFAULT_CAP, k: int = DEFAULT_K) -> HahnSeries:
    return hahn(p, {Fraction(exponent): coeff}, cap, k)


def hahn_add(x: HahnSeries, y: HahnSeries) -> HahnSeries:
    _check_compatible(x, y)
    fld = x.field
    cap = min(x.cap, y.cap)
    acc = dict(x.terms)
    for e, c in y.terms:
        acc[e] = fld.add(acc.get(e, fld.zero), c)
    return hahn(x.p, acc, cap, x.k)


def hahn_neg(x: HahnSeries) -> HahnSeries:
    fld = x.field
    return HahnSeries(x.p, x.k, tuple((e, fld.neg(c)) for e, c in x.terms), x.cap)


def hahn_scale(x: HahnSeries, c) -> HahnSeries:
    fld = x.field
    if isinstance(c, int):
        c = fld.from_int(c)
    if c == fld.zero:
        return hahn_zero(x.p, x.cap, x.k)
    return hahn(x.p, {e: fld.mul(a, c) for e, a in x.terms}, x.cap, x.k)


def _val_or_cap(x: HahnSeries) -> Fraction:
    v = x.valuation()
    return v if v is not None else x.cap


def hahn_mul(x: HahnSeries, y: HahnSeries) -> HahnSeries:
    _check_compatible(x, y)
    fld = x.field
    cap = min(x.cap + _val_or_cap(y), y.cap + _val_or_cap(x))
    acc: dict = {}
    for ex, cx in x.terms:
        for ey, cy in y.terms:
            e = ex + ey
            if e >= cap:
                continue
            c = fld.mul(cx, cy)
            prev = acc.get(e)
            acc[e] = fld.add(prev, c) if prev is not None else c
    return hahn(x.p, acc, cap, x.k)


def hahn_pow(x: HahnSeries, n: int) -> HahnSeries:
    if n < 0:
        return hahn_pow(hahn_inv(x), -n)
    if n == 0:
        return hahn_one(x.p, x.cap, x.k)
    out, base = None, x
    while True:
        if n & 1:
            out = base if out is None else hahn_mul(out, base)
        n >>= 1
        if not n:
            return out
        base = hahn_mul(base, base)


def hahn_inv(x: HahnSeries) -> HahnSeries:
    """Geometric-series inverse off the leading term, truncated at the cap."""
    if x.is_zero():
        raise ZeroDivisionError("inverse of the zero series")
    fld = x.field
    a, c = x.leading()
    cinv = fld.inv(c)
    # x = c t^a (1 + u), val(u) > 0
    rel_cap = x.cap - a
    u_terms = {e - a: fld.mul(cc, cinv) for e, cc in x.terms[1:]}
    u = hahn(x.p, u_terms, rel_cap, x.k)
    geo = hahn_one(x.p, rel_cap, x.k)
    if not u.is_zero():
        term = hahn_one(x.p, rel_cap, x.k)
        step = hahn_neg(u)
        vu = u.valuation()
        n = 1
        while n * vu < rel_cap:
            term = hahn_mul(term, step)
            if term.is_zero():
                break
            geo = hahn_add(geo, term)
            n += 1
    out = {e - a: fld.mul(cc, cinv) for e, cc in geo.terms}
    return hahn(x.p, out, x.cap - 2 * a, x.k)


def hahn_eq(x: HahnSeries, y: HahnSeries) -> bool:
    """Equality of all terms below the common precision cap."""
    _check_compatible(x, y)
    cap = min(x.cap, y.cap)
    tx = tuple((e, c) for e, c in x.terms if e < cap)
    ty = tuple((e, c) for e, c in y.terms if e < cap)
    return tx == ty


def frobenius(x: HahnSeries) -> HahnSeries:
    fld = x.field
    return HahnSeries(
        x.p, x.k,
        tuple((e * x.p, fld.pow(c, x.p)) for e, c in x.terms),
        x.cap * x.p,
    )


def inverse_frobenius(x: HahnSeries) -> HahnSeries:
    fld = x.field
    return HahnSeries(
        x.p, x.k,
        tuple((e / x.p, fld.pth_root(c)) for e, c in x.terms),
        x.cap / x.p,
    )


# ---------------------------------------------------------------------------
# Artin-Hasse exponential as a Z_p coefficient series

@dataclass(frozen=True)
class ZpSeries:
    """sum c_n T^n with c_n held as residues mod p^precision."""

    p: int
    precision: int
    max_degree: int
    coeffs: tuple  # c_0 .. c_max_degree, ints in [0, p^precision)

    def coefficient(self, n: int) -> int:
        return self.coeffs[n]


def _exact_artin_hasse(p: int, max_degree: int) -> list:
    """Exact rational coefficients of exp(sum T^{p^i}/p^i) through max_degree."""
    D = max_degree
    arg = [Fraction(0)] * (D + 1)
    q = 1
    while q <= D:
        arg[q] = Fraction(1, q)
        q *= p
    out = [Fraction(0)] * (D + 1)
    out[0] = Fraction(1)
    term = [Fraction(0)] * (D + 1)
    term[0] = Fraction(1)
    for m in range(1, D + 1):
        nxt = [Fraction(0)] * (D + 1)
        for i, ti in enumerate(term):
            if ti:
                for j in range(1, D + 1 - i):
                    if arg[j]:
                        nxt[i + j] += ti * arg[j]
        term = [c / m for c in nxt]
        for i, c in enumerate(term):
            out[i] += c
    return out


def artin_hasse(p: int, max_degree: int, coeff_precision: int) -> ZpSeries:
    """AH(T) = exp(sum T^{p^n}/p^n), verified p-integral, reduced mod p^precision."""
    if max_degree < 1:
        raise TiltError("max_degree must be >= 1")
    exact = _exact_artin_hasse(p, max_degree)
    mod = p ** coeff_precision
    reduced = []
    for n, c in enumerate(exact):
        if c.denominator % p == 0:
            raise TiltError(f"Artin-Hasse coefficient of T^{n} is not {p}-integral")
        reduced.append(c.numerator * pow(c.denominator, -1, mod) % mod)
    return ZpSeries(p, coeff_precision, max_degree, tuple(reduced))


def evaluate_series(s: ZpSeries, a: HahnSeries) -> HahnSeries:
    """sum (c_n mod p) a^n; needs valuation(a) > 0 for convergence of the truncation."""
    if s.p != a.p:
        raise TiltError("series and argument primes differ")
    fld = a.field
    if a.is_zero():
        return hahn(a.p, {Fraction(0): s.coeffs[0]}, a.cap, a.k)
    va = a.valuation()
    if va <= 0:
        raise TiltError("evaluate_series needs valuation(a) > 0")
    cap = min(a.cap, (s.max_degree + 1) * va)
    out = hahn(a.p, {Fraction(0): s.coeffs[0]}, cap, a.k)
    power = hahn_one(a.p, cap, a.k)
    for n in range(1, s.max_degree + 1):
        power = hahn_mul(power, a)
        if power.is_zero():
            break
        c = s.coeffs[n] % s.p
        if c:
            out = hahn_add(out, hahn_scale(power, c))
    return hahn(a.p, dict(out.terms), cap, a.k)


def lubin_tate_act(u, a: HahnSeries, precision: int | None = None) -> HahnSeries:
    """[u](a) = (1+a)^u - 1 for p-integral u, via base-p digits of u.

    (1+a)^{p^i} is the i-fold Frobenius of 1+a, so the action is an exact finite
    product of small powers; the result is capped at p^precision * valuation(a)
    when that is tighter than the series cap. Units act invertibly and preserve
    valuation (leading term u*a); non-unit integers are still honest
    endomorphisms, only u with p in the denominator is rejected.
    """
    p = a.p
    if a.is_zero():
        return a
    va = a.valuation()
    if va <= 0:
        raise TiltError("lubin_tate_act needs valuation(a) > 0")
    if precision is None:
        # enough digits that the truncation error falls past the cap
        precision = 1
        while p ** precision * va < a.cap:
            precision += 1
    mod = p ** precision
    u = Fraction(u)
    if u.denominator % p == 0:
        raise TiltError(f"u = {u} is not {p}-integral")
    digits_src = u.numerator * pow(u.denominator, -1, mod) % mod
    cap = min(a.cap, p ** precision * va)
    one = hahn_one(p, cap, a.k)
    base = hahn_add(one, hahn(p, dict(a.terms), cap, a.k))  # 1 + a at working cap
    out = one
    for _ in range(precision):
        digits_src, d = divmod(digits_src, p)
        if d:
            out = hahn_mul(out, hahn_pow(base, d))
        base = frobenius(base)
        base = hahn(p, dict(base.terms), cap, a.k)  # refold under the working cap
    return hahn_add(out, hahn_neg(one))


# ---------------------------------------------------------------------------
# Witt vectors of length <= 3

MAX_WITT_LENGTH = 3


@dataclass(frozen=True)
class WittExpansion:
    """Witt vector (x_0, ..., x_{N-1}) of Hahn-series components, N <= 3."""

    p: int
    components: tuple  # of HahnSeries

    @property
    def length(self) -> int:
        return len(self.components)


@lru_cache(maxsize=None)
def witt_universal(p: int, N: int):
    """Integer sum/product polynomials S_n, P_n solved from ghost components.

    Returns (sums, prods): each a list of N term-lists [(coeff, exponents)] in
    the 2N variables x_0..x_{N-1}, y_0..y_{N-1}.
    """
    import sympy as sp

    if N > MAX_WITT_LENGTH:
        raise TiltError(f"Witt length {N} > {MAX_WITT_LENGTH} unsupported")
    X = sp.symbols(f"x0:{N}")
    Y = sp.symbols(f"y0:{N}")

    def ghost(Z, n):
        return sum(p ** i * Z[i] ** (p ** (n - i)) for i in range(n + 1))

    def term_list(expr):
        poly = sp.Poly(sp.expand(expr), *X, *Y)
        out = []
        for exps, coeff in poly.terms():
            c = sp.Rational(coeff)
            if c.q != 1:
                raise TiltError("non-integer universal Witt coefficient")  # unreachable
            out.append((int(c), tuple(int(e) for e in exps)))
        return out

    S_expr, P_expr, sums, prods = [], [], [], []
    for n in range(N):
        gs = ghost(X, n) + ghost(Y, n)
        gp = ghost(X, n) * ghost(Y, n)
        for i in range(n):
            gs -= p ** i * S_expr[i] ** (p ** (n - i))
            gp -= p ** i * P_expr[i] ** (p ** (n - i))
        s_n = sp.expand(gs) / p ** n
        p_n = sp.expand(gp) / p ** n
        S_expr.append(s_n)
        P_expr.append(p_n)
        sums.append(term_list(s_n))
        prods.append(term_list(p_n))
    return sums, prods


def _check_witt_pair(x: WittExpansion, y: WittExpansion):
    if x.p != y.p:
        raise TiltError("mixed primes in Witt arithmetic")
    if x.length != y.length:
        raise TiltError("mixed Witt lengths")
    if x.length > MAX_WITT_LENGTH:
        raise TiltError(f"Witt length {x.length} > {MAX_WITT_LENGTH} unsupported")


def _eval_witt_poly(terms, xs, ys, p, k, cap):
    """Evaluate an integer polynomial term list on Hahn components in char p."""
    vals = list(xs) + list(ys)
    power_cache: dict = {}

    def var_pow(i, e):
        key = (i, e)
        if key not in power_cache:
            power_cache[key] = hahn_pow(vals[i], e)
        return power_cache[key]

    acc = hahn_zero(p, cap, k)
    for coeff, exps in terms:
        c = coeff % p
        if not c:
            continue
        term = None
        for i, e in enumerate(exps):
            if e:
                factor = var_pow(i, e)
                term = factor if term is None else hahn_mul(term, factor)
        if term is None:
            term = hahn_one(p, cap, k)
        acc = hahn_add(acc, hahn_scale(term, c))
    return hahn(p, dict(acc.terms), cap, k)


def _common_cap(x: WittExpansion, y: WittExpansion | None = None) -> Fraction:
    caps = [c.cap for c in x.components]
    if y is not None:
        caps += [c.cap for c in y.components]
    return min(caps)


def witt_add(x: WittExpansion, y: WittExpansion) -> WittExpansion:
    _check_witt_pair(x, y)
    sums, _ = witt_universal(x.p, x.length)
    k = x.components[0].k
    cap = _common_cap(x, y)
    comps = tuple(
        _eval_witt_poly(sums[n], x.components, y.components, x.p, k, cap)
        for n in range(x.length)
    )
    return WittExpansion(x.p, comps)


def witt_mul(x: WittExpansion, y: WittExpansion) -> WittExpansion:
    _check_witt_pair(x, y)
    _, prods = witt_universal(x.p, x.length)
    k = x.components[0].k
    cap = _common_cap(x, y)
    comps = tuple(
        _eval_witt_poly(prods[n], x.components, y.components, x.p, k, cap)
        for n in range(x.length)
    )
    return WittExpansion(x.p, comps)


def witt_neg(x: WittExpansion) -> WittExpansion:
    """Solve x + z = 0 componentwise: S_n is X_n + Y_n plus lower-index terms."""
    sums, _ = witt_universal(x.p, x.length)
    k = x.components[0].k
    cap = _common_cap(x)
    zs: list = []
    for n in range(x.length):
        # drop the bare X_n and Y_n monomials, evaluate the rest at (x, z-so-far)
        unit_x = tuple(1 if i == n else 0 for i in range(2 * x.length))
        unit_y = tuple(1 if i == x.length + n else 0 for i in range(2 * x.length))
        rest = [(c, e) for c, e in sums[n] if e not in (unit_x, unit_y)]
        pad = [hahn_zero(x.p, cap, k)] * (x.length - n)
        g = _eval_witt_poly(rest, x.components, tuple(zs) + tuple(pad), x.p, k, cap)
        zs.append(hahn_neg(hahn_add(x.components[n], g)))
    return WittExpansion(x.p, tuple(zs))


def teichmueller_lift(a: HahnSeries, N: int) -> WittExpansion:
    """[a] = (a, 0, ..., 0); needs a in the valuation ring."""
    if N > MAX_WITT_LENGTH:
        raise TiltError(f"Witt length {N} > {MAX_WITT_LENGTH} unsupported")
    va = a.valuation()
    if va is not None and va < 0:
        raise TiltError("Teichmueller lift needs valuation >= 0")
    comps = [a] + [hahn_zero(a.p, a.cap, a.k) for _ in range(N - 1)]
    return WittExpansion(a.p, tuple(comps))


def witt_one(p: int, N: int, cap=DEFAULT_CAP, k: int = DEFAULT_K) -> WittExpansion:
    return teichmueller_lift(hahn_one(p, cap, k), N)


def witt_int(c: int, p: int, N: int, cap=DEFAULT_CAP, k: int = DEFAULT_K) -> WittExpansion:
    """c * 1 in the Witt ring by repeated addition; intended for small |c|."""
    one = witt_one(p, N, cap, k)
    zero = WittExpansion(p, tuple(hahn_zero(p, cap, k) for _ in range(N)))
    acc = zero
    for _ in range(abs(c)):
        acc = witt_add(acc, one)
    return witt_neg(acc) if c < 0 else acc


def primitive_element(a: HahnSeries, N: int) -> WittExpansion:
    """[a] - p, the degree-one primitive element attached to a."""
    return witt_add(teichmueller_lift(a, N), witt_int(-a.p, a.p, N, a.cap, a.k))
