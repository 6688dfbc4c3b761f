"""Exact scalars: rationals, cyclotomic field elements and p-local tests.

Rationals are plain :class:`fractions.Fraction` values.  Elements of the
cyclotomic field Q(zeta_m) are :class:`CycloElement` instances stored in the
power basis 1, z, ..., z^(phi(m)-1) after reduction modulo the m-th
cyclotomic polynomial.

>>> z = CycloElement.zeta(3)
>>> z * z + z + 1
CycloElement(3, [0, 0])
>>> p_content(Fraction(3, 4), 3)
1
"""

import math
import re
from fractions import Fraction
from functools import lru_cache

from .errors import DivisionByZero, ParseError, PrecisionError, ReconstructionFailure

Rational = Fraction


def parse_rational(s, field=None):
    """Parse ``"a/b"``, ``"a"``, an int or a Fraction into a Fraction."""
    if isinstance(s, Fraction):
        return s
    if isinstance(s, bool):
        raise ParseError("booleans are not rationals", field)
    if isinstance(s, int):
        return Fraction(s)
    if not isinstance(s, str):
        raise ParseError(f"expected a rational string, got {type(s).__name__}", field)
    t = s.strip()
    m = re.fullmatch(r"([+-]?\d+)(?:\s*/\s*([+-]?\d+))?", t)
    if not m:
        raise ParseError(f"malformed rational {s!r}", field)
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ParseError(f"zero denominator in {s!r}", field)
    return Fraction(num, den)


def format_rational(q):
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


# ---------------------------------------------------------------------------
# cyclotomic polynomials and reduction tables

def _poly_divmod_monic(a, b):
    # integer polynomials, lowest degree first; b monic
    a = list(a)
    q = [0] * max(len(a) - len(b) + 1, 1)
    db = len(b) - 1
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i]
        if c:
            q[i - db] = c
            for j in range(db + 1):
                a[i - db + j] -= c * b[j]
    r = a[:db] if db > 0 else []
    return q, r


@lru_cache(maxsize=None)
def cyclotomic_poly(m):
    """Integer coefficients of Phi_m, lowest degree first."""
    if m < 1:
        raise ValueError("conductor must be positive")
    num = [-1] + [0] * (m - 1) + [1]  # x^m - 1
    for d in range(1, m):
        if m % d == 0:
            num, r = _poly_divmod_monic(num, cyclotomic_poly(d))
            assert not any(r)
    while len(num) > 1 and num[-1] == 0:
        num.pop()
    return tuple(num)


@lru_cache(maxsize=None)
def euler_phi(m):
    return len(cyclotomic_poly(m)) - 1


@lru_cache(maxsize=None)
def _reduction_table(m):
    # row j is x^j mod Phi_m for 0 <= j < m
    phi = cyclotomic_poly(m)
    n = len(phi) - 1
    rows = []
    cur = [1] + [0] * (n - 1) if n > 0 else []
    for _ in range(m):
        rows.append(tuple(cur))
        # multiply by x and reduce
        top = cur[-1] if n else 0
        nxt = [0] + cur[:-1] if n else []
        for k in range(n):
            nxt[k] -= top * phi[k]
        cur = nxt
    return tuple(rows)


@lru_cache(maxsize=None)
def _units_mod(m):
    return tuple(k for k in range(1, m + 1) if math.gcd(k, m) == 1) if m > 1 else (1,)


@lru_cache(maxsize=None)
def _mobius(n):
    res, k = 1, 2
    while k * k <= n:
        if n % k == 0:
            n //= k
            if n % k == 0:
                return 0
            res = -res
        k += 1
    return -res if n > 1 else res


def _normalise(nums, den):
    if den < 0:
        nums = [-x for x in nums]
        den = -den
    g = den
    for x in nums:
        g = math.gcd(g, x)
        if g == 1:
            break
    if g > 1:
        nums = [x // g for x in nums]
        den //= g
    return tuple(nums), den


def _fold(m, vec):
    """Reduce an integer vector of x-powers (any length) modulo Phi_m."""
    table = _reduction_table(m)
    n = euler_phi(m)
    out = [0] * n
    for j, c in enumerate(vec):
        if c:
            if j < n:
                out[j] += c
            else:
                row = table[j % m]
                for k in range(n):
                    if row[k]:
                        out[k] += c * row[k]
    return out


class CycloElement:
    """Immutable element of Q(zeta_m) in the reduced power basis.

    Internally the coordinates are ``nums[i] / den`` with a common positive
    denominator kept coprime to the numerators.  Operations between different
    conductors take place in Q(zeta_lcm).
    """

    __slots__ = ("m", "_nums", "_den", "_hash")

    def __init__(self, m, coeffs=None, _raw=None):
        self.m = int(m)
        if self.m < 1:
            raise ValueError("conductor must be positive")
        self._hash = None
        if _raw is not None:
            self._nums, self._den = _raw
            return
        coeffs = [Fraction(c) for c in (coeffs or [])]
        den = 1
        for c in coeffs:
            den = den * c.denominator // math.gcd(den, c.denominator)
        ints = [c.numerator * (den // c.denominator) for c in coeffs]
        self._nums, self._den = _normalise(_fold(self.m, ints), den)

    # -- constructors ---------------------------------------------------
    @classmethod
    def _make(cls, m, nums, den):
        return cls(m, _raw=_normalise(nums, den))

    @classmethod
    def zeta(cls, m, k=1):
        """zeta_m ** k."""
        vec = [0] * m
        vec[k % m] = 1
        return cls._make(m, _fold(m, vec), 1)

    @classmethod
    def rational(cls, q, m=1):
        q = Fraction(q)
        nums = [0] * euler_phi(m)
        if nums:
            nums[0] = q.numerator
        return cls._make(m, nums, q.denominator)

    @property
    def coeffs(self):
        return tuple(Fraction(x, self._den) for x in self._nums)

    @property
    def degree(self):
        return len(self._nums)

    # -- conductor handling --------------------------------------------
    def lift(self, M):
        """Same element viewed in Q(zeta_M) where m divides M."""
        if M == self.m:
            return self
        if M % self.m:
            raise ValueError(f"cannot lift conductor {self.m} to {M}")
        step = M // self.m
        vec = [0] * (step * (len(self._nums) - 1) + 1) if self._nums else []
        for j, c in enumerate(self._nums):
            vec[j * step] = c
        return CycloElement._make(M, _fold(M, vec), self._den)

    @staticmethod
    def _common(a, b):
        if not isinstance(b, CycloElement):
            b = CycloElement.rational(_as_fraction(b), a.m)
            return a, b
        if a.m == b.m:
            return a, b
        M = a.m * b.m // math.gcd(a.m, b.m)
        return a.lift(M), b.lift(M)

    # -- predicates ----------------------------------------------------
    def is_zero(self):
        return not any(self._nums)

    def is_rational(self):
        return not any(self._nums[1:])

    def to_rational(self):
        if not self.is_rational():
            raise ValueError("element is not rational")
        return Fraction(self._nums[0] if self._nums else 0, self._den)

    # -- arithmetic ----------------------------------------------------
    def __add__(self, other):
        try:
            a, b = CycloElement._common(self, other)
        except TypeError:
            return NotImplemented
        L = a._den * b._den // math.gcd(a._den, b._den)
        fa, fb = L // a._den, L // b._den
        return CycloElement._make(a.m, [x * fa + y * fb for x, y in zip(a._nums, b._nums)], L)

    __radd__ = __add__

    def __neg__(self):
        return CycloElement(self.m, _raw=(tuple(-x for x in self._nums), self._den))

    def __sub__(self, other):
        try:
            return self + (-other if isinstance(other, CycloElement) else -_as_fraction(other))
        except TypeError:
            return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, CycloElement):
            try:
                q = _as_fraction(other)
            except TypeError:
                return NotImplemented
            return CycloElement._make(self.m, [x * q.numerator for x in self._nums],
                                      self._den * q.denominator)
        a, b = CycloElement._common(self, other)
        n = len(a._nums)
        if n == 0:
            return a
        conv = [0] * (2 * n - 1)
        for i, x in enumerate(a._nums):
            if x:
                for j, y in enumerate(b._nums):
                    if y:
                        conv[i + j] += x * y
        return CycloElement._make(a.m, _fold(a.m, conv), a._den * b._den)

    __rmul__ = __mul__

    def conj(self, k=-1):
        """Galois conjugate sigma_k: zeta -> zeta^k (k coprime to m)."""
        k %= self.m
        if math.gcd(k, self.m) != 1 and self.m > 1:
            raise ValueError(f"{k} is not a unit modulo {self.m}")
        if self.m == 1:
            return self
        vec = [0] * self.m
        for j, c in enumerate(self._nums):
            if c:
                vec[(j * k) % self.m] += c
        return CycloElement._make(self.m, _fold(self.m, vec), self._den)

    def norm(self):
        """Absolute norm to Q, the product of all Galois conjugates."""
        prod = self
        for k in _units_mod(self.m):
            if k != 1:
                prod = prod * self.conj(k)
        return prod.to_rational()

    def inverse(self):
        if self.is_zero():
            raise DivisionByZero("inverse of zero in a cyclotomic field")
        if self.is_rational():
            return CycloElement.rational(1 / self.to_rational(), self.m)
        others = None
        for k in _units_mod(self.m):
            if k != 1:
                c = self.conj(k)
                others = c if others is None else others * c
        N = (self * others).to_rational()
        return others * (1 / N)

    def __truediv__(self, other):
        if isinstance(other, CycloElement):
            return self * other.inverse()
        try:
            q = _as_fraction(other)
        except TypeError:
            return NotImplemented
        if q == 0:
            raise DivisionByZero("division by zero")
        return self * (1 / q)

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        result = CycloElement.rational(1, self.m)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    # -- comparison ----------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, CycloElement):
            a, b = CycloElement._common(self, other)
            return a._den == b._den and a._nums == b._nums
        try:
            q = _as_fraction(other)
        except TypeError:
            return NotImplemented
        return self.is_rational() and self.to_rational() == q

    def _normalised_trace(self):
        # Tr(x)/phi(m) is unchanged when the element is lifted to a larger field
        total = Fraction(0)
        for j, c in enumerate(self._nums):
            if c:
                g = math.gcd(j, self.m)
                d = self.m // g
                total += Fraction(c * _mobius(d), euler_phi(d))
        return total / self._den

    def __hash__(self):
        if self._hash is None:
            if self.is_rational():
                self._hash = hash(self.to_rational())
            else:
                self._hash = hash(("cyclo", self._normalised_trace()))
        return self._hash

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        return f"CycloElement({self.m}, [{', '.join(format_rational(c) for c in self.coeffs)}])"

    def __str__(self):
        if self.is_rational():
            return format_rational(self.to_rational())
        parts = []
        for j, c in enumerate(self.coeffs):
            if c:
                term = format_rational(c) if j == 0 else f"{format_rational(c)}*z{self.m}^{j}"
                parts.append(term)
        return " + ".join(parts) or "0"

    # integer-level access for fast kernels
    def raw(self):
        return self._nums, self._den


def _as_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int) and not isinstance(x, bool):
        return Fraction(x)
    raise TypeError(f"cannot use {type(x).__name__} as an exact scalar")


def cyclo_reduce(poly, m):
    """Reduce a polynomial (coefficients lowest degree first) modulo Phi_m."""
    if m < 1:
        raise ValueError("m must be positive")
    return CycloElement(m, [Fraction(c) for c in poly])


def to_cyclo(x, m):
    """Coerce an int, Fraction or CycloElement into Q(zeta_M) with m | M."""
    if isinstance(x, CycloElement):
        if x.m == m:
            return x
        if m % x.m == 0:
            return x.lift(m)
        if x.is_rational():
            return CycloElement.rational(x.to_rational(), m)
        raise ValueError(f"conductor {x.m} does not divide {m}")
    return CycloElement.rational(_as_fraction(x), m)


def simplify(x):
    """Return a Fraction when a cyclotomic value happens to be rational."""
    if isinstance(x, CycloElement) and x.is_rational():
        return x.to_rational()
    return x


def valuation(n, p):
    """p-adic valuation of a nonzero integer."""
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def p_content(x, p):
    """Minimum p-adic valuation of the power-basis coordinates.

    For rationals this is the p-adic valuation.  For cyclotomic elements it
    is only a content (not a valuation when p ramifies); ``x`` is p-integral
    exactly when the result is >= 0.  Zero has content ``math.inf``.
    """
    if isinstance(x, CycloElement):
        nums, den = x.raw()
        vals = [valuation(c, p) for c in nums if c]
        if not vals:
            return math.inf
        return min(vals) - valuation(den, p)
    q = _as_fraction(x)
    if q == 0:
        return math.inf
    return valuation(q.numerator, p) - valuation(q.denominator, p)


def is_p_integral(x, p):
    return p_content(x, p) >= 0


def rational_reconstruct(approx, denom_bound):
    """Recover a rational with denominator <= denom_bound from a decimal.

    The decimal string must carry at least 2*log10(denom_bound) + 2 digits
    after the point.  The candidate is the best approximation with bounded
    denominator (continued fractions via ``Fraction.limit_denominator``) and
    is accepted only if it lies within half a unit of the last digit.
    """
    if denom_bound < 1:
        raise ValueError("denominator bound must be positive")
    s = approx.strip()
    m = re.fullmatch(r"[+-]?(\d*)\.?(\d*)", s)
    if not m or not (m.group(1) or m.group(2)):
        raise ParseError(f"malformed decimal {approx!r}", "approx")
    digits = len(m.group(2))
    need = math.ceil(2 * math.log10(denom_bound) + 2) if denom_bound > 1 else 2
    if digits < need:
        raise PrecisionError(f"need {need} fractional digits, got {digits}")
    x = Fraction(s)
    cand = x.limit_denominator(denom_bound)
    if abs(x - cand) <= Fraction(1, 2 * 10 ** digits):
        return cand
    raise ReconstructionFailure(
        f"no rational with denominator <= {denom_bound} within 10^-{digits}/2 of {approx}")
