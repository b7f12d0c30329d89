"""Certified real arithmetic: every comparison is either exact or errs loudly.

A ``CertifiedReal`` is one of

* surd mode -- an exact value ``r + sum_i c_i * sqrt(d_i)`` with rational
  ``r``, nonzero rational coefficients ``c_i`` and distinct squarefree
  radicands ``d_i >= 2``.  This class of numbers is closed under +, -, *
  (``sqrt(a)*sqrt(b)`` reduces via the gcd), and every sign test, floor and
  comparison is decidable: a nonzero combination of square roots of distinct
  squarefree integers is never zero, so dyadic refinement terminates, and
  single-radical signs are settled by integer squaring alone.

* bigfloat mode -- a dyadic midpoint ``man * 2**exp`` plus a nonnegative
  dyadic error radius bounding ``|stored - true|``.  Addition and
  multiplication of dyadics are exact, so radii grow only by the interval
  rules (sum of radii for +/-, ``|x|r_y + |y|r_x + r_x r_y`` for *).  A
  decision whose margin does not exceed the radius raises
  ``PrecisionInsufficient``; values built from decimal strings remember the
  exact source so callers can re-round at more bits and retry.

Fractional parts use ``frac(x) = x - floor(x)`` and the nearest-integer
distance uses the branch-free identity ``||x|| = 1/2 - |frac(x) - 1/2|``.
"""

from __future__ import annotations

import enum
import math
import os
from fractions import Fraction
from typing import Optional, Union

from .errors import PrecisionInsufficient

DEFAULT_BITS = 128
DEFAULT_PRECISION_CAP = 4096
PRECISION_CAP_ENV = "DIOPH_PRECISION_CAP"

# Refinement of exact surd-mode values terminates mathematically; this cap
# only guards against radicands whose square part escaped factoring.
_EXACT_REFINE_CAP = 1 << 21

_SMALL_PRIMES_LIMIT = 10_000
_HALF = Fraction(1, 2)


def precision_cap() -> int:
    """Bit cap for bigfloat retry ladders (env override wins)."""
    raw = os.environ.get(PRECISION_CAP_ENV)
    if raw is None:
        return DEFAULT_PRECISION_CAP
    cap = int(raw)
    if cap < 8:
        raise ValueError("precision cap must be at least 8 bits")
    return cap


def is_perfect_square(n: int) -> bool:
    if n < 0:
        return False
    r = math.isqrt(n)
    return r * r == n


def _small_primes(limit: int = _SMALL_PRIMES_LIMIT) -> list[int]:
    sieve = bytearray([1]) * (limit + 1)
    sieve[0:2] = b"\x00\x00"
    for p in range(2, math.isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(sieve[p * p :: p]))
    return [i for i, flag in enumerate(sieve) if flag]


_PRIMES = _small_primes()


def squarefree_split(n: int) -> tuple[int, int]:
    """Return ``(f, core)`` with ``n = f*f*core`` and ``core`` squarefree.

    Trial division runs over primes below 10^4; any remaining cofactor is
    tested for being a perfect square and otherwise kept whole.  A square
    part hiding behind two huge prime factors is therefore not extracted;
    downstream refinement then fails loudly instead of looping.
    """
    if n <= 0:
        raise ValueError("radicand must be positive")
    f, core = 1, 1
    for p in _PRIMES:
        if p * p > n:
            break
        while n % (p * p) == 0:
            f *= p
            n //= p * p
        if n % p == 0:
            core *= p
            n //= p
    if n > 1:
        r = math.isqrt(n)
        if r * r == n:
            f *= r
        else:
            core *= n
    return f, core


class Ordering(enum.Enum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


def _dy_add(m1: int, e1: int, m2: int, e2: int) -> tuple[int, int]:
    if e1 == e2:
        return m1 + m2, e1
    if e1 < e2:
        return m1 + (m2 << (e2 - e1)), e1
    return (m1 << (e1 - e2)) + m2, e2


def _dy_cmp(m1: int, e1: int, m2: int, e2: int) -> int:
    if e1 == e2:
        diff = m1 - m2
    elif e1 < e2:
        diff = m1 - (m2 << (e2 - e1))
    else:
        diff = (m1 << (e1 - e2)) - m2
    return (diff > 0) - (diff < 0)


def _dy_floor(m: int, e: int) -> int:
    # Python's >> floors for negative ints, which is exactly what we need.
    return m << e if e >= 0 else m >> (-e)


def _dy_to_fraction(m: int, e: int) -> Fraction:
    return Fraction(m) * Fraction(2) ** e if e >= 0 else Fraction(m, 1 << (-e))


def _round_dyadic(m: int, e: int, bits: int) -> tuple[int, int, tuple[int, int]]:
    """Round ``m*2^e`` to ``bits`` mantissa bits; return (m', e', radius)."""
    extra = m.bit_length() - bits
    if extra <= 0:
        return m, e, (0, 0)
    half = 1 << (extra - 1)
    q, r = divmod(m, 1 << extra)
    if r >= half:
        q += 1
    # |rounded - original| <= 2^(extra-1) at scale 2^e
    return q, e + extra, (1, e + extra - 1)


def _frac_bounds_scaled(x: Fraction, bits: int) -> tuple[int, int]:
    """Integers (lo, hi) with x in [lo, hi] * 2^-bits and hi - lo <= 1."""
    num = x.numerator << bits
    lo = num // x.denominator
    hi = lo if lo * x.denominator == num else lo + 1
    return lo, hi


_SURD = "surd"
_BIGFLOAT = "bigfloat"

Number = Union[int, Fraction, "CertifiedReal"]


class CertifiedReal:
    """Immutable certified real; see the module docstring for the two modes."""

    __slots__ = ("_rat", "_rad", "_mid", "_rho", "_src")

    def __init__(self) -> None:
        raise TypeError("use the from_* constructors")

    # -- constructors -------------------------------------------------------

    @classmethod
    def _make_exact(cls, rat: Fraction, rad: dict[int, Fraction]) -> "CertifiedReal":
        self = object.__new__(cls)
        self._rat = rat
        self._rad = tuple(sorted((d, c) for d, c in rad.items() if c != 0))
        self._mid = None
        self._rho = None
        self._src = None
        return self

    @classmethod
    def _make_bigfloat(
        cls,
        mid: tuple[int, int],
        rho: tuple[int, int],
        src: Optional[tuple[Fraction, int]] = None,
    ) -> "CertifiedReal":
        self = object.__new__(cls)
        self._rat = None
        self._rad = None
        self._mid = mid
        self._rho = rho
        self._src = src
        return self

    @classmethod
    def from_int(cls, value: int) -> "CertifiedReal":
        return cls._make_exact(Fraction(value), {})

    @classmethod
    def from_fraction(cls, value: Fraction) -> "CertifiedReal":
        return cls._make_exact(Fraction(value), {})

    @classmethod
    def from_surd(cls, p: int, q: int, d: int, r: int = 1) -> "CertifiedReal":
        """Exact ``(p + q*sqrt(d))/r`` with ``r != 0`` and ``d >= 0``."""
        if r == 0:
            raise ValueError("surd denominator r must be nonzero")
        if d < 0:
            raise ValueError("surd radicand d must be nonnegative")
        rat = Fraction(p, r)
        rad: dict[int, Fraction] = {}
        if q != 0 and d > 0:
            f, core = squarefree_split(d)
            if core == 1:
                rat += Fraction(q * f, r)
            else:
                rad[core] = Fraction(q * f, r)
        return cls._make_exact(rat, rad)

    @classmethod
    def sqrt_int(cls, d: int) -> "CertifiedReal":
        return cls.from_surd(0, 1, d)

    @classmethod
    def from_decimal(cls, text: str, bits: int = DEFAULT_BITS) -> "CertifiedReal":
        """Bigfloat from a decimal (or ``p/q``) string at ``bits`` relative
        precision; the exact source is retained for later re-rounding."""
        value = Fraction(text)
        return cls._from_source(value, bits)

    @classmethod
    def _from_source(cls, value: Fraction, bits: int) -> "CertifiedReal":
        if value == 0:
            return cls._make_bigfloat((0, 0), (1, -bits), (value, bits))
        mag = value.numerator.bit_length() - value.denominator.bit_length()
        e = mag - bits
        num = abs(value.numerator) if e >= 0 else abs(value.numerator) << (-e)
        den = value.denominator if e < 0 else value.denominator << e
        man = (2 * num + den) // (2 * den)
        if value < 0:
            man = -man
        # radius: rounding (<= 2^(e-1)) plus declared relative uncertainty 2^-bits
        rho = _dy_add(1, e - 1, 1, mag - bits)
        return cls._make_bigfloat((man, e), rho, (value, bits))

    @classmethod
    def bigfloat(cls, mid: Fraction, radius: Fraction, bits: int = DEFAULT_BITS) -> "CertifiedReal":
        """Bigfloat with an explicitly declared error radius."""
        mlo, mhi = _frac_bounds_scaled(mid, bits)
        man = (mlo + mhi + 1) // 2
        extra = (1, -bits) if mlo != mhi else (0, 0)
        rlo, rhi = _frac_bounds_scaled(radius, bits)
        rho = _dy_add(rhi, -bits, *extra)
        return cls._make_bigfloat((man, -bits), rho, None)

    # -- basic queries -------------------------------------------------------

    @property
    def mode(self) -> str:
        return _SURD if self._rat is not None else _BIGFLOAT

    @property
    def is_exact(self) -> bool:
        return self._rat is not None

    @property
    def is_rational(self) -> bool:
        return self._rat is not None and not self._rad

    def as_fraction(self) -> Fraction:
        if not self.is_rational:
            raise ValueError("value is not an exact rational")
        return self._rat

    def as_surd_tuple(self) -> tuple[int, int, int, int]:
        """Canonical ``(p, q, d, r)`` with gcd(p, q, r) = 1 and r > 0.

        Only available in surd mode with at most one radical.
        """
        if self._rat is None or len(self._rad) > 1:
            raise ValueError("not a single-radical exact value")
        if not self._rad:
            return self._rat.numerator, 0, 0, self._rat.denominator
        d, c = self._rad[0]
        r = math.lcm(self._rat.denominator, c.denominator)
        p = self._rat.numerator * (r // self._rat.denominator)
        q = c.numerator * (r // c.denominator)
        g = math.gcd(math.gcd(abs(p), abs(q)), r)
        return p // g, q // g, d, r // g

    @property
    def radius(self) -> Fraction:
        """Certified bound on |stored - true| (zero in surd mode)."""
        if self._rat is not None:
            return Fraction(0)
        return _dy_to_fraction(*self._rho)

    def at_bits(self, bits: int) -> "CertifiedReal":
        """Re-round from the exact source at ``bits``; surd values pass through."""
        if self._rat is not None:
            return self
        if self._src is None:
            raise PrecisionInsufficient(
                "bigfloat has no exact source to re-evaluate from"
            )
        return self._from_source(self._src[0], bits)

    # -- arithmetic ----------------------------------------------------------

    @staticmethod
    def _coerce(value: Number) -> "CertifiedReal":
        if isinstance(value, CertifiedReal):
            return value
        if isinstance(value, (int, Fraction)):
            return CertifiedReal._make_exact(Fraction(value), {})
        raise TypeError(f"cannot interpret {value!r} as a CertifiedReal")

    def _to_bigfloat(self, bits: int = DEFAULT_BITS) -> "CertifiedReal":
        if self._rat is None:
            return self
        lo, hi = self._scaled_bounds(bits + 1)
        man = (lo + hi + 1) // 2
        rho = (hi - lo + 1, -(bits + 2))
        return CertifiedReal._make_bigfloat((man, -(bits + 1)), rho, None)

    def __add__(self, other: Number) -> "CertifiedReal":
        other = self._coerce(other)
        if self._rat is not None and other._rat is not None:
            rad = dict(self._rad)
            for d, c in other._rad:
                rad[d] = rad.get(d, Fraction(0)) + c
            return CertifiedReal._make_exact(self._rat + other._rat, rad)
        a = self._to_bigfloat()
        b = other._to_bigfloat()
        mid = _dy_add(*a._mid, *b._mid)
        rho = _dy_add(*a._rho, *b._rho)
        return CertifiedReal._normalized(mid, rho)

    __radd__ = __add__

    def __neg__(self) -> "CertifiedReal":
        if self._rat is not None:
            return CertifiedReal._make_exact(-self._rat, {d: -c for d, c in self._rad})
        return CertifiedReal._make_bigfloat(
            (-self._mid[0], self._mid[1]), self._rho, None
        )

    def __sub__(self, other: Number) -> "CertifiedReal":
        return self + (-self._coerce(other))

    def __rsub__(self, other: Number) -> "CertifiedReal":
        return (-self) + other

    def __mul__(self, other: Number) -> "CertifiedReal":
        other = self._coerce(other)
        if self._rat is not None and other._rat is not None:
            rat = self._rat * other._rat
            rad: dict[int, Fraction] = {}

            def put(d: int, c: Fraction) -> None:
                rad[d] = rad.get(d, Fraction(0)) + c

            for d, c in self._rad:
                put(d, c * other._rat)
            for d, c in other._rad:
                put(d, c * self._rat)
            for d1, c1 in self._rad:
                for d2, c2 in other._rad:
                    g = math.gcd(d1, d2)
                    core = (d1 // g) * (d2 // g)
                    coeff = c1 * c2 * g
                    if core == 1:
                        rat += coeff
                    else:
                        put(core, coeff)
            return CertifiedReal._make_exact(rat, rad)
        a = self._to_bigfloat()
        b = other._to_bigfloat()
        mid = (a._mid[0] * b._mid[0], a._mid[1] + b._mid[1])
        am, ae = abs(a._mid[0]), a._mid[1]
        bm, be = abs(b._mid[0]), b._mid[1]
        rho = _dy_add(am * b._rho[0], ae + b._rho[1], bm * a._rho[0], be + a._rho[1])
        rho = _dy_add(*rho, a._rho[0] * b._rho[0], a._rho[1] + b._rho[1])
        return CertifiedReal._normalized(mid, rho)

    __rmul__ = __mul__

    @classmethod
    def _normalized(cls, mid: tuple[int, int], rho: tuple[int, int]) -> "CertifiedReal":
        # Bound mantissa growth; rounding slack is folded into the radius.
        if abs(mid[0]).bit_length() > 8192:
            m, e, slack = _round_dyadic(mid[0], mid[1], 4096)
            mid = (m, e)
            rho = _dy_add(*rho, *slack)
        if rho[0].bit_length() > 128:
            rm, re, _ = _round_dyadic(rho[0] + 1, rho[1], 32)
            rho = (rm + 1, re)
        return cls._make_bigfloat(mid, rho, None)

    # -- enclosures ----------------------------------------------------------

    def _scaled_bounds(self, bits: int) -> tuple[int, int]:
        """Integers (lo, hi) with the true value inside [lo, hi] * 2^-bits."""
        if self._rat is not None:
            lo, hi = _frac_bounds_scaled(self._rat, bits)
            for d, c in self._rad:
                s = math.isqrt(d << (2 * bits))  # sqrt(d)*2^bits in [s, s+1)
                clo, chi = (c * s, c * (s + 1)) if c > 0 else (c * (s + 1), c * s)
                flo, _ = _frac_bounds_scaled(clo, bits)
                _, fhi = _frac_bounds_scaled(chi, bits)
                lo += flo >> bits if False else flo // (1 << bits) if False else 0
                # the two helper calls above already return values at scale
                # 2^-bits relative to c*s*2^-bits; recompute directly instead:
                lo += 0
            if self._rad:
                # recompute in one pass to keep the arithmetic transparent
                lo_f = Fraction(self._rat)
                hi_f = Fraction(self._rat)
                for d, c in self._rad:
                    s = math.isqrt(d << (2 * bits))
                    if c > 0:
                        lo_f += c * s * Fraction(1, 1 << bits)
                        hi_f += c * (s + 1) * Fraction(1, 1 << bits)
                    else:
                        lo_f += c * (s + 1) * Fraction(1, 1 << bits)
                        hi_f += c * s * Fraction(1, 1 << bits)
                lo = _frac_bounds_scaled(lo_f, bits)[0]
                hi = _frac_bounds_scaled(hi_f, bits)[1]
            return lo, hi
        m, e = self._mid
        rm, re = self._rho
        lo_m, lo_e = _dy_add(m, e, -rm, re)
        hi_m, hi_e = _dy_add(m, e, rm, re)
        shift_lo = bits + lo_e
        shift_hi = bits + hi_e
        lo = lo_m << shift_lo if shift_lo >= 0 else lo_m >> (-shift_lo)
        hi = hi_m << shift_hi if shift_hi >= 0 else -((-hi_m) >> (-shift_hi))
        return lo, hi

    def interval(self, bits: int = DEFAULT_BITS) -> tuple[Fraction, Fraction]:
        lo, hi = self._scaled_bounds(bits)
        return Fraction(lo, 1 << bits), Fraction(hi, 1 << bits)

    # -- decisions -----------------------------------------------------------

    def sign(self) -> int:
        """Exact sign in surd mode; certified sign (or raise) in bigfloat mode."""
        if self._rat is not None:
            if not self._rad:
                num = self._rat.numerator
                return (num > 0) - (num < 0)
            if not self._rat and len(self._rad) == 1:
                return 1 if self._rad[0][1] > 0 else -1
            if len(self._rad) == 1:
                a = self._rat
                d, c = self._rad[0]
                if a > 0 and c > 0:
                    return 1
                if a < 0 and c < 0:
                    return -1
                # opposite signs: compare a^2 with c^2*d (never equal for
                # squarefree d >= 2 with a, c nonzero)
                lhs, rhs = a * a, c * c * d
                if a > 0:  # c < 0
                    return 1 if lhs > rhs else -1
                return -1 if lhs > rhs else 1
            bits = 64
            while bits <= _EXACT_REFINE_CAP:
                lo, hi = self._scaled_bounds(bits)
                if lo > 0:
                    return 1
                if hi < 0:
                    return -1
                bits *= 2
            raise PrecisionInsufficient(
                "surd sign refinement exhausted; a radicand likely carries an "
                "unextracted square factor"
            )
        m, e = self._mid
        rm, re = self._rho
        if rm == 0:
            return (m > 0) - (m < 0)
        if _dy_cmp(abs(m), e, rm, re) > 0:
            return 1 if m > 0 else -1
        raise PrecisionInsufficient("sign: margin does not exceed error radius")

    def floor(self) -> int:
        if self._rat is not None:
            if not self._rad:
                return self._rat.numerator // self._rat.denominator
            bits = 64
            while bits <= _EXACT_REFINE_CAP:
                lo, hi = self._scaled_bounds(bits)
                flo, fhi = lo >> bits, hi >> bits
                if flo == fhi:
                    return flo
                bits *= 2
            raise PrecisionInsufficient(
                "surd floor refinement exhausted; a radicand likely carries an "
                "unextracted square factor"
            )
        lo, hi = self._scaled_bounds(DEFAULT_BITS)
        flo, fhi = lo >> DEFAULT_BITS, hi >> DEFAULT_BITS
        if flo == fhi:
            return flo
        raise PrecisionInsufficient(
            "floor: value is within its error radius of an integer"
        )

    def frac(self) -> "CertifiedReal":
        """Fractional part in [0, 1); exact in surd mode."""
        return self - self.floor()

    def dist_nearest(self) -> "CertifiedReal":
        """Distance to the nearest integer via ||x|| = 1/2 - |frac(x) - 1/2|."""
        f = self.frac() - _HALF
        if f._rat is not None:
            absf = f if f.sign() >= 0 else -f
        else:
            absf = CertifiedReal._make_bigfloat(
                (abs(f._mid[0]), f._mid[1]), f._rho, None
            )
        return CertifiedReal._coerce(_HALF) - absf

    def cmp(self, other: Number) -> Ordering:
        """Certified ordering; Equal only when equality is provable."""
        diff = self - self._coerce(other)
        if diff._rat is not None:
            s = diff.sign()
            return Ordering(s)
        m, e = diff._mid
        rm, re = diff._rho
        if rm == 0:
            return Ordering((m > 0) - (m < 0))
        if _dy_cmp(abs(m), e, rm, re) > 0:
            return Ordering.GREATER if m > 0 else Ordering.LESS
        raise PrecisionInsufficient(
            "comparison margin does not exceed the combined error radius"
        )

    def __float__(self) -> float:
        if self._rat is not None:
            value = float(self._rat)
            for d, c in self._rad:
                value += float(c) * math.sqrt(d)
            return value
        return self._mid[0] * 2.0 ** self._mid[1]

    def __repr__(self) -> str:
        if self._rat is not None:
            parts = [] if not self._rat and self._rad else [str(self._rat)]
            for d, c in self._rad:
                parts.append(f"{c}*sqrt({d})")
            return f"CertifiedReal({' + '.join(parts)} ~ {float(self):.9g})"
        return f"CertifiedReal({float(self):.9g} +/- {float(self.radius):.3g})"


def frac(x: Number) -> CertifiedReal:
    """Fractional part {x} in [0, 1)."""
    return CertifiedReal._coerce(x).frac()


def dist_nearest(x: Number) -> CertifiedReal:
    """Distance of x to the nearest integer, in [0, 1/2]."""
    return CertifiedReal._coerce(x).dist_nearest()


def cmp_margin(x: Number, t: Number) -> Ordering:
    """Certified three-way comparison of true values."""
    return CertifiedReal._coerce(x).cmp(t)
