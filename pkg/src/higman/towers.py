"""Exact integers too large to write down, in hereditary base-m form.

A natural number is a sum of digit * m^e with distinct exponents e that are
themselves written the same way.  Addition, comparison and multiplication by
m^e are exact, which is all the flat construction needs: its labels are of
the form +-c * m^(earlier label), nested to arbitrary depth.

Values that fit in ``SMALL_BITS`` bits are always plain ints; ``Huge`` is only
used beyond that, so every value has exactly one representation.
"""
from __future__ import annotations

from functools import cmp_to_key, lru_cache
from typing import Optional, Tuple, Union

SMALL_BITS = 4096


class HNat:
    __slots__ = ("m", "terms", "_hash")

    def __init__(self, m: int, terms: Tuple[Tuple["HNat", int], ...]):
        self.m = m
        self.terms = terms  # (exponent, digit), exponents strictly decreasing
        self._hash = hash((m, terms))

    @staticmethod
    def of(m: int, n: int) -> "HNat":
        return _hnat_of(m, n)

    def __eq__(self, other):
        return isinstance(other, HNat) and self.m == other.m and self.terms == other.terms

    def __hash__(self):
        return self._hash

    def is_zero(self) -> bool:
        return not self.terms

    def cmp(self, other: "HNat") -> int:
        for (e1, d1), (e2, d2) in zip(self.terms, other.terms):
            c = e1.cmp(e2)
            if c:
                return c
            if d1 != d2:
                return 1 if d1 > d2 else -1
        return (len(self.terms) > len(other.terms)) - (len(self.terms) < len(other.terms))

    def __lt__(self, other):
        return self.cmp(other) < 0

    def add(self, other: "HNat") -> "HNat":
        digits = {}
        for e, d in self.terms + other.terms:
            digits[e] = digits.get(e, 0) + d
        m = self.m
        pending = sorted(digits, key=cmp_to_key(HNat.cmp))
        i = 0
        while i < len(pending):
            e = pending[i]
            d = digits[e]
            if d >= m:
                digits[e] = d % m
                up = e.add(ONE(m))
                if up in digits:
                    digits[up] += d // m
                else:
                    digits[up] = d // m
                    pending.append(up)
                    pending[i + 1:] = sorted(pending[i + 1:], key=cmp_to_key(HNat.cmp))
            i += 1
        terms = tuple(sorted(((e, d) for e, d in digits.items() if d), key=cmp_to_key(lambda a, b: b[0].cmp(a[0]))))
        return HNat(m, terms)

    def shift(self, e: "HNat") -> "HNat":
        """self * m^e."""
        return HNat(self.m, tuple((x.add(e), d) for x, d in self.terms))

    def to_int(self, max_bits: int = SMALL_BITS) -> Optional[int]:
        total = 0
        per_digit = self.m.bit_length()
        for e, d in self.terms:
            k = e.to_int(32)
            if k is None or k * (per_digit - 1) > max_bits:
                return None
            total += d * self.m**k
        return total if total.bit_length() <= max_bits else None

    def __repr__(self):
        n = self.to_int(64)
        if n is not None:
            return str(n)
        parts = []
        for e, d in self.terms:
            parts.append(f"{d}*{self.m}^({e!r})" if d != 1 else f"{self.m}^({e!r})")
        return " + ".join(parts)


@lru_cache(maxsize=None)
def _hnat_of(m: int, n: int) -> HNat:
    if n < 0:
        raise ValueError("negative")
    terms = []
    k = 0
    while n:
        n, d = divmod(n, m)
        if d:
            terms.append((_hnat_of(m, k), d))
        k += 1
    return HNat(m, tuple(reversed(terms)))


def ONE(m: int) -> HNat:
    return _hnat_of(m, 1)


class Huge:
    """A signed integer with more than SMALL_BITS bits."""

    __slots__ = ("sign", "mag")

    def __init__(self, sign: int, mag: HNat):
        self.sign = sign
        self.mag = mag

    @property
    def m(self) -> int:
        return self.mag.m

    def __neg__(self):
        return Huge(-self.sign, self.mag)

    def __abs__(self):
        return Huge(1, self.mag)

    def __eq__(self, other):
        return isinstance(other, Huge) and (self.sign, self.mag) == (other.sign, other.mag)

    def __hash__(self):
        return hash((self.sign, self.mag))

    def __repr__(self):
        return ("-" if self.sign < 0 else "") + repr(self.mag)

    def __str__(self):
        return repr(self)


Num = Union[int, Huge]


def _as_hnat(m: int, x: Num) -> HNat:
    if isinstance(x, Huge):
        if x.m != m:
            raise ValueError(f"base mismatch: {x.m} vs {m}")
        return x.mag
    return HNat.of(m, abs(x))


def _canon(sign: int, mag: HNat) -> Num:
    n = mag.to_int()
    if n is not None:
        return sign * n
    return Huge(sign, mag)


def sign(x: Num) -> int:
    if isinstance(x, Huge):
        return x.sign
    return (x > 0) - (x < 0)


def scale(x: Num, m: int, e: Num) -> Num:
    """x * m^e for e >= 0, exact."""
    if sign(e) < 0:
        raise ValueError("negative exponent")
    if isinstance(x, int) and isinstance(e, int) and abs(x).bit_length() + e * m.bit_length() <= SMALL_BITS:
        return x * m**e
    if x == 0:
        return 0
    return _canon(sign(x), _as_hnat(m, x).shift(_as_hnat(m, e)))


def cmp_abs(x: Num, y: Num, m: Optional[int] = None) -> int:
    """Compare |x| with |y|."""
    if isinstance(x, int) and isinstance(y, int):
        return (abs(x) > abs(y)) - (abs(x) < abs(y))
    if isinstance(x, int):
        return -cmp_abs(y, x)
    # x is huge; an int is always smaller in magnitude
    if isinstance(y, int):
        return 1
    return x.mag.cmp(y.mag)


def max_abs(values, default: Num = 0) -> Num:
    best = default
    for v in values:
        if cmp_abs(v, best) > 0:
            best = v
    return abs(best)


def describe(x: Num) -> str:
    return str(x)
