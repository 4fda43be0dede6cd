"""Exact arithmetic in the solvable Baumslag-Solitar groups BS(1, m).

An element is stored in affine coordinates ``(t, k)`` meaning ``b^t a^k``
where ``a`` is the stable letter and ``b`` the normal generator of
``<a, b | a b a^-1 = b^m>``.  The translation part ``t`` lives in
``Z[1/m]`` and is kept as ``num / m^mexp`` with ``mexp`` minimal.

The group law is ``(t1, k1) * (t2, k2) = (t1 + m^k1 * t2, k1 + k2)``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Tuple

A_FIRST = "a-first"
B_FIRST = "b-first"
STABLE = "a"
NORMAL = "b"


def _check_m(m: int) -> None:
    if not isinstance(m, int) or m < 2:
        raise ValueError(f"BS(1, m) needs an integer m >= 2, got {m!r}")


def _normalize(m: int, num: int, mexp: int) -> Tuple[int, int]:
    if num == 0:
        return 0, 0
    if mexp < 0:
        return num * m ** (-mexp), 0
    while mexp > 0 and num % m == 0:
        num //= m
        mexp -= 1
    return num, mexp


def _scale(m: int, num: int, mexp: int, s: int) -> Tuple[int, int]:
    """Return ``num/m^mexp * m^s`` normalized."""
    return _normalize(m, num, mexp - s)


@dataclass(frozen=True, slots=True)
class BSElem:
    m: int
    num: int = 0
    mexp: int = 0
    k: int = 0

    @classmethod
    def make(cls, m: int, t=0, k: int = 0) -> "BSElem":
        """Build ``b^t a^k`` from an int, a Fraction, or a ``(num, mexp)`` pair."""
        _check_m(m)
        if isinstance(t, tuple):
            num, mexp = t
        elif isinstance(t, Fraction):
            num, mexp = _from_fraction(m, t)
        else:
            num, mexp = int(t), 0
        num, mexp = _normalize(m, num, mexp)
        return cls(m, num, mexp, k)

    @property
    def t(self) -> Fraction:
        return Fraction(self.num, self.m ** self.mexp)

    def is_identity(self) -> bool:
        return self.num == 0 and self.k == 0

    def __mul__(self, other: "BSElem") -> "BSElem":
        return bs_mul(self, other)

    def __invert__(self) -> "BSElem":
        return bs_inv(self)

    def __pow__(self, n: int) -> "BSElem":
        return bs_pow(self, n)

    def to_json(self) -> dict:
        return {"num": str(self.num), "mexp": self.mexp, "k": self.k}

    @classmethod
    def from_json(cls, m: int, data: dict) -> "BSElem":
        return cls.make(m, (int(data["num"]), int(data["mexp"])), int(data["k"]))

    def __str__(self) -> str:
        t = self.t
        return f"({t}, {self.k})"


def _from_fraction(m: int, t: Fraction) -> Tuple[int, int]:
    den = t.denominator
    d = 0
    while den % m == 0:
        den //= m
        d += 1
    # den must now divide a power of m; absorb the remaining factor
    if den != 1:
        e = d
        while (m ** e) % t.denominator != 0:
            e += 1
            if e > 10_000:
                raise ValueError(f"{t} is not in Z[1/{m}]")
        return t.numerator * (m ** e // t.denominator), e
    return t.numerator, d


def identity(m: int) -> BSElem:
    _check_m(m)
    return BSElem(m, 0, 0, 0)


def gen_a(m: int, n: int = 1) -> BSElem:
    _check_m(m)
    return BSElem(m, 0, 0, n)


def gen_b(m: int, n: int = 1) -> BSElem:
    _check_m(m)
    return BSElem.make(m, n, 0)


def bs_mul(x: BSElem, y: BSElem) -> BSElem:
    m = x.m
    if y.m != m:
        raise ValueError("elements of different BS(1, m)")
    n2, e2 = _scale(m, y.num, y.mexp, x.k)
    e = max(x.mexp, e2)
    num = x.num * m ** (e - x.mexp) + n2 * m ** (e - e2)
    num, e = _normalize(m, num, e)
    return BSElem(m, num, e, x.k + y.k)


def bs_inv(x: BSElem) -> BSElem:
    num, e = _scale(x.m, -x.num, x.mexp, -x.k)
    return BSElem(x.m, num, e, -x.k)


def bs_pow(x: BSElem, n: int) -> BSElem:
    if n < 0:
        x, n = bs_inv(x), -n
    result = identity(x.m)
    base = x
    while n:
        if n & 1:
            result = bs_mul(result, base)
        base = bs_mul(base, base)
        n >>= 1
    return result


def _int_value(m: int, num: int, mexp: int) -> Optional[int]:
    num, mexp = _normalize(m, num, mexp)
    return num if mexp == 0 else None


def bs_membership(x: BSElem, which: str) -> Optional[int]:
    """Exponent of ``x`` in ``<a>`` (``which="a"``) or ``<b>`` (``which="b"``)."""
    if which == STABLE:
        return x.k if x.num == 0 else None
    if which == NORMAL:
        return x.num if x.k == 0 and x.mexp == 0 else None
    raise ValueError(f"unknown subgroup {which!r}")


def bs_factor(x: BSElem, order: str) -> Optional[Tuple[int, int]]:
    """Unique factorization ``x = a^p b^z`` (a-first) or ``x = b^q a^p`` (b-first).

    Returns ``(p, z)`` resp. ``(p, q)``, or None when ``x`` is not in the product set.
    """
    if order == A_FIRST:
        z = _int_value(x.m, x.num, x.mexp + x.k)
        return None if z is None else (x.k, z)
    if order == B_FIRST:
        q = _int_value(x.m, x.num, x.mexp)
        return None if q is None else (x.k, q)
    raise ValueError(f"unknown order {order!r}")


# --- words -----------------------------------------------------------------

BSWord = Tuple[Tuple[str, int], ...]

_TOKEN = re.compile(r"^([ab])(?:\^(-?\d+))?$")


def parse_bs_word(text: str) -> BSWord:
    out = []
    for tok in text.split():
        match = _TOKEN.match(tok)
        if not match:
            raise ValueError(f"bad BS token {tok!r}")
        out.append((match.group(1), int(match.group(2) or 1)))
    return normalize_word(out)


def format_bs_word(word: Sequence[Tuple[str, int]]) -> str:
    return " ".join(c if e == 1 else f"{c}^{e}" for c, e in word)


def normalize_word(word: Iterable[Tuple[str, int]]) -> BSWord:
    out: list = []
    for c, e in word:
        if c not in (STABLE, NORMAL):
            raise ValueError(f"bad letter {c!r}")
        if e == 0:
            continue
        if out and out[-1][0] == c:
            e += out[-1][1]
            out.pop()
            if e == 0:
                continue
        out.append((c, e))
    return tuple(out)


def bs_eval(m: int, word: Iterable[Tuple[str, int]]) -> BSElem:
    x = identity(m)
    for c, e in word:
        x = bs_mul(x, gen_a(m, e) if c == STABLE else gen_b(m, e))
    return x


def _valuation(m: int, z: int) -> int:
    v = 0
    while z and z % m == 0:
        z //= m
        v += 1
    return v


def britton_reduce(m: int, word: Iterable[Tuple[str, int]]) -> BSWord:
    """Remove every pinch ``a b^z a^-1`` and ``a^-1 b^(mz) a``.

    The result is empty exactly when the word represents the identity.
    """
    _check_m(m)
    stack: list = []

    def push(c: str, e: int) -> None:
        if e == 0:
            return
        if stack and stack[-1][0] == c:
            e += stack.pop()[1]
            if e == 0:
                return
        stack.append((c, e))
        if c != STABLE or len(stack) < 3:
            return
        (c1, p), (c2, z), (_, q) = stack[-3:]
        if c1 != STABLE or c2 != NORMAL:
            return
        if p > 0 and q < 0:
            j = min(p, -q)
            z2 = z * m ** j
        elif p < 0 and q > 0:
            j = min(-p, q, _valuation(m, z))
            if j == 0:
                return
            z2 = z // m ** j
            j = -j
        else:
            return
        del stack[-3:]
        push(STABLE, p - j)
        push(NORMAL, z2)
        push(STABLE, q + j)

    for c, e in word:
        push(c, e)
    return tuple(stack)
