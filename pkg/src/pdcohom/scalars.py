"""Exact coefficient rings: Z, Q, F_p and the truncated p-adics Z/p^N.

Elements are carried around as plain Python values (``int`` or
``Fraction``) already reduced to their canonical representative; a
:class:`ScalarRing` knows how to normalize and combine them.  The small
:class:`Scalar` wrapper pairs a value with its ring for callers that want
operator syntax and ring checking.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, gcd


class RingMismatch(ValueError):
    pass


class NonUnit(ArithmeticError):
    pass


class NoCanonicalMap(ValueError):
    pass


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    """Miller-Rabin with a fixed base set; trial division below 2^16."""
    if n < 2:
        return False
    if n < 1 << 16:
        if n % 2 == 0:
            return n == 2
        f = 3
        while f * f <= n:
            if n % f == 0:
                return False
            f += 2
        return True
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class ScalarRing:
    kind: str  # "Z", "Q", "Fp" or "Zpn"
    p: int = 0
    N: int = 0

    def __post_init__(self):
        if self.kind not in ("Z", "Q", "Fp", "Zpn"):
            raise ValueError(f"unknown ring kind {self.kind!r}")
        if self.kind in ("Fp", "Zpn"):
            if not is_prime(self.p):
                raise ValueError(f"{self.p} is not prime")
            if self.kind == "Fp" and self.N not in (0, 1):
                raise ValueError("prime field carries no precision")
            if self.kind == "Zpn" and self.N < 1:
                raise ValueError("precision must be positive")

    # constructors -----------------------------------------------------
    @staticmethod
    def integers() -> ScalarRing:
        return ScalarRing("Z")

    @staticmethod
    def rationals() -> ScalarRing:
        return ScalarRing("Q")

    @staticmethod
    def prime_field(p: int) -> ScalarRing:
        return ScalarRing("Fp", p, 1)

    @staticmethod
    def padic(p: int, N: int) -> ScalarRing:
        return ScalarRing("Zpn", p, N)

    # properties -------------------------------------------------------
    @property
    def modulus(self) -> int:
        """p^N for the residue rings, 0 otherwise."""
        if self.kind == "Fp":
            return self.p
        if self.kind == "Zpn":
            return self.p**self.N
        return 0

    @property
    def is_field(self) -> bool:
        return self.kind in ("Q", "Fp") or (self.kind == "Zpn" and self.N == 1)

    @property
    def characteristic(self) -> int:
        return self.modulus

    @property
    def embeds_in_q(self) -> bool:
        return self.kind in ("Z", "Q")

    def __str__(self) -> str:
        if self.kind == "Z":
            return "Z"
        if self.kind == "Q":
            return "Q"
        if self.kind == "Fp":
            return f"F_{self.p}"
        return f"Z/{self.p}^{self.N}"

    # arithmetic on raw values ----------------------------------------
    def __call__(self, value) -> int | Fraction:
        """Canonical representative of an int or Fraction in this ring."""
        if self.kind == "Q":
            return Fraction(value)
        if isinstance(value, Fraction):
            if self.kind == "Z":
                if value.denominator != 1:
                    raise ValueError(f"{value} is not an integer")
                return value.numerator
            return self.div(value.numerator % self.modulus,
                            value.denominator % self.modulus)
        if self.kind == "Z":
            return int(value)
        return int(value) % self.modulus

    def zero(self):
        return Fraction(0) if self.kind == "Q" else 0

    def one(self):
        return Fraction(1) if self.kind == "Q" else 1

    def add(self, a, b):
        m = self.modulus
        return (a + b) % m if m else a + b

    def sub(self, a, b):
        m = self.modulus
        return (a - b) % m if m else a - b

    def neg(self, a):
        m = self.modulus
        return (-a) % m if m else -a

    def mul(self, a, b):
        m = self.modulus
        return (a * b) % m if m else a * b

    def is_unit(self, a) -> bool:
        if self.kind == "Z":
            return a in (1, -1)
        if self.kind == "Q":
            return a != 0
        return a % self.p != 0

    def inv(self, a):
        if not self.is_unit(a):
            raise NonUnit(f"{a} is not a unit in {self}")
        if self.kind == "Z":
            return a
        if self.kind == "Q":
            return 1 / Fraction(a)
        return pow(a, -1, self.modulus)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, n: int):
        m = self.modulus
        return pow(a, n, m) if m else a**n

    def valuation(self, a) -> int | None:
        """p-adic valuation of a residue; N for zero in Z/p^N, None in Z/Q."""
        if self.kind in ("Z", "Q"):
            return None
        if a == 0:
            return self.N
        v = 0
        while a % self.p == 0:
            a //= self.p
            v += 1
        return v

    def format(self, a) -> str:
        return str(a)

    def from_integer(self, n: int):
        return self(n)

    # ring maps --------------------------------------------------------
    def has_map_to(self, target: ScalarRing) -> bool:
        if self == target:
            return True
        if self.kind == "Z":
            return True
        if self.kind == "Q":
            return False
        if target.kind in ("Fp", "Zpn"):
            return target.p == self.p and target.N <= self.N
        return False

    def map_to(self, target: ScalarRing, a):
        if not self.has_map_to(target):
            raise NoCanonicalMap(f"no canonical map {self} -> {target}")
        return target(a)


def same_ring(a: ScalarRing, b: ScalarRing) -> ScalarRing:
    if a != b:
        raise RingMismatch(f"{a} vs {b}")
    return a


@dataclass(frozen=True)
class Scalar:
    ring: ScalarRing
    value: int | Fraction

    @classmethod
    def of(cls, ring: ScalarRing, value) -> Scalar:
        return cls(ring, ring(value))

    def _other(self, other) -> int | Fraction:
        if isinstance(other, Scalar):
            same_ring(self.ring, other.ring)
            return other.value
        return self.ring(other)

    def __add__(self, other):
        return Scalar(self.ring, self.ring.add(self.value, self._other(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return Scalar(self.ring, self.ring.sub(self.value, self._other(other)))

    def __mul__(self, other):
        return Scalar(self.ring, self.ring.mul(self.value, self._other(other)))

    __rmul__ = __mul__

    def __neg__(self):
        return Scalar(self.ring, self.ring.neg(self.value))

    def inverse(self) -> Scalar:
        return Scalar(self.ring, self.ring.inv(self.value))

    def is_zero(self) -> bool:
        return self.value == 0

    def valuation(self):
        return self.ring.valuation(self.value)

    def __str__(self):
        return str(self.value)


def scalar_arith(op: str, a: Scalar, b: Scalar | None = None) -> Scalar:
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "neg":
        return -a
    if op == "inv":
        return a.inverse()
    raise ValueError(f"unknown op {op!r}")


# combinatorial coefficients ------------------------------------------------

def binomial(m: int, n: int) -> int:
    if n < 0 or m < 0 or n > m:
        return 0
    return comb(m, n)


@lru_cache(maxsize=None)
def _primes_upto(n: int) -> tuple[int, ...]:
    if n < 2:
        return ()
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, int(n**0.5) + 1):
        if sieve[i]:
            sieve[i * i::i] = bytearray(len(sieve[i * i::i]))
    return tuple(i for i, flag in enumerate(sieve) if flag)


def legendre(n: int, p: int) -> int:
    """Exponent of p in n!."""
    e = 0
    while n:
        n //= p
        e += n
    return e


def pd_composition_coefficient(m: int, n: int) -> int:
    """(mn)! / ((m!)^n n!), via prime exponent bookkeeping."""
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive")
    result = 1
    for p in _primes_upto(m * n):
        e = legendre(m * n, p) - n * legendre(m, p) - legendre(n, p)
        assert e >= 0, (m, n, p)
        if e:
            result *= p**e
    return result


def val_p(a: int, p: int) -> int | None:
    if a == 0:
        return None
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    return v


def egcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


__all__ = [
    "Scalar", "ScalarRing", "RingMismatch", "NonUnit", "NoCanonicalMap",
    "binomial", "pd_composition_coefficient", "scalar_arith", "is_prime",
    "legendre", "val_p", "egcd", "gcd",
]
