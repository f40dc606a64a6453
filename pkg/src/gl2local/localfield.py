"""Residue-ring arithmetic for a p-adic field with prime residue field.

Elements are stored as ``p**val * unit`` with the unit known modulo
``p**prec``.  Characters of the unit group are parametrised through a
primitive root ``g`` modulo ``p**2``, which generates ``(Z/p^N)^x`` for
every ``N`` when ``p`` is odd.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

TWO_PI_I = 2j * math.pi


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % k for k in range(2, math.isqrt(n) + 1))


def _vp(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def totient_pk(p: int, k: int) -> int:
    """Order of (Z/p^k)^x; 1 for k = 0."""
    return 1 if k == 0 else (p - 1) * p ** (k - 1)


@lru_cache(maxsize=None)
def primitive_root(p: int) -> int:
    """Smallest g that generates (Z/p^2)^x, hence every (Z/p^k)^x."""
    if p == 2 or not _is_prime(p):
        raise ValueError(f"need an odd prime, got {p}")
    order = p * (p - 1)
    factors = {f for f in range(2, order + 1) if order % f == 0 and _is_prime(f)}
    for g in range(2, p * p):
        if g % p and all(pow(g, order // f, p * p) != 1 for f in factors):
            return g
    raise RuntimeError("no primitive root found")  # pragma: no cover


@lru_cache(maxsize=64)
def dlog_table(p: int, level: int) -> np.ndarray:
    """Array ``T`` of length p**level with ``g**T[u] == u`` for units u, -1 elsewhere."""
    mod = p**level
    table = np.full(mod, -1, dtype=np.int64)
    g = primitive_root(p)
    x = 1
    for k in range(totient_pk(p, level)):
        table[x] = k
        x = x * g % mod
    table.setflags(write=False)
    return table


@dataclass(frozen=True)
class FiniteLocalField:
    """Q_p truncated at precision ``prec`` with an additive character of conductor p^-d."""

    p: int
    d: int = 0
    prec: int = 4

    def __post_init__(self):
        if self.p == 2 or not _is_prime(self.p):
            raise ValueError("p must be an odd prime")
        if self.prec < 1 or self.d < 0:
            raise ValueError("need prec >= 1 and d >= 0")

    @property
    def q(self) -> int:
        return self.p

    @property
    def modulus(self) -> int:
        return self.p**self.prec

    def element(self, x) -> "LocalElement":
        """Build an element from an int or Fraction."""
        x = Fraction(x)
        if x == 0:
            return LocalElement.zero(self)
        num, den = x.numerator, x.denominator
        val = _vp(num, self.p) - _vp(den, self.p)
        num //= self.p ** _vp(num, self.p)
        den //= self.p ** _vp(den, self.p)
        unit = num * pow(den, -1, self.modulus) % self.modulus
        return LocalElement(self, val, unit)

    def uniformizer_power(self, k: int) -> "LocalElement":
        return LocalElement(self, k, 1)


@dataclass(frozen=True)
class LocalElement:
    field: FiniteLocalField
    val: int
    unit: int
    is_zero: bool = False

    def __post_init__(self):
        if not self.is_zero and self.unit % self.field.p == 0:
            raise ValueError("unit part must be prime to p")

    @classmethod
    def zero(cls, field: FiniteLocalField) -> "LocalElement":
        return cls(field, 0, 1, True)

    def __mul__(self, other: "LocalElement") -> "LocalElement":
        if self.is_zero or other.is_zero:
            return LocalElement.zero(self.field)
        return LocalElement(
            self.field, self.val + other.val, self.unit * other.unit % self.field.modulus
        )

    def __add__(self, other: "LocalElement") -> "LocalElement":
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        f = self.field
        a, b = (self, other) if self.val <= other.val else (other, self)
        shift = b.val - a.val
        if shift >= f.prec:
            return a
        s = (a.unit + f.p**shift * b.unit) % f.modulus
        if s == 0:
            return LocalElement.zero(f)
        k = _vp(s, f.p)
        # the k digits lost to cancellation are unknown; pad with zeros
        return LocalElement(f, a.val + k, (s // f.p**k) % f.modulus)

    def __neg__(self) -> "LocalElement":
        if self.is_zero:
            return self
        return LocalElement(self.field, self.val, (-self.unit) % self.field.modulus)

    def __sub__(self, other: "LocalElement") -> "LocalElement":
        return self + (-other)

    def inverse(self) -> "LocalElement":
        if self.is_zero:
            raise ZeroDivisionError("zero has no inverse")
        return LocalElement(self.field, -self.val, pow(self.unit, -1, self.field.modulus))

    def abs(self) -> float:
        return 0.0 if self.is_zero else float(self.field.q) ** (-self.val)


def unit_reps(field: FiniteLocalField, level: int) -> list[LocalElement]:
    """Representatives of O^x / (1 + p^level)."""
    if not 1 <= level <= field.prec:
        raise ValueError(f"level {level} outside [1, {field.prec}]")
    return [LocalElement(field, 0, int(u)) for u in unit_rep_ints(field.p, level)]


def unit_rep_ints(p: int, level: int) -> np.ndarray:
    """Integers in [1, p^level) prime to p, as an array."""
    u = np.arange(1, p**level, dtype=np.int64)
    return u[u % p != 0]


@dataclass(frozen=True)
class UnitChar:
    """Character of O^x with chi(g^k) = exp(2 pi i a k / phi(p^level)).

    ``level`` is the conductor exponent; construct through ``UnitChar.make`` to
    get the reduced form.
    """

    p: int
    level: int
    a: int

    @classmethod
    def make(cls, p: int, level: int, a: int) -> "UnitChar":
        a %= totient_pk(p, level)
        while level >= 1:
            if a == 0:
                level, a = 0, 0
                break
            if level >= 2 and a % p == 0:
                a //= p
                level -= 1
                continue
            break
        return cls(p, level, a)

    @classmethod
    def trivial(cls, p: int) -> "UnitChar":
        return cls(p, 0, 0)

    @classmethod
    def quadratic(cls, p: int) -> "UnitChar":
        return cls.make(p, 1, (p - 1) // 2)

    @property
    def order(self) -> int:
        n = totient_pk(self.p, self.level)
        return n // math.gcd(n, self.a)

    @property
    def log_table(self) -> dict[int, Fraction]:
        """Generator -> exponent (as a fraction of a full turn)."""
        if self.level == 0:
            return {}
        return {primitive_root(self.p): Fraction(self.a, totient_pk(self.p, self.level))}

    def lift(self, level: int) -> int:
        """Exponent parameter of the same character viewed at a higher level."""
        if level < self.level:
            raise ValueError("cannot lower level")
        if self.level == 0:
            return 0
        return self.a * self.p ** (level - self.level)

    def __mul__(self, other: "UnitChar") -> "UnitChar":
        lv = max(self.level, other.level, 1)
        return UnitChar.make(self.p, lv, self.lift(lv) + other.lift(lv))

    def inverse(self) -> "UnitChar":
        return UnitChar.make(self.p, max(self.level, 1), -self.lift(max(self.level, 1)))

    def __call__(self, u) -> complex:
        if self.level == 0:
            return 1.0 + 0j
        u = int(u)
        if u % self.p == 0:
            raise ValueError("argument is not a unit")
        k = int(dlog_table(self.p, self.level)[u % self.p**self.level])
        return cmath.exp(TWO_PI_I * self.a * k / totient_pk(self.p, self.level))

    def values(self, units: np.ndarray) -> np.ndarray:
        """Vectorised evaluation on an integer array of units."""
        units = np.asarray(units, dtype=np.int64)
        if self.level == 0:
            return np.ones(units.shape, dtype=complex)
        k = dlog_table(self.p, self.level)[units % self.p**self.level]
        if np.any(k < 0):
            raise ValueError("argument is not a unit")
        return np.exp(TWO_PI_I * self.a * k / totient_pk(self.p, self.level))


def all_unit_chars(p: int, level: int) -> list[UnitChar]:
    """Every character of O^x of conductor at most ``level`` (each exactly once)."""
    if level == 0:
        return [UnitChar.trivial(p)]
    return [UnitChar.make(p, level, a) for a in range(totient_pk(p, level))]


@dataclass(frozen=True)
class MultChar:
    """Character of F^x: unit part times a value at the uniformizer."""

    unit_part: UnitChar
    at_uniformizer: complex = 1.0

    @classmethod
    def unramified(cls, p: int, value: complex) -> "MultChar":
        return cls(UnitChar.trivial(p), complex(value))

    @property
    def p(self) -> int:
        return self.unit_part.p

    @property
    def level(self) -> int:
        return self.unit_part.level

    def __mul__(self, other: "MultChar") -> "MultChar":
        return MultChar(self.unit_part * other.unit_part, self.at_uniformizer * other.at_uniformizer)

    def inverse(self) -> "MultChar":
        return MultChar(self.unit_part.inverse(), 1 / self.at_uniformizer)


def char_eval(chi: MultChar, x: LocalElement) -> complex:
    if x.is_zero:
        raise ValueError("character undefined at 0")
    return complex(chi.at_uniformizer) ** x.val * chi.unit_part(x.unit)


@dataclass(frozen=True)
class AddChar:
    """psi(x) = exp(2 pi i frac(p^d x)); trivial exactly on p^-d O."""

    field: FiniteLocalField

    def __call__(self, x: LocalElement) -> complex:
        return add_char_eval(self, x)

    def on_units(self, shift_val: int, units: np.ndarray) -> np.ndarray:
        """psi(p^shift_val * u) for an array of integer units u."""
        k = -(shift_val + self.field.d)
        if k <= 0:
            return np.ones(np.shape(units), dtype=complex)
        mod = self.field.p**k
        return np.exp(TWO_PI_I * (np.asarray(units, dtype=np.int64) % mod) / mod)


def add_char_eval(psi: AddChar, x: LocalElement) -> complex:
    f = psi.field
    if x.is_zero:
        return 1.0 + 0j
    k = -(x.val + f.d)
    if k <= 0:
        return 1.0 + 0j
    if -x.val > f.prec:
        raise ValueError("element below representable precision")
    mod = f.p**k
    return cmath.exp(TWO_PI_I * (x.unit % mod) / mod)


def conductor(chi: UnitChar, tol: float = 1e-9) -> int:
    """Minimal r with chi trivial on 1 + p^r O, found by scanning (not from chi.level)."""
    p = chi.p
    top = max(chi.level, 1)
    mod = p**top
    units = unit_rep_ints(p, top)
    if np.all(np.abs(chi.values(units) - 1) < tol):
        return 0
    for r in range(1, top + 1):
        sub = (1 + p**r * np.arange(p ** (top - r), dtype=np.int64)) % mod
        if np.all(np.abs(chi.values(sub) - 1) < tol):
            return r
    raise AssertionError("character not trivial on 1 + p^level")  # pragma: no cover
