"""Integer substrate: sieving, factorization, valuations, CRT, inverses,
Hensel lifting and unit-circle angles."""

from __future__ import annotations

import bisect
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from .errors import (
    IncompatibleCongruences,
    NotARoot,
    NotInvertible,
    NotSimpleRoot,
)

TAU = 2.0 * math.pi
TOL = 1e-12

_SPF_LIMIT = 2_000_000
_lock = threading.Lock()
_prime_cache = np.array([], dtype=np.int64)
_prime_cache_limit = 1
_spf = None


def _sieve_array(limit):
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


def primes_array(limit):
    """Primes <= limit as a shared read-only int64 array."""
    global _prime_cache, _prime_cache_limit
    if limit < 2:
        return np.array([], dtype=np.int64)
    with _lock:
        if limit > _prime_cache_limit:
            size = max(limit, 2 * _prime_cache_limit, 1000)
            _prime_cache = _sieve_array(size)
            _prime_cache.setflags(write=False)
            _prime_cache_limit = size
        cache = _prime_cache
    return cache[: bisect.bisect_right(cache, limit)]


def sieve_primes(limit: int) -> list[int]:
    """Primes in [2, limit], ascending."""
    return [int(p) for p in primes_array(limit)]


def primes_in_range(lo, hi):
    """Primes p with lo < p <= hi."""
    arr = primes_array(int(math.floor(hi)))
    start = bisect.bisect_right(arr, math.floor(lo)) if lo >= 0 else 0
    return [int(p) for p in arr[start:]]


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    if n < 3_317_044_064_679_887_385_961_981:
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
    from sympy import isprime

    return bool(isprime(n))


def _spf_table():
    global _spf
    with _lock:
        if _spf is None:
            spf = np.zeros(_SPF_LIMIT + 1, dtype=np.int32)
            for p in _sieve_array(math.isqrt(_SPF_LIMIT)):
                block = spf[p * p :: p]
                block[block == 0] = p
            rest = np.flatnonzero(spf == 0)
            spf[rest] = rest
            spf.setflags(write=False)
            _spf = spf
        return _spf


@dataclass(frozen=True)
class Factorization:
    """Sorted (prime, exponent) pairs; the factorization of 1 is empty."""

    factors: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        last = 1
        for p, e in self.factors:
            if p <= last or e < 1:
                raise ValueError(f"malformed factorization {self.factors}")
            last = p

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(sorted((int(p), int(e)) for p, e in d.items() if e)))

    def as_dict(self):
        return dict(self.factors)

    @property
    def value(self) -> int:
        out = 1
        for p, e in self.factors:
            out *= p**e
        return out

    def primes(self):
        return [p for p, _ in self.factors]

    def exponent(self, p):
        for q, e in self.factors:
            if q == p:
                return e
        return 0

    def __iter__(self):
        return iter(self.factors)

    def __len__(self):
        return len(self.factors)

    def __mul__(self, other):
        d = self.as_dict()
        for p, e in other.factors:
            d[p] = d.get(p, 0) + e
        return Factorization.from_dict(d)

    def log(self) -> float:
        return sum(e * math.log(p) for p, e in self.factors)


def factorize(n: int) -> Factorization:
    if n < 1:
        raise ValueError("factorize needs n >= 1")
    out = {}
    if n <= _SPF_LIMIT:
        spf = _spf_table()
        while n > 1:
            p = int(spf[n])
            out[p] = out.get(p, 0) + 1
            n //= p
        return Factorization.from_dict(out)
    for p in primes_array(10_000):
        p = int(p)
        if p * p > n:
            break
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    if n > 1:
        if n <= _SPF_LIMIT:
            for p, e in factorize(n):
                out[p] = out.get(p, 0) + e
        elif is_prime(n):
            out[n] = out.get(n, 0) + 1
        else:
            from sympy import factorint

            for p, e in factorint(n).items():
                out[int(p)] = out.get(int(p), 0) + int(e)
    return Factorization.from_dict(out)


def valuation(p: int, a: int) -> int:
    """Exponent of p in a (a != 0)."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if a == 0:
        raise ValueError("valuation of 0 is infinite")
    a = abs(a)
    k = 0
    while a % p == 0:
        a //= p
        k += 1
    return k


def crt_solve(constraints) -> tuple[int, int]:
    """Solve x = r_i (mod m_i); returns (least nonnegative x, lcm)."""
    constraints = list(constraints)
    if not constraints:
        raise ValueError("crt_solve needs at least one congruence")
    x, m = 0, 1
    for r, mod in constraints:
        if mod < 1:
            raise ValueError("moduli must be positive")
        r %= mod
        g = gcd(m, mod)
        if (r - x) % g:
            raise IncompatibleCongruences(
                f"x = {x} mod {m} conflicts with x = {r} mod {mod}"
            )
        step = m // g
        # x + m*t = r (mod mod)  =>  t = ((r-x)/g) * (m/g)^-1  mod (mod/g)
        mg = mod // g
        t = ((r - x) // g) * pow(step, -1, mg) % mg if mg > 1 else 0
        x += m * t
        m *= mg
        x %= m
    return x, m


def mod_inverse(a: int, m: int) -> int:
    if m < 2:
        raise ValueError("modulus must be >= 2")
    if gcd(a, m) != 1:
        raise NotInvertible(f"gcd({a}, {m}) = {gcd(a, m)}")
    return pow(a, -1, m)


def hensel_lift(P, p: int, theta: int, z: int) -> int:
    """Lift a simple root z of g(x) = P(1,x) - p^theta from mod p to mod p^(theta+1)."""
    if theta < 0:
        raise ValueError("theta must be nonnegative")
    shift = p**theta
    g0, g1, g2 = P.alpha - shift, P.beta, P.gamma
    z %= p
    if (g0 + g1 * z + g2 * z * z) % p:
        raise NotARoot(f"{z} is not a root of P(1,x) - {p}^{theta} mod {p}")
    deriv = (g1 + 2 * g2 * z) % p
    if deriv == 0:
        raise NotSimpleRoot(f"derivative vanishes at {z} mod {p}")
    inv = pow(deriv, -1, p)
    x, mod = z, p
    for _ in range(theta):
        mod *= p
        x = (x - (g0 + g1 * x + g2 * x * x) * inv) % mod
    return x


def reduce_angle(theta: float) -> float:
    r = math.fmod(theta, TAU)
    if r < 0:
        r += TAU
    if r >= TAU:
        r = 0.0
    return r


def signed_angle(theta: float) -> float:
    """Representative in (-pi, pi]."""
    r = reduce_angle(theta)
    return r - TAU if r > math.pi else r


def chord(theta: float) -> float:
    """|e^{i theta} - 1|."""
    return 2.0 * abs(math.sin(theta / 2.0))


@dataclass(frozen=True)
class UnitComplex:
    angle: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "angle", reduce_angle(float(self.angle)))

    @classmethod
    def from_turns(cls, turns) -> "UnitComplex":
        turns = Fraction(turns) % 1 if isinstance(turns, (int, Fraction)) else turns % 1.0
        return cls(TAU * float(turns))

    @classmethod
    def from_complex(cls, w: complex) -> "UnitComplex":
        return cls(math.atan2(w.imag, w.real))

    @property
    def value(self) -> complex:
        return complex(math.cos(self.angle), math.sin(self.angle))

    def __mul__(self, other: "UnitComplex") -> "UnitComplex":
        return UnitComplex(self.angle + other.angle)

    def __truediv__(self, other: "UnitComplex") -> "UnitComplex":
        return UnitComplex(self.angle - other.angle)

    def __pow__(self, k: int) -> "UnitComplex":
        return UnitComplex(self.angle * k)

    def conjugate(self) -> "UnitComplex":
        return UnitComplex(-self.angle)

    def signed(self) -> float:
        return signed_angle(self.angle)

    def distance(self, other: "UnitComplex") -> float:
        return chord(self.angle - other.angle)

    def close_to(self, other, tol: float = TOL) -> bool:
        if not isinstance(other, UnitComplex):
            other = UnitComplex.from_complex(complex(other))
        return self.distance(other) <= tol

    def __complex__(self):
        return self.value


ONE = UnitComplex(0.0)


def unit_power(n: int, t: float) -> UnitComplex:
    """n^{it}."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if t == 0 or n == 1:
        return ONE
    return UnitComplex(t * math.log(n))
