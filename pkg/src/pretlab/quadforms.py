"""Binary quadratic forms alpha*m^2 + beta*m*n + gamma*n^2."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import LargeModulusNonSimple, NotReducible, ReducibleForm
from .numeric import factorize, primes_array

EXHAUSTIVE_LIMIT = 10**6


@dataclass(frozen=True)
class BinaryQuadraticForm:
    alpha: int
    beta: int
    gamma: int

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            object.__setattr__(self, name, int(getattr(self, name)))
        if self.alpha == self.beta == self.gamma == 0:
            raise ValueError("the zero form is not allowed")

    def __call__(self, m, n):
        return self.alpha * m * m + self.beta * m * n + self.gamma * n * n

    def at_one(self, x):
        """P(1, x)."""
        return self.alpha + self.beta * x + self.gamma * x * x

    @property
    def discriminant(self) -> int:
        return discriminant(self)

    @property
    def coefficients(self):
        return (self.alpha, self.beta, self.gamma)

    def scaled(self, k: int) -> "BinaryQuadraticForm":
        return BinaryQuadraticForm(k * self.alpha, k * self.beta, k * self.gamma)

    def __str__(self):
        terms = []
        for coef, mono in ((self.alpha, "m^2"), (self.beta, "mn"), (self.gamma, "n^2")):
            if coef == 0:
                continue
            mag = "" if abs(coef) == 1 else str(abs(coef))
            sign = "-" if coef < 0 else "+"
            terms.append((sign, mag + mono))
        text = "".join(f" {s} {t}" for s, t in terms).strip()
        return text[2:] if text.startswith("+ ") else "-" + text[2:]

    def to_list(self):
        return [self.alpha, self.beta, self.gamma]

    @classmethod
    def parse(cls, text) -> "BinaryQuadraticForm":
        """Accept 'a,b,c' or a 3-sequence."""
        if isinstance(text, str):
            parts = [int(x) for x in text.replace(" ", "").split(",")]
        else:
            parts = [int(x) for x in text]
        if len(parts) != 3:
            raise ValueError(f"a form needs three coefficients, got {text!r}")
        return cls(*parts)


def discriminant(P: BinaryQuadraticForm) -> int:
    return P.beta * P.beta - 4 * P.alpha * P.gamma


def _is_square(d: int) -> bool:
    return d >= 0 and math.isqrt(d) ** 2 == d


def is_irreducible(P: BinaryQuadraticForm) -> bool:
    return not _is_square(discriminant(P))


def _residue_roots(coefs, r):
    """Sorted x in [0, r) with c0 + c1 x + c2 x^2 = 0 mod r, by exhaustive scan."""
    c0, c1, c2 = (c % r for c in coefs)
    if r > 3_000_000_000:
        return [x for x in range(r) if (c0 + c1 * x + c2 * x * x) % r == 0]
    out = []
    chunk = 1 << 22
    for start in range(0, r, chunk):
        x = np.arange(start, min(r, start + chunk), dtype=np.int64)
        acc = (c2 * x + c1) % r
        acc = (acc * x + c0) % r
        out.extend(int(v) + start for v in np.flatnonzero(acc == 0))
    return out


@lru_cache(maxsize=200_000)
def _omega_cached(coefs, r):
    return len(_residue_roots(coefs, r))


def omega(P: BinaryQuadraticForm, r: int) -> int:
    """Number of residues n mod r with P(1, n) = 0 mod r."""
    if r < 1:
        raise ValueError("r must be >= 1")
    if r == 1:
        return 1
    return _omega_cached(P.coefficients, r)


def roots_mod_prime_power(P: BinaryQuadraticForm, p: int, k: int) -> list[int]:
    if k < 1:
        raise ValueError("k must be >= 1")
    mod = p**k
    if mod <= EXHAUSTIVE_LIMIT:
        return _residue_roots(P.coefficients, mod)
    base = _residue_roots(P.coefficients, p)
    out = []
    for z in base:
        deriv = (P.beta + 2 * P.gamma * z) % p
        if deriv == 0:
            raise LargeModulusNonSimple(f"root {z} mod {p} is not simple")
        inv = pow(deriv, -1, p)
        x, m = z, p
        for _ in range(k - 1):
            m *= p
            x = (x - P.at_one(x) * inv) % m
        out.append(x)
    return sorted(out)


def omega_partial_sum(P: BinaryQuadraticForm, X: int) -> float:
    """Sum over primes p <= X of omega_P(p)/p."""
    if not is_irreducible(P):
        raise ReducibleForm(str(P))
    return math.fsum(omega(P, int(p)) / int(p) for p in primes_array(int(X)))


def exceptional_primes(P: BinaryQuadraticForm) -> set[int]:
    """Primes dividing 2 * Delta * alpha * gamma; outside this set an irreducible
    form has omega_P(p) in {0, 2}."""
    prod = 2 * discriminant(P) * P.alpha * P.gamma
    if prod == 0:
        raise ValueError(f"degenerate form {P}")
    return set(factorize(abs(prod)).primes())


@dataclass(frozen=True)
class ReducibleSplit:
    lambda1: int
    lambda2: int

    def __post_init__(self):
        if self.lambda1 == self.lambda2 or 0 in (self.lambda1, self.lambda2):
            raise ValueError("need distinct nonzero lambdas")

    def form(self) -> BinaryQuadraticForm:
        return BinaryQuadraticForm(
            1, self.lambda1 + self.lambda2, self.lambda1 * self.lambda2
        )


def split_reducible(P: BinaryQuadraticForm) -> ReducibleSplit:
    """(m + l1 n)(m + l2 n) = P with l1 < l2."""
    if P.alpha != 1:
        raise NotReducible(f"{P} does not have leading coefficient 1")
    d = discriminant(P)
    if d <= 0 or not _is_square(d):
        raise NotReducible(f"{P} has discriminant {d}")
    if P.gamma == 0:
        raise NotReducible(f"{P} has the linear factor m")
    s = math.isqrt(d)
    l1, l2 = (P.beta - s) // 2, (P.beta + s) // 2
    return ReducibleSplit(l1, l2)
