"""Completely multiplicative functions with values on the unit circle,
Dirichlet characters, pretentious distance and the partial sums F_N, G_{P,N}."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd

import numpy as np

from .errors import MissingFill, ReducibleForm
from .numeric import TAU, UnitComplex, factorize, primes_array, primes_in_range, reduce_angle
from .quadforms import BinaryQuadraticForm, is_irreducible, omega

INT64_SAFE = 2**62


# ---------------------------------------------------------------- characters


@dataclass(frozen=True, eq=False)
class DirichletCharacter:
    """Character mod q stored as turns (fractions of a full circle) on units."""

    modulus: int
    turns: tuple  # length q; Fraction on units, None elsewhere
    label: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if len(self.turns) != self.modulus:
            raise ValueError("value table must have one entry per residue")
        angles = np.full(self.modulus, np.nan)
        for r, t in enumerate(self.turns):
            if t is not None:
                angles[r] = TAU * float(t)
        angles.setflags(write=False)
        object.__setattr__(self, "_angles", angles)

    def __eq__(self, other):
        return (
            isinstance(other, DirichletCharacter)
            and self.modulus == other.modulus
            and self.turns == other.turns
        )

    def __hash__(self):
        return hash((self.modulus, self.turns))

    def is_unit(self, n: int) -> bool:
        return self.turns[n % self.modulus] is not None

    def turn(self, n: int):
        return self.turns[n % self.modulus]

    def __call__(self, n: int) -> complex:
        t = self.turns[n % self.modulus]
        if t is None:
            return 0j
        return UnitComplex.from_turns(t).value

    def unit_angle(self, n: int) -> float:
        return self._angles[n % self.modulus]

    @property
    def is_principal(self) -> bool:
        return all(t in (None, 0) for t in self.turns)

    def to_dict(self):
        return {
            "modulus": self.modulus,
            "turns": {str(r): str(t) for r, t in enumerate(self.turns) if t is not None},
        }

    @classmethod
    def from_dict(cls, d):
        q = int(d["modulus"])
        table = [None] * q
        for r, t in d["turns"].items():
            table[int(r) % q] = Fraction(t) % 1
        return cls(q, tuple(table))


def _unit_group_generators(q):
    """Cyclic decomposition of (Z/q)^x as a list of (generator mod q, order)."""
    gens = []
    for p, e in factorize(q) if q > 1 else ():
        pe = p**e
        rest = q // pe
        if p == 2:
            if e == 1:
                comps = []
            elif e == 2:
                comps = [(pe - 1, 2)]
            else:
                comps = [(pe - 1, 2), (5, 2 ** (e - 2))]
        else:
            phi = pe - pe // p
            g = next(g for g in range(2, pe) if gcd(g, p) == 1 and _order(g, pe) == phi)
            comps = [(g, phi)]
        for g, order in comps:
            # lift to mod q: g mod p^e, 1 mod the rest
            lifted = g if rest == 1 else (g * rest * pow(rest, -1, pe) + pe * pow(pe, -1, rest)) % q
            gens.append((lifted, order))
    return gens


def _order(g, m):
    k, x = 1, g % m
    while x != 1:
        x = x * g % m
        k += 1
    return k


@lru_cache(maxsize=None)
def characters_mod(q: int) -> tuple:
    """All phi(q) characters mod q; index 0 is principal."""
    if q < 1:
        raise ValueError("q must be >= 1")
    gens = _unit_group_generators(q)
    logs = {}
    for exps in itertools.product(*(range(o) for _, o in gens)):
        u = 1
        for (g, _), k in zip(gens, exps):
            u = u * pow(g, k, q) % q
        logs[u % q] = exps
    if q == 1:
        logs = {0: ()}
    chars = []
    for ks in itertools.product(*(range(o) for _, o in gens)):
        table = [None] * q
        for u, exps in logs.items():
            table[u] = sum(
                (Fraction(k * x, o) for k, x, (_, o) in zip(ks, exps, gens)), Fraction(0)
            ) % 1
        chars.append(DirichletCharacter(q, tuple(table), label=ks))
    return tuple(chars)


def character(q: int, index: int = 0) -> DirichletCharacter:
    chars = characters_mod(q)
    if not 0 <= index < len(chars):
        raise ValueError(f"character index {index} out of range for q={q}")
    return chars[index]


def character_from_values(q: int, values: dict) -> DirichletCharacter:
    """The character mod q taking the given complex values on the given residues."""
    for chi in characters_mod(q):
        if all(abs(chi(r) - complex(v)) < 1e-9 for r, v in values.items()):
            return chi
    raise ValueError(f"no character mod {q} matches {values}")


def conductor(chi: DirichletCharacter) -> int:
    """Smallest period of n -> chi(n) on the positive integers."""
    q = chi.modulus
    for d in range(1, q + 1):
        if q % d:
            continue
        if all(chi.turns[n % q] == chi.turns[(n + d) % q] for n in range(q)):
            return d
    return q


# ---------------------------------------------------------------- functions


def _strip(n, p):
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return n, e


def _strip_vec(ns, p):
    ns = ns.copy()
    e = np.zeros(ns.shape, dtype=np.int64)
    idx = np.flatnonzero(ns % p == 0)
    while idx.size:
        ns[idx] //= p
        e[idx] += 1
        idx = idx[ns[idx] % p == 0]
    return ns, e


def _as_array(ns):
    ns = list(ns) if not isinstance(ns, np.ndarray) else ns
    arr = np.asarray(ns)
    if arr.dtype == object:
        if len(arr) and max(abs(int(x)) for x in arr) < INT64_SAFE:
            arr = arr.astype(np.int64)
    return arr


class MultiplicativeFunction:
    """Base class. Subclasses supply prime_angle and, where possible, a
    factorization-free _angle for large arguments."""

    kind = "abstract"

    def prime_angle(self, p: int) -> float:
        raise NotImplementedError

    def _angle(self, n: int) -> float:
        return sum(e * self.prime_angle(p) for p, e in factorize(n))

    def _angles_vec(self, ns):
        return np.array([self._angle(int(n)) for n in ns], dtype=float)

    def angle(self, n: int) -> float:
        if n < 1:
            raise ValueError("multiplicative functions are evaluated at n >= 1")
        return reduce_angle(self._angle(int(n)))

    def __call__(self, n: int) -> UnitComplex:
        return UnitComplex(self.angle(n))

    def angles(self, ns) -> np.ndarray:
        """Unreduced angles at each entry of ns (entries >= 1)."""
        arr = _as_array(ns)
        if arr.dtype == object:
            return np.array([self._angle(int(n)) for n in arr], dtype=float)
        return self._angles_vec(arr.astype(np.int64))

    def prime_values(self, ps) -> np.ndarray:
        return np.exp(1j * self.angles(ps))

    def to_dict(self) -> dict:
        raise NotImplementedError

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def __repr__(self):
        return f"{type(self).__name__}({self.to_json()})"

    def __eq__(self, other):
        return isinstance(other, MultiplicativeFunction) and self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(self.to_json())


class One(MultiplicativeFunction):
    kind = "one"

    def prime_angle(self, p):
        return 0.0

    def _angle(self, n):
        return 0.0

    def _angles_vec(self, ns):
        return np.zeros(ns.shape)

    def to_dict(self):
        return {"kind": self.kind}


class Archimedean(MultiplicativeFunction):
    """n -> n^{it}."""

    kind = "archimedean"

    def __init__(self, t: float):
        self.t = float(t)

    def prime_angle(self, p):
        return self.t * math.log(p)

    def _angle(self, n):
        return self.t * math.log(n) if n > 1 else 0.0

    def _angles_vec(self, ns):
        return self.t * np.log(ns.astype(float))

    def to_dict(self):
        return {"kind": self.kind, "t": self.t}


class CharacterLift(MultiplicativeFunction):
    """chi on primes not dividing q, explicit unit values (fill) on p | q."""

    kind = "character_lift"

    def __init__(self, chi: DirichletCharacter, fill: dict | None = None):
        self.chi = chi
        self.qprimes = factorize(chi.modulus).primes() if chi.modulus > 1 else []
        if fill is None:
            fill = {p: UnitComplex(0.0) for p in self.qprimes}
        self.fill = {int(p): (v if isinstance(v, UnitComplex) else UnitComplex(v)) for p, v in fill.items()}

    def _fill_angle(self, p):
        try:
            return self.fill[p].angle
        except KeyError:
            raise MissingFill(f"no value supplied at p={p} dividing q={self.chi.modulus}") from None

    def prime_angle(self, p):
        if p in self.qprimes:
            return self._fill_angle(p)
        return float(self.chi.unit_angle(p))

    def _angle(self, n):
        total = 0.0
        for p in self.qprimes:
            n, e = _strip(n, p)
            if e:
                total += e * self._fill_angle(p)
        return total + float(self.chi.unit_angle(n))

    def _angles_vec(self, ns):
        total = np.zeros(ns.shape)
        for p in self.qprimes:
            ns, e = _strip_vec(ns, p)
            if e.any():
                total = total + e * self._fill_angle(p)
        return total + self.chi._angles[ns % self.chi.modulus]

    def to_dict(self):
        return {
            "kind": self.kind,
            "chi": self.chi.to_dict(),
            "fill": {str(p): v.angle for p, v in sorted(self.fill.items())},
        }


def _rule_loglog(p, c):
    return TAU * c / math.log(math.log(p))


def _rule_inv_log(p, c):
    return TAU * c / math.log(p)


# rule tag -> (formula, smallest prime where the formula is used, declared class)
PRIME_RULES = {
    "loglog": (_rule_loglog, 3, "DeclaredOscillating"),
    "inv_log": (_rule_inv_log, 2, "Unknown"),
}


class PrimeFormula(MultiplicativeFunction):
    """p -> e(c / log log p) ("loglog", p >= 3) or e(c / log p) ("inv_log").
    Primes below a rule's domain get the angle `below`."""

    kind = "prime_formula"

    def __init__(self, rule: str = "loglog", c: float = 1.0, below: float = 0.0):
        if rule not in PRIME_RULES:
            raise ValueError(f"unknown prime rule {rule!r}")
        self.rule, self.c, self.below = rule, float(c), float(below)
        self._fn, self._min_p, _ = PRIME_RULES[rule]

    def prime_angle(self, p):
        if p < self._min_p:
            return self.below
        return self._fn(p, self.c)

    def _angles_vec(self, ns):
        return np.array([self._angle(int(n)) for n in ns], dtype=float)

    def to_dict(self):
        return {"kind": self.kind, "rule": self.rule, "c": self.c, "below": self.below}


class Tweaked(MultiplicativeFunction):
    """base with finitely many prime values overridden."""

    kind = "tweaked"

    def __init__(self, base: MultiplicativeFunction, overrides: dict):
        self.base = base
        self.overrides = {
            int(p): (v if isinstance(v, UnitComplex) else UnitComplex(v)) for p, v in overrides.items()
        }

    def prime_angle(self, p):
        if p in self.overrides:
            return self.overrides[p].angle
        return self.base.prime_angle(p)

    def _angle(self, n):
        total = 0.0
        for p, v in self.overrides.items():
            n, e = _strip(n, p)
            if e:
                total += e * v.angle
        return total + self.base._angle(n)

    def _angles_vec(self, ns):
        total = np.zeros(ns.shape)
        for p, v in self.overrides.items():
            ns, e = _strip_vec(ns, p)
            if e.any():
                total = total + e * v.angle
        return total + self.base._angles_vec(ns)

    def to_dict(self):
        return {
            "kind": self.kind,
            "base": self.base.to_dict(),
            "overrides": {str(p): v.angle for p, v in sorted(self.overrides.items())},
        }


class Product(MultiplicativeFunction):
    kind = "product"

    def __init__(self, f: MultiplicativeFunction, g: MultiplicativeFunction):
        self.f, self.g = f, g

    def prime_angle(self, p):
        return self.f.prime_angle(p) + self.g.prime_angle(p)

    def _angle(self, n):
        return self.f._angle(n) + self.g._angle(n)

    def _angles_vec(self, ns):
        return self.f._angles_vec(ns) + self.g._angles_vec(ns)

    def to_dict(self):
        return {"kind": self.kind, "f": self.f.to_dict(), "g": self.g.to_dict()}


class Power(MultiplicativeFunction):
    kind = "power"

    def __init__(self, f: MultiplicativeFunction, k: int):
        self.f, self.k = f, int(k)

    def prime_angle(self, p):
        return self.k * self.f.prime_angle(p)

    def _angle(self, n):
        return self.k * self.f._angle(n)

    def _angles_vec(self, ns):
        return self.k * self.f._angles_vec(ns)

    def to_dict(self):
        return {"kind": self.kind, "f": self.f.to_dict(), "k": self.k}


class Conjugate(MultiplicativeFunction):
    kind = "conjugate"

    def __init__(self, f: MultiplicativeFunction):
        self.f = f

    def prime_angle(self, p):
        return -self.f.prime_angle(p)

    def _angle(self, n):
        return -self.f._angle(n)

    def _angles_vec(self, ns):
        return -self.f._angles_vec(ns)

    def to_dict(self):
        return {"kind": self.kind, "f": self.f.to_dict()}


class Spliced(MultiplicativeFunction):
    """`on` at primes p with omega_P(p) > 0, `off` at the remaining primes."""

    kind = "spliced"

    def __init__(self, on: MultiplicativeFunction, off: MultiplicativeFunction, form: BinaryQuadraticForm):
        self.on, self.off, self.form = on, off, form

    def prime_angle(self, p):
        return self.on.prime_angle(p) if omega(self.form, p) > 0 else self.off.prime_angle(p)

    def to_dict(self):
        return {
            "kind": self.kind,
            "on": self.on.to_dict(),
            "off": self.off.to_dict(),
            "form": self.form.to_list(),
        }


def from_dict(d: dict) -> MultiplicativeFunction:
    kind = d["kind"]
    if kind == "one":
        return One()
    if kind == "archimedean":
        return Archimedean(d["t"])
    if kind == "character_lift":
        return CharacterLift(DirichletCharacter.from_dict(d["chi"]), {int(p): UnitComplex(a) for p, a in d["fill"].items()})
    if kind == "prime_formula":
        return PrimeFormula(d["rule"], d.get("c", 1.0), d.get("below", 0.0))
    if kind == "tweaked":
        return Tweaked(from_dict(d["base"]), {int(p): UnitComplex(a) for p, a in d["overrides"].items()})
    if kind == "product":
        return Product(from_dict(d["f"]), from_dict(d["g"]))
    if kind == "power":
        return Power(from_dict(d["f"]), d["k"])
    if kind == "conjugate":
        return Conjugate(from_dict(d["f"]))
    if kind == "spliced":
        return Spliced(from_dict(d["on"]), from_dict(d["off"]), BinaryQuadraticForm.parse(d["form"]))
    raise ValueError(f"unknown descriptor kind {kind!r}")


def from_json(text: str) -> MultiplicativeFunction:
    return from_dict(json.loads(text))


def parse_function(text: str) -> MultiplicativeFunction:
    """Shorthand used by the CLI:
    one | arch:T | chi:Q:INDEX | loglog[:C] | inv_log[:C] | JSON descriptor | @file.json"""
    text = text.strip()
    if text.startswith("@"):
        with open(text[1:]) as fh:
            return from_json(fh.read())
    if text.startswith("{"):
        return from_json(text)
    head, *rest = text.split(":")
    if head == "one":
        return One()
    if head == "arch":
        return Archimedean(float(rest[0]))
    if head == "chi":
        return CharacterLift(character(int(rest[0]), int(rest[1]) if len(rest) > 1 else 0))
    if head in PRIME_RULES:
        return PrimeFormula(head, float(rest[0]) if rest else 1.0)
    raise ValueError(f"cannot parse function {text!r}")


def evaluate(f: MultiplicativeFunction, n: int) -> UnitComplex:
    return f(n)


def eval_rational(f: MultiplicativeFunction, num: int, den: int) -> UnitComplex:
    if num < 1 or den < 1:
        raise ValueError("numerator and denominator must be >= 1")
    return UnitComplex(f._angle(num) - f._angle(den))


# ---------------------------------------------------------------- targets and sums


class Twist:
    """The comparison target chi(n) n^{it}; vanishes where chi does."""

    def __init__(self, chi: DirichletCharacter, t: float = 0.0):
        self.chi, self.t = chi, float(t)

    def prime_values(self, ps) -> np.ndarray:
        ps = np.asarray(ps, dtype=np.int64)
        ang = self.chi._angles[ps % self.chi.modulus]
        unit = ~np.isnan(ang)
        out = np.zeros(ps.shape, dtype=complex)
        out[unit] = np.exp(1j * (ang[unit] + self.t * np.log(ps[unit].astype(float))))
        return out

    def value(self, n: int) -> complex:
        c = self.chi(n)
        return c * complex(math.cos(self.t * math.log(n)), math.sin(self.t * math.log(n))) if c else 0j


def _primes_between(A, B):
    return np.asarray(primes_in_range(A, B), dtype=np.int64)


def distance_squared(f, g, A: float, B: float, truncation: int = 10**5) -> float:
    if math.isinf(B):
        B = truncation
    ps = _primes_between(A, B)
    if len(ps) == 0:
        return 0.0
    terms = (1.0 - (f.prime_values(ps) * np.conj(g.prime_values(ps))).real) / ps
    return max(0.0, math.fsum(terms.tolist()))


def distance(f, g, A: float, B: float, truncation: int = 10**5) -> float:
    """D(f, g; A, B); B = inf is truncated at `truncation`."""
    return math.sqrt(distance_squared(f, g, A, B, truncation))


def _weighted_partial(f, chi, t, L, N, weights=None):
    ps = _primes_between(L, N)
    if len(ps) == 0:
        return 0j
    terms = (f.prime_values(ps) * np.conj(Twist(chi, t).prime_values(ps)) - 1.0) / ps
    if weights is not None:
        terms = terms * weights(ps)
    return complex(math.fsum(terms.real.tolist()), math.fsum(terms.imag.tolist()))


def f_partial(f, chi: DirichletCharacter, t: float, L: float, N: float) -> complex:
    """F_N(f, L) = sum_{L<p<=N} (f(p) conj(chi(p)) p^{-it} - 1)/p."""
    return _weighted_partial(f, chi, t, L, N)


def g_partial(f, chi: DirichletCharacter, t: float, P: BinaryQuadraticForm, L: float, N: float) -> complex:
    """G_{P,N}(f, L): as F_N with each prime weighted by omega_P(p)."""
    if not is_irreducible(P):
        raise ReducibleForm(str(P))
    return _weighted_partial(
        f, chi, t, L, N, weights=lambda ps: np.array([omega(P, int(p)) for p in ps], dtype=float)
    )


# ---------------------------------------------------------------- classification


@dataclass(frozen=True)
class DescriptorClass:
    name: str
    form: BinaryQuadraticForm | None = None

    def __str__(self):
        return f"{self.name}({self.form})" if self.form is not None else self.name


ARCH = DescriptorClass("Archimedean")
FSL = DescriptorClass("FiniteSupportLift")
OSC = DescriptorClass("DeclaredOscillating")
UNKNOWN = DescriptorClass("Unknown")


def _for_form(P):
    return DescriptorClass("FiniteSupportLiftForForm", P)


def classify_descriptor(f: MultiplicativeFunction) -> DescriptorClass:
    """Syntactic class of a descriptor tree."""
    if isinstance(f, (One, Archimedean)):
        return ARCH
    if isinstance(f, CharacterLift):
        return FSL
    if isinstance(f, PrimeFormula):
        return DescriptorClass(PRIME_RULES[f.rule][2])
    if isinstance(f, Tweaked):
        inner = classify_descriptor(f.base)
        return FSL if inner == ARCH else inner
    if isinstance(f, Power):
        return ARCH if f.k == 0 else classify_descriptor(f.f)
    if isinstance(f, Conjugate):
        return classify_descriptor(f.f)
    if isinstance(f, Product):
        a, b = classify_descriptor(f.f), classify_descriptor(f.g)
        if a == b == ARCH:
            return ARCH
        if a in (ARCH, FSL) and b in (ARCH, FSL):
            return FSL
        if a.name == "FiniteSupportLiftForForm" and (b in (ARCH, FSL) or b == a):
            return a
        if b.name == "FiniteSupportLiftForForm" and a in (ARCH, FSL):
            return b
        return UNKNOWN
    if isinstance(f, Spliced):
        on, off = classify_descriptor(f.on), classify_descriptor(f.off)
        if on in (ARCH, FSL) and off in (ARCH, FSL):
            return FSL
        if on in (ARCH, FSL):
            return _for_form(f.form)
        return UNKNOWN
    return UNKNOWN
