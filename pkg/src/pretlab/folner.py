"""Multiplicative Folner boxes Phi_r, Phi_{r,K}, Phi_{r,K,P} and the highly
divisible moduli Q_L and Q_{delta,L}."""

from __future__ import annotations

import itertools
import math
import threading
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np
from mpmath import iv, mp

from .errors import NotFoundWithinCap, PrimeNotInSupport, TooLarge
from .numeric import TAU, Factorization, chord, primes_in_range, sieve_primes
from .quadforms import BinaryQuadraticForm, omega

ENUMERATION_CAP = 10**6
KINDS = ("PhiR", "PhiRK", "PhiRKP")


@dataclass(frozen=True)
class FolnerSpec:
    kind: str
    r: int
    K: int | None = None
    form: BinaryQuadraticForm | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown family kind {self.kind!r}")
        if self.r < 2:
            raise ValueError("r must be >= 2")
        if self.kind != "PhiR" and (self.K is None or self.K <= self.r):
            raise ValueError("K must exceed r")
        if self.kind == "PhiRKP" and self.form is None:
            raise ValueError("PhiRKP needs a form")
        if self.kind != "PhiRKP" and self.form is not None:
            raise ValueError(f"{self.kind} takes no form")

    @classmethod
    def phi_r(cls, r):
        return cls("PhiR", r)

    @classmethod
    def phi_rk(cls, r, K):
        return cls("PhiRK", r, K)

    @classmethod
    def phi_rkp(cls, r, K, P):
        return cls("PhiRKP", r, K, P)

    @property
    def support(self) -> tuple[int, ...]:
        if self.kind == "PhiR":
            return tuple(sieve_primes(self.r))
        ps = primes_in_range(self.r, self.K)
        if self.kind == "PhiRKP":
            ps = [p for p in ps if omega(self.form, p) > 0]
        return tuple(ps)

    @property
    def window(self) -> range:
        """Admissible exponents: R < theta <= 3R/2 with R = r or K."""
        R = self.r if self.kind == "PhiR" else self.K
        return range(R + 1, (3 * R) // 2 + 1)

    @property
    def size(self) -> int:
        return len(self.window) ** len(self.support)

    def element(self, exponents: dict) -> "FolnerElement":
        return FolnerElement(self, tuple(sorted((int(p), int(t)) for p, t in exponents.items())))

    def to_dict(self):
        d = {"kind": self.kind, "r": self.r}
        if self.K is not None:
            d["K"] = self.K
        if self.form is not None:
            d["form"] = self.form.to_list()
        return d

    @classmethod
    def from_dict(cls, d):
        form = BinaryQuadraticForm.parse(d["form"]) if d.get("form") is not None else None
        return cls(d["kind"], int(d["r"]), d.get("K"), form)

    def __str__(self):
        if self.kind == "PhiR":
            return f"Phi_{self.r}"
        if self.kind == "PhiRK":
            return f"Phi_{{{self.r},{self.K}}}"
        return f"Phi_{{{self.r},{self.K},{self.form}}}"


@dataclass(frozen=True)
class FolnerElement:
    spec: FolnerSpec
    exponents: tuple  # sorted (p, theta)
    value: int = field(init=False, compare=False)

    def __post_init__(self):
        support = self.spec.support
        if [p for p, _ in self.exponents] != list(support):
            raise ValueError(f"exponent primes must be exactly the support {support}")
        window = self.spec.window
        for p, t in self.exponents:
            if t not in window:
                raise ValueError(f"theta_{p} = {t} outside window {window}")
        object.__setattr__(self, "value", self.factorization.value)

    @property
    def factorization(self) -> Factorization:
        return Factorization(self.exponents)

    def theta(self, p: int) -> int:
        return dict(self.exponents).get(p, 0)

    def __int__(self):
        return self.value

    def to_dict(self):
        return {"spec": self.spec.to_dict(), "exponents": {str(p): t for p, t in self.exponents}}

    @classmethod
    def from_dict(cls, d):
        return FolnerSpec.from_dict(d["spec"]).element({int(p): t for p, t in d["exponents"].items()})


def enumerate_family(spec: FolnerSpec, cap: int = ENUMERATION_CAP):
    """Every element once, lexicographic in the exponent tuple."""
    if spec.size > cap:
        raise TooLarge(f"|{spec}| = {spec.size} exceeds the enumeration cap {cap}")
    support = spec.support
    return (
        FolnerElement(spec, tuple(zip(support, thetas)))
        for thetas in itertools.product(spec.window, repeat=len(support))
    )


def sample(spec: FolnerSpec, count: int, seed: int) -> list[FolnerElement]:
    """Independent uniform draws over the exponent windows."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    support, window = spec.support, spec.window
    draws = rng.integers(window.start, window.stop, size=(count, len(support)))
    return [FolnerElement(spec, tuple(zip(support, (int(t) for t in row)))) for row in draws]


def elements(spec: FolnerSpec, samples: int = 50, seed: int = 0, cap: int = ENUMERATION_CAP):
    """(mode, list): the whole family when it fits under cap, else a seeded sample."""
    if spec.size <= cap:
        return "exhaustive", list(enumerate_family(spec, cap))
    return "sampled", sample(spec, samples, seed)


def dilation_defect(spec: FolnerSpec, p: int, mode: str = "exact", samples: int = 2000, seed: int = 0) -> float:
    """|p*Phi symmetric-difference Phi| / |Phi|, capped at 1."""
    if p not in spec.support:
        raise PrimeNotInSupport(f"{p} is not in the support of {spec}")
    window = spec.window
    if mode == "exact":
        w = len(window)
        # shifting theta_p by one leaves exactly one exponent value uncovered on each side
        inside = sum(1 for t in window if t + 1 in window)
        return min(1.0, 2.0 * (w - inside) / w)
    if mode == "sampled":
        draws = sample(spec, samples, seed)
        escaped = sum(1 for q in draws if q.theta(p) + 1 not in window)
        return min(1.0, 2.0 * escaped / samples)
    raise ValueError(f"unknown mode {mode!r}")


def q_L(L: int) -> Factorization:
    """Q_L = prod_{p <= L} p^{2L} (use .value for the integer)."""
    if L < 1:
        raise ValueError("L must be >= 1")
    return Factorization(tuple((p, 2 * L) for p in sieve_primes(L)))


_iv_lock = threading.Lock()


@contextmanager
def _iv_precision(prec):
    # mpmath's interval context keeps global precision; serialise access
    with _iv_lock:
        saved = iv.prec
        iv.prec = prec
        try:
            yield
        finally:
            iv.prec = saved


def _log_interval(fac: Factorization):
    total = iv.mpf(0)
    for p, e in fac:
        total += e * iv.log(iv.mpf(p))
    return total


def certified_chord(fac: Factorization, prec: int = 200):
    """Interval enclosure of |e^{i ln n} - 1| for n given by its factorization,
    together with the midpoint angle reduced to [0, 2pi)."""
    with _iv_precision(prec):
        x = _log_interval(fac)
        two_pi = 2 * iv.pi
        with mp.workprec(prec):
            k = int(mp.floor(mp.mpf(x.mid) / (2 * mp.pi)))
        ang = x - k * two_pi
        c = 2 * abs(iv.sin(ang / 2))
        mid = float(ang.mid) % TAU
        # round the float endpoints outward so the enclosure survives conversion
        lo = max(0.0, math.nextafter(float(c.a), -math.inf))
        return (lo, math.nextafter(float(c.b), math.inf)), mid


@dataclass(frozen=True)
class QDeltaL:
    delta: float
    L: int
    n_shift: int
    factorization: Factorization
    angle: float
    chord_upper: float

    @property
    def value(self) -> int:
        return self.factorization.value

    def to_dict(self):
        return {
            "delta": self.delta,
            "L": self.L,
            "n_shift": self.n_shift,
            "value": str(self.value),
            "angle": self.angle,
            "chord_upper": self.chord_upper,
        }


def find_q_delta_L(delta: float, L: int, search_cap: int = 10**6) -> QDeltaL:
    """Smallest n in [1, cap] with |e^{i ln(2^n Q_L)} - 1| <= delta."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    if search_cap < 1:
        raise ValueError("search_cap must be >= 1")
    base = q_L(L)
    with mp.workprec(256):
        x = mp.fsum(e * mp.log(p) for p, e in base)
        a0 = float(x % (2 * mp.pi))
        step = float(mp.log(2))
    chunk = 1 << 16
    for start in range(1, search_cap + 1, chunk):
        n = np.arange(start, min(search_cap, start + chunk - 1) + 1, dtype=np.float64)
        ang = np.mod(a0 + n * step, TAU)
        chords = 2.0 * np.abs(np.sin(ang / 2.0))
        for idx in np.flatnonzero(chords <= delta + 1e-8):
            k = int(n[idx])
            fac = base * Factorization(((2, k),))
            (lo, hi), mid = certified_chord(fac)
            if hi <= delta:
                return QDeltaL(delta, L, k, fac, mid, hi)
    raise NotFoundWithinCap(f"no n <= {search_cap} puts 2^n Q_{L} within chord {delta} of 1")


def chord_of(n_factorization: Factorization) -> float:
    return chord(n_factorization.log())
