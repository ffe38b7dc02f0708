"""Rotation actions n -> (f_1(n) z_1, ..., f_s(n) z_s) on the torus, exact
product-of-arcs measures, recurrence search, finite-stage concentration and
factor statistics, the Chu inequality and the bilinear averaging bound."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .equations import classify_rado, forms_for
from .errors import BothZero, HypothesisViolation, NotFound, NotRadoTriple
from .folner import FolnerSpec, elements, q_L
from .gridwitness import factor_shift
from .multfun import DirichletCharacter, MultiplicativeFunction, Twist, distance, f_partial, g_partial
from .numeric import TAU, TOL, factorize, sieve_primes
from .quadforms import BinaryQuadraticForm, is_irreducible

INT64_SAFE = 2**62
MEASURE_SLACK = 1e-10


# ---------------------------------------------------------------- arcs


@dataclass(frozen=True)
class ArcSet:
    """Product of closed arcs, one (center, half_width) per coordinate."""

    arcs: tuple

    def __post_init__(self):
        arcs = tuple((float(c), float(h)) for c, h in self.arcs)
        if not arcs:
            raise ValueError("an arc set needs at least one coordinate")
        for _, h in arcs:
            if not 0 < h <= math.pi:
                raise ValueError(f"half-width {h} outside (0, pi]")
        object.__setattr__(self, "arcs", arcs)

    @classmethod
    def uniform(cls, s: int, half_width: float, center: float = 0.0) -> "ArcSet":
        return cls(tuple((center, half_width) for _ in range(s)))

    @property
    def s(self) -> int:
        return len(self.arcs)

    def to_dict(self):
        return {"arcs": [list(a) for a in self.arcs]}


def arc_measure(A: ArcSet) -> float:
    return math.prod(h / math.pi for _, h in A.arcs)


def _arc_intervals(center, half_width):
    """The arc as disjoint sub-intervals of [0, 2pi)."""
    if half_width >= math.pi:
        return [(0.0, TAU)]
    lo = (center - half_width) % TAU
    hi = lo + 2 * half_width
    if hi <= TAU:
        return [(lo, hi)]
    return [(lo, TAU), (0.0, hi - TAU)]


def _intersect(xs, ys):
    out = []
    for a, b in xs:
        for c, d in ys:
            lo, hi = max(a, c), min(b, d)
            if hi > lo:
                out.append((lo, hi))
    return out


def arc_intersection_length(center, half_width, rotations) -> float:
    """Length of the intersection of the arc with its translates by -phi for
    each phi in rotations, computed by interval arithmetic on [0, 2pi)."""
    current = _arc_intervals(center, half_width)
    for phi in rotations:
        current = _intersect(current, _arc_intervals(center - phi, half_width))
        if not current:
            return 0.0
    return math.fsum(b - a for a, b in current)


# ---------------------------------------------------------------- systems


@dataclass(frozen=True)
class RotationSystem:
    functions: tuple

    def __post_init__(self):
        fs = tuple(self.functions)
        if not fs:
            raise ValueError("a rotation system needs at least one function")
        for f in fs:
            if not isinstance(f, MultiplicativeFunction):
                raise TypeError(f"{f!r} is not a multiplicative function")
        object.__setattr__(self, "functions", fs)

    @property
    def s(self) -> int:
        return len(self.functions)

    def angles(self, n: int):
        return tuple(f.angle(n) for f in self.functions)

    def act(self, n: int, point):
        """T_n applied to a point given by its angles."""
        return tuple((z + a) % TAU for z, a in zip(point, self.angles(n)))


def joint_measure(system: RotationSystem, A: ArcSet, x: int, y: int, z: int) -> float:
    """Haar measure of A, T_x^{-1}A, T_y^{-1}A, T_z^{-1}A intersected."""
    if min(x, y, z) < 1:
        raise ValueError("x, y, z must be >= 1")
    if system.s != A.s:
        raise ValueError(f"system has {system.s} coordinates, arc set has {A.s}")
    total = 1.0
    for f, (c, h) in zip(system.functions, A.arcs):
        length = arc_intersection_length(c, h, (f.angle(x), f.angle(y), f.angle(z)))
        total *= length / TAU
        if total == 0.0:
            return 0.0
    return total


@dataclass(frozen=True)
class RecurrenceWitness:
    x: int
    y: int
    z: int
    params: tuple  # (k, m, n) before any grid substitution
    measure: float
    target: float
    scanned: int

    def as_tuple(self):
        return (self.x, self.y, self.z)


def recurrence_search(system, A, triple, eps: float, bounds=(200, 200), grid=None) -> RecurrenceWitness:
    """First parametrized solution (k outer, then m, then n) with distinct
    positive coordinates and joint measure >= mu(A)^4 - eps.  `grid` = (Q, u, v)
    replaces (m, n) by (Q m + u, Q n + v)."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    t = classify_rado(*triple) if not hasattr(triple, "cls") else triple
    if not t.is_rado:
        raise NotRadoTriple(str(t.coefficients))
    forms = forms_for(t)
    target = arc_measure(A) ** 4 - eps
    k_max, m_max = bounds
    scanned = 0
    for k in range(1, k_max + 1):
        for m in range(1, m_max + 1):
            for n in range(1, m_max + 1):
                scanned += 1
                mm, nn = (grid[0] * m + grid[1], grid[0] * n + grid[2]) if grid else (m, n)
                x, y, z = (k * w for w in forms.xyz(mm, nn))
                if min(x, y, z) <= 0 or len({x, y, z}) < 3:
                    continue
                mu = joint_measure(system, A, x, y, z)
                if mu >= target - MEASURE_SLACK:
                    return RecurrenceWitness(x, y, z, (k, m, n), mu, target, scanned)
    raise NotFound(f"no solution with k <= {k_max}, m, n <= {m_max} reaches {target}", bounds)


# ---------------------------------------------------------------- concentration


@dataclass(frozen=True)
class ConcentrationResult:
    lhs: float
    rhs_raw: float  # D(f, chi n^it; K, X) + K^{-1/2}
    audit_constant: float
    truncation: int
    distance_tail: float  # D(f, chi n^it; K, X)
    distance_full: float  # D(f, chi n^it; 1, X), a pretension diagnostic
    exp_partial: complex
    extra: dict = field(default_factory=dict)

    @property
    def rhs(self) -> float:
        return self.audit_constant * self.rhs_raw

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs + 1e-12

    def to_dict(self):
        d = {
            "lhs": self.lhs,
            "rhs_raw": self.rhs_raw,
            "audit_constant": self.audit_constant,
            "rhs": self.rhs,
            "holds": self.holds,
            "truncation": self.truncation,
            "distance_tail": self.distance_tail,
            "distance_full": self.distance_full,
            "exp_partial_re": self.exp_partial.real,
            "exp_partial_im": self.exp_partial.imag,
        }
        d.update(self.extra)
        return d


def _radical(K: int) -> int:
    return math.prod(sieve_primes(K))


def _target(chi, t):
    return Twist(chi, t)


def _char_value(chi: DirichletCharacter, n: int) -> complex:
    if not chi.is_unit(n):
        return 0j
    a = chi.unit_angle(n)
    return complex(math.cos(a), math.sin(a))


def _f_angles(f, ns):
    """Angles of f at an array of positive integers, vectorised when they fit in int64."""
    if ns.dtype != object and ns.size and int(ns.max()) < INT64_SAFE:
        return f.angles(ns.astype(np.int64))
    return np.array([f._angle(int(n)) for n in ns], dtype=float)


def _snap_mean(diff):
    d = np.abs(diff)
    d[d < TOL] = 0.0
    return math.fsum(d.tolist()) / d.size if d.size else 0.0


def _check(cond, name):
    if not cond:
        raise HypothesisViolation(name)


def concentration_linear(f, chi: DirichletCharacter, t: float, Q: int, a: int, K: int, N: int,
                         truncation: int = 10**5, audit_constant: float = 10.0) -> ConcentrationResult:
    """E_{n<=N} |f(Qn+a) - chi(a) (Qn)^{it} exp(F_N(f,K))| against
    C (D(f, chi n^it; K, X) + K^{-1/2})."""
    _check(Q >= 1 and K >= 1 and N >= 1, "Q, K, N >= 1")
    _check(Q % _radical(K) == 0, "prod_{p<=K} p divides Q")
    _check(Q % chi.modulus == 0, "q divides Q")
    _check(all(p <= K for p in factorize(Q).primes()), "prime factors of Q lie in [1, K]")
    _check(math.gcd(a, Q) == 1, "(a, Q) = 1")
    n = np.arange(1, N + 1, dtype=np.int64) if Q * N + a < INT64_SAFE else np.array(range(1, N + 1), dtype=object)
    vals = Q * n + a
    fv = np.exp(1j * _f_angles(f, vals))
    F = f_partial(f, chi, t, K, N)
    const = _char_value(chi, a) * complex(np.exp(F))
    logs = np.log(Q) + np.log(np.arange(1, N + 1, dtype=float))
    target = const * np.exp(1j * t * logs)
    lhs = _snap_mean(fv - target)
    g = _target(chi, t)
    tail = distance(f, g, K, math.inf, truncation)
    full = distance(f, g, 1, math.inf, truncation)
    return ConcentrationResult(lhs, tail + K**-0.5, audit_constant, truncation, tail, full, complex(np.exp(F)))


def concentration_quadratic(f, chi: DirichletCharacter, t: float, P: BinaryQuadraticForm, Q: int, a: int, b: int,
                            K: int, N: int, truncation: int = 10**5, audit_constant: float | None = None,
                            rows_per_chunk: int = 256) -> ConcentrationResult:
    """E_{m,n<=N} |f(P_c(Qm+a, Qn+b)) - chi(P_c(a,b)) P_c(Qm,Qn)^{it} exp(G_{P,N}(f,K))|
    with c = (P(a,b), Q), P_c = P/c, f extended evenly to negative values."""
    _check(is_irreducible(P), "P irreducible")
    _check(Q >= 1 and K >= 1 and N >= 1, "Q, K, N >= 1")
    _check(all(p <= K for p in factorize(Q).primes()), "prime factors of Q lie in [1, K]")
    c = math.gcd(P(a, b), Q)
    _check((Q // c) % chi.modulus == 0, "q divides Q/c")
    _check((Q // c) % _radical(K) == 0, "prod_{p<=K} p divides Q/c")
    g = _target(chi, t)
    tail = distance(f, g, K, math.inf, truncation)
    _check(tail <= 1.0, "D(f, chi n^it; K, inf) <= 1")
    if audit_constant is None:
        audit_constant = 10.0 * (1 + sum(abs(x) for x in P.coefficients))
    G = g_partial(f, chi, t, P, K, N)
    const = _char_value(chi, abs(P(a, b)) // c) * complex(np.exp(G))
    bound = max(abs(x) for x in P.coefficients) * 3 * (Q * N + abs(a) + abs(b)) ** 2
    dtype = object if bound >= INT64_SAFE else np.int64
    Y = (Q * np.arange(1, N + 1, dtype=np.int64) + b).astype(dtype)
    YY = P.gamma * Y * Y
    nf = np.arange(1, N + 1, dtype=float)
    total, count = [], 0
    for start in range(1, N + 1, rows_per_chunk):
        ms = np.arange(start, min(N, start + rows_per_chunk - 1) + 1, dtype=np.int64)
        X = (Q * ms + a).astype(dtype)[:, None]
        vals = np.abs(P.alpha * X * X + (P.beta * X) * Y[None, :] + YY[None, :])
        if c != 1:
            vals //= c
        fv = np.exp(1j * _f_angles(f, vals.ravel()))
        if t != 0.0:
            mf = ms.astype(float)[:, None]
            base = np.abs(P.alpha * mf * mf + P.beta * mf * nf[None, :] + P.gamma * nf[None, :] ** 2).ravel()
            fv *= np.exp(-1j * t * (np.log(base) + 2 * math.log(Q) - math.log(c)))
        d = np.abs(fv - const)
        d[d < TOL] = 0.0
        total.append(float(np.sum(d)))
        count += d.size
    lhs = math.fsum(total) / count
    full = distance(f, g, 1, math.inf, truncation)
    return ConcentrationResult(lhs, tail + K**-0.5, audit_constant, truncation, tail, full, complex(np.exp(G)), {"c": c})


# ---------------------------------------------------------------- factor criteria


FACTOR_KINDS = ("Archimedean", "FinSupp", "FinSuppP")


@dataclass(frozen=True)
class FactorStatistic:
    kind: str
    r: int
    K: int | None
    N: int
    value: float  # max over Q
    per_Q: tuple  # ((Q, shift, average), ...)
    mode: str

    def to_dict(self):
        return {
            "kind": self.kind,
            "r": self.r,
            "K": self.K,
            "N": self.N,
            "value": self.value,
            "mode": self.mode,
            "per_Q": [[str(q), str(s), avg] for q, s, avg in self.per_Q],
        }


def _chord_average(f, prefix_angle, num, den):
    ang = prefix_angle + _f_angles(f, num) - _f_angles(f, den)
    d = 2.0 * np.abs(np.sin(ang / 2.0))
    d[d < TOL] = 0.0
    return math.fsum(d.tolist()) / d.size


def factor_criterion(f, kind: str, r: int, K: int | None, N: int, P: BinaryQuadraticForm | None = None,
                     samples: int = 20, seed: int = 0) -> FactorStatistic:
    """Finite-stage factor statistic for a rank-one rotation by f:
    max_Q E_{n<=N} |f(ratio_n) - 1| with ratio_n = (Qn+1)/(Qn) (Archimedean) or
    Q (Q_K Q n + v)/(Q_K Q^2 n + 1) (FinSupp, FinSuppP)."""
    if kind not in FACTOR_KINDS:
        raise ValueError(f"unknown factor kind {kind!r}")
    if N < 1:
        raise ValueError("N must be >= 1")
    n = np.array(range(1, N + 1), dtype=object)
    rows = []
    if kind == "Archimedean":
        mode, Qs = elements(FolnerSpec.phi_r(r), samples, seed)
        for Qe in Qs:
            Q = Qe.value
            rows.append((Q, 1, _chord_average(f, 0.0, Q * n + 1, Q * n)))
    else:
        if kind == "FinSuppP":
            if P is None:
                raise ValueError("FinSuppP needs a form")
            spec = FolnerSpec.phi_rkp(r, K, P)
        else:
            spec = FolnerSpec.phi_rk(r, K)
        QK = q_L(K).value
        mode, Qs = elements(spec, samples, seed)
        for Qe in Qs:
            Q = Qe.value
            v = factor_shift(r, K, Qe)
            rows.append((Q, v, _chord_average(f, f._angle(Q), QK * Q * n + v, QK * Q * Q * n + 1)))
    value = max(avg for _, _, avg in rows)
    return FactorStatistic(kind, r, K, N, value, tuple(rows), mode)


# ---------------------------------------------------------------- Chu inequality


@dataclass(frozen=True)
class FiniteProbSpace:
    """Atoms with weights, a nonnegative F, and partitions given as one cell
    label per atom."""

    weights: tuple
    F: tuple
    partitions: tuple = ()

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        F = tuple(float(x) for x in self.F)
        parts = tuple(tuple(p) for p in self.partitions)
        if not w or len(w) != len(F):
            raise ValueError("weights and F must be nonempty and of equal length")
        if min(w) < 0 or abs(math.fsum(w) - 1.0) > 1e-12:
            raise ValueError("weights must be nonnegative and sum to 1")
        if min(F) < 0:
            raise ValueError("F must be nonnegative")
        for p in parts:
            if len(p) != len(w):
                raise ValueError("each partition labels every atom")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "partitions", parts)

    def conditional(self, i: int) -> np.ndarray:
        """E(F | partition i), atomwise; zero-weight cells give 0."""
        w, F = np.array(self.weights), np.array(self.F)
        labels = self.partitions[i]
        out = np.zeros(len(w))
        for cell in sorted(set(labels), key=repr):
            idx = np.array([k for k, lab in enumerate(labels) if lab == cell])
            mass = math.fsum(w[idx].tolist())
            if mass > 0:
                out[idx] = math.fsum((w[idx] * F[idx]).tolist()) / mass
        return out


@dataclass(frozen=True)
class ChuResult:
    lhs: float
    rhs: float
    holds: bool
    equality_expected: bool  # every E(F|X_i) constant on supp F

    def to_dict(self):
        return {"lhs": self.lhs, "rhs": self.rhs, "holds": self.holds, "equality_expected": self.equality_expected}


def chu_check(space: FiniteProbSpace, slack: float = 1e-10) -> ChuResult:
    """int F prod_i E(F|X_i) dmu against (int F dmu)^{l+1}."""
    w, F = np.array(space.weights), np.array(space.F)
    prod = F.copy()
    constant = True
    support = (F > 0) & (w > 0)
    for i in range(len(space.partitions)):
        cond = space.conditional(i)
        prod = prod * cond
        vals = cond[support]
        if vals.size and float(vals.max() - vals.min()) > 1e-12:
            constant = False
    lhs = math.fsum((w * prod).tolist())
    mean = math.fsum((w * F).tolist())
    rhs = mean ** (len(space.partitions) + 1)
    return ChuResult(lhs, rhs, lhs >= rhs - slack, constant)


# ---------------------------------------------------------------- bilinear bound


@dataclass(frozen=True)
class BilinearResult:
    single: float  # E_{n in [lN]} |v(n) - v_N|
    double: float  # E_{m,n in [N]} |v(l1 m + l2 n) - v_N|
    ratio: float | None
    bound: float  # 4 l single
    holds: bool

    def to_dict(self):
        return {"single": self.single, "double": self.double, "ratio": self.ratio, "bound": self.bound, "holds": self.holds}


def bilinear_defect(values, v_N: complex, l1: int, l2: int, N: int) -> BilinearResult:
    """values[k-1] = v(k) for k = 1..(|l1|+|l2|) N, or a callable k -> v(k).
    v is extended evenly, and v(0) is read as v_N."""
    if l1 == 0 and l2 == 0:
        raise BothZero("l1 and l2 are both zero")
    if N < 1:
        raise ValueError("N must be >= 1")
    l = abs(l1) + abs(l2)
    span = l * N
    if callable(values):
        seq = np.array([complex(values(k)) for k in range(1, span + 1)])
    else:
        seq = np.asarray(values, dtype=complex)[:span]
        if seq.size < span:
            raise ValueError(f"need v(1..{span}), got {seq.size} values")
    v_N = complex(v_N)
    dev = np.abs(seq - v_N)
    dev = np.concatenate(([0.0], dev))  # index k -> |v(k) - v_N|, v(0) = v_N
    single = math.fsum(dev[1:].tolist()) / span
    m = np.arange(1, N + 1)
    parts = []
    for row in m:
        k = np.abs(l1 * row + l2 * m)
        parts.append(math.fsum(dev[k].tolist()))
    double = math.fsum(parts) / (N * N)
    bound = 4 * l * single
    ratio = double / single if single > 0 else None
    return BilinearResult(single, double, ratio, bound, double <= bound + 1e-9)


# ---------------------------------------------------------------- random instances


def random_prob_space(rng: np.random.Generator, max_atoms: int = 16, max_ell: int = 3) -> FiniteProbSpace:
    atoms = int(rng.integers(1, max_atoms + 1))
    ell = int(rng.integers(0, max_ell + 1))
    w = rng.random(atoms) + 1e-3
    w = w / w.sum()
    w[-1] = 1.0 - math.fsum(w[:-1].tolist())
    F = rng.random(atoms) * rng.integers(0, 2, atoms)
    parts = [tuple(int(x) for x in rng.integers(0, max(1, atoms // 2) + 1, atoms)) for _ in range(ell)]
    return FiniteProbSpace(tuple(max(0.0, x) for x in w), tuple(F), tuple(parts))


def random_fsl_function(rng: np.random.Generator, max_q: int = 16, roots: int = 12, tweaks: int = 2):
    """A random character lift mod q <= max_q with fills and a few tweaked
    primes valued in the roots-th roots of unity."""
    from .multfun import CharacterLift, Tweaked, characters_mod
    from .numeric import UnitComplex

    q = int(rng.integers(1, max_q + 1))
    chars = characters_mod(q)
    chi = chars[int(rng.integers(0, len(chars)))]
    qprimes = factorize(q).primes() if q > 1 else []
    fill = {p: UnitComplex.from_turns(int(rng.integers(0, roots)) / roots) for p in qprimes}
    f = CharacterLift(chi, fill)
    pool = [p for p in sieve_primes(50) if p not in qprimes]
    chosen = rng.choice(pool, size=int(rng.integers(0, tweaks + 1)), replace=False)
    if len(chosen):
        f = Tweaked(f, {int(p): UnitComplex.from_turns(int(rng.integers(0, roots)) / roots) for p in sorted(chosen)})
    return f


def random_system(rng: np.random.Generator, max_s: int = 3, max_q: int = 16, min_measure: float = 0.2):
    """(RotationSystem, ArcSet) with s <= max_s FSL functions and mu(A) >= min_measure."""
    s = int(rng.integers(1, max_s + 1))
    system = RotationSystem(tuple(random_fsl_function(rng, max_q) for _ in range(s)))
    lo = min_measure ** (1.0 / s)
    arcs = tuple((float(rng.random() * TAU), math.pi * float(lo + (1 - lo) * rng.random())) for _ in range(s))
    return system, ArcSet(arcs)
