"""CRT/Hensel construction of grid shifts v for the five coefficient cases,
with exact verification, cofactors R_j and the small shifts used by the
factor criteria."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from math import gcd

from .equations import APB, AC, BC, classify_rado, forms_for
from .errors import (
    BadOrdering,
    BelowThreshold,
    DivisibilityFailure,
    HenselFailure,
    IndexOutOfRange,
    NotARoot,
    NotRadoTriple,
    NotSimpleRoot,
    WrongFamily,
)
from .folner import FolnerElement, FolnerSpec, QDeltaL, find_q_delta_L, q_L
from .numeric import Factorization, crt_solve, factorize, hensel_lift, primes_in_range, sieve_primes
from .quadforms import exceptional_primes, is_irreducible, omega, roots_mod_prime_power, split_reducible

AC_RED = "AC_P2Reducible"
AC_IRR = "AC_P2Irreducible"
APB_ALL = "APB_AllIrreducible"
APB_P2RED = "APB_P2Reducible"
APB_BOTH = "APB_BothReducible"
CASES = (AC_RED, AC_IRR, APB_ALL, APB_P2RED, APB_BOTH)


# ---------------------------------------------------------------- cases


@dataclass(frozen=True)
class CaseTag:
    """A case together with the triple the construction runs on.  `swapped`
    records that the caller's triple had a and b exchanged to reach it."""

    kind: str
    a: int
    b: int
    c: int
    swapped: bool = False

    def __post_init__(self):
        if self.kind not in CASES:
            raise ValueError(f"unknown case {self.kind!r}")
        a, b, c = self.a, self.b, self.c
        P1, P2, P3 = self.forms
        if self.kind.startswith("AC"):
            if a != c:
                raise ValueError(f"{self.kind} needs a = c, got {(a, b, c)}")
            if is_irreducible(P2) != (self.kind == AC_IRR):
                raise ValueError(f"reducibility of {P2} does not match {self.kind}")
        else:
            if a + b != c:
                raise ValueError(f"{self.kind} needs a + b = c, got {(a, b, c)}")
            expected = {APB_ALL: (True, True), APB_P2RED: (False, True), APB_BOTH: (False, False)}
            if (is_irreducible(P2), is_irreducible(P3)) != expected[self.kind]:
                raise ValueError(f"reducibility of P2, P3 does not match {self.kind}")

    @property
    def triple(self):
        return (self.a, self.b, self.c)

    @property
    def forms(self):
        return forms_for(self.triple).forms

    @property
    def is_ac(self):
        return self.kind.startswith("AC")

    def to_dict(self):
        return {"kind": self.kind, "a": self.a, "b": self.b, "c": self.c, "swapped": self.swapped}

    @classmethod
    def from_dict(cls, d):
        return cls(d["kind"], d["a"], d["b"], d["c"], d.get("swapped", False))


def case_for(a: int, b: int, c: int) -> CaseTag:
    """Case of a Rado triple.  b = c is handled as a = c on (b, a, b); a + b = c
    with only P3 reducible is handled as P2 reducible on (b, a, c)."""
    t = classify_rado(a, b, c)
    if t.cls == BC:
        return _with_swap(case_for(b, a, b), True)
    if t.cls == AC:
        square = math.isqrt(a * b) ** 2 == a * b
        return CaseTag(AC_RED if square else AC_IRR, a, b, c)
    if t.cls == APB:
        _, P2, P3 = forms_for((a, b, c)).forms
        red2, red3 = not is_irreducible(P2), not is_irreducible(P3)
        if red2 and red3:
            return CaseTag(APB_BOTH, a, b, c)
        if red2:
            return CaseTag(APB_P2RED, a, b, c)
        if red3:
            return CaseTag(APB_P2RED, b, a, c, swapped=True)
        return CaseTag(APB_ALL, a, b, c)
    raise NotRadoTriple(f"({a},{b},{c}) is not a Rado triple")


def _with_swap(tag, swapped):
    return CaseTag(tag.kind, tag.a, tag.b, tag.c, swapped)


@dataclass(frozen=True)
class CaseParameters:
    kappa: int | None = None
    gamma: int | None = None  # sqrt(ab) in the reducible a = c case
    gamma_sq: int | None = None  # gamma^2 = max(16 b^2, 2ab) in the a + b = c cases
    lambdas: tuple = ()  # (l1, l2) or (l1, l2, l3, l4)

    def to_dict(self):
        return {"kappa": self.kappa, "gamma": self.gamma, "gamma_sq": self.gamma_sq, "lambdas": list(self.lambdas)}


def choose_parameters(case: CaseTag) -> CaseParameters:
    a, b = case.a, case.b
    _, P2, P3 = case.forms
    if case.kind == AC_RED:
        g = math.isqrt(a * b)
        kappa = next(k for k in range(1, 4) if 1 - k * g != 0)
        return CaseParameters(kappa=kappa, gamma=g)
    if case.kind == AC_IRR:
        kappa = next(k for k in range(1, 4) if 1 - a * b * k * k != 0)
        return CaseParameters(kappa=kappa)
    gamma_sq = max(16 * b * b, 2 * a * b)
    lambdas = ()
    if case.kind in (APB_P2RED, APB_BOTH):
        s2 = split_reducible(P2)
        lambdas = (s2.lambda1, s2.lambda2)
    if case.kind == APB_BOTH:
        s3 = split_reducible(P3)
        lambdas += (s3.lambda1, s3.lambda2)
    return CaseParameters(gamma_sq=gamma_sq, lambdas=lambdas)


def excluded_constant(case: CaseTag, params: CaseParameters | None = None) -> int:
    params = params or choose_parameters(case)
    a, b, c = case.triple
    ab = a * b
    if case.kind == AC_RED:
        k, g = params.kappa, params.gamma
        return 2 * k * g * ab * (1 + ab) * (1 - k * g) * (1 + k * g) * (1 + k * k * ab)
    if case.kind == AC_IRR:
        k = params.kappa
        return 2 * k * ab * (1 + ab) * (1 - ab * k * k) * (1 + ab * k * k)
    if case.kind == APB_ALL:
        return 2 * ab * c
    l1, l2 = params.lambdas[:2]
    out = 2 * ab * (a + b) * l1 * l2 * (l1 - l2) * (ab + l1 * l1)
    if case.kind == APB_BOTH:
        l3, l4 = params.lambdas[2:]
        out *= l3 * l4 * (l3 - l4) * (ab + l3 * l3)
    return out


def omega_forms(case: CaseTag):
    """Indices j of the forms whose omega must lie in {0, 2} past the threshold."""
    return {AC_RED: (3,), AC_IRR: (2, 3), APB_ALL: (1, 2, 3), APB_P2RED: (1, 3), APB_BOTH: (1,)}[case.kind]


def excluded_primes(case: CaseTag) -> set[int]:
    primes = set(factorize(abs(excluded_constant(case))).primes())
    for j in omega_forms(case):
        primes |= exceptional_primes(case.forms[j - 1])
    return primes


def admissibility_threshold(case: CaseTag) -> int:
    """Every r (a = c) or s (a + b = c) strictly above this value is admissible."""
    return max(excluded_primes(case))


# ---------------------------------------------------------------- parameters


def families(case: CaseTag, r: int, K: int, L: int, s: int | None = None):
    """The three Folner families Q1, Q2, Q3 are drawn from for this case."""
    P1, P2, P3 = case.forms
    if case.kind == AC_RED:
        return FolnerSpec.phi_r(r), FolnerSpec.phi_rk(r, K), FolnerSpec.phi_rkp(K, L, P3)
    if case.kind == AC_IRR:
        return FolnerSpec.phi_r(r), FolnerSpec.phi_rkp(r, K, P2), FolnerSpec.phi_rkp(K, L, P3)
    first = FolnerSpec.phi_rkp(s, r, P1)
    if case.kind == APB_ALL:
        return first, FolnerSpec.phi_rkp(r, K, P2), FolnerSpec.phi_rkp(K, L, P3)
    if case.kind == APB_P2RED:
        return first, FolnerSpec.phi_rk(r, K), FolnerSpec.phi_rkp(K, L, P3)
    return first, FolnerSpec.phi_rk(r, K), FolnerSpec.phi_rk(K, L)


@dataclass(frozen=True)
class GridParams:
    case: CaseTag
    delta: float
    s: int | None
    r: int
    K: int
    L: int
    Q1: FolnerElement
    Q2: FolnerElement
    Q3: FolnerElement
    qdl: QDeltaL

    @property
    def Q(self) -> int:
        return self.qdl.value

    @property
    def Qs(self):
        return (self.Q1, self.Q2, self.Q3)

    def to_dict(self):
        return {
            "case": self.case.to_dict(),
            "delta": self.delta,
            "s": self.s,
            "r": self.r,
            "K": self.K,
            "L": self.L,
            "Q1": self.Q1.to_dict(),
            "Q2": self.Q2.to_dict(),
            "Q3": self.Q3.to_dict(),
            "n_shift": self.qdl.n_shift,
        }

    @classmethod
    def from_dict(cls, d):
        L = int(d["L"])
        n = int(d["n_shift"])
        fac = q_L(L) * Factorization(((2, n),))
        from .folner import certified_chord

        (_, hi), mid = certified_chord(fac)
        qdl = QDeltaL(float(d["delta"]), L, n, fac, mid, hi)
        return cls(
            CaseTag.from_dict(d["case"]),
            float(d["delta"]),
            d.get("s"),
            int(d["r"]),
            int(d["K"]),
            L,
            FolnerElement.from_dict(d["Q1"]),
            FolnerElement.from_dict(d["Q2"]),
            FolnerElement.from_dict(d["Q3"]),
            qdl,
        )


def make_params(case, r, K, L, Q1, Q2, Q3, s=None, delta=1.9, search_cap=10**6) -> GridParams:
    return GridParams(case, delta, s, r, K, L, Q1, Q2, Q3, find_q_delta_L(delta, L, search_cap))


def smallest_parameters(case: CaseTag):
    """(s, r, K, L) with s (or r) = threshold + 1 and each later value as small
    as the ordering s < r < K < L/2 allows."""
    t = admissibility_threshold(case)
    if case.is_ac:
        s, r = None, t + 1
    else:
        s = t + 1
        r = s + 1
    K = r + 1
    return s, r, K, 2 * K + 1


def nondegenerate_parameters(case: CaseTag):
    """Smallest admissible (s, r, K, L) for which all three families have
    nonempty prime support."""
    t = admissibility_threshold(case)
    s = None if case.is_ac else t + 1
    r = t + 1 if case.is_ac else s + 1
    while not families(case, r, r + 1, 2 * r + 5, s)[0].support:
        r += 1
    K = r + 1
    while not families(case, r, K, 2 * K + 1, s)[1].support:
        K += 1
    L = 2 * K + 1
    while not families(case, r, K, L, s)[2].support:
        L += 1
    return s, r, K, L


# ---------------------------------------------------------------- construction


@dataclass(frozen=True)
class Condition:
    name: str
    holds: bool
    detail: dict = field(default_factory=dict)

    def to_dict(self):
        return {"name": self.name, "holds": self.holds, "detail": {k: str(v) for k, v in self.detail.items()}}


@dataclass(frozen=True)
class ConditionReport:
    conditions: tuple

    @property
    def all_pass(self) -> bool:
        return all(c.holds for c in self.conditions)

    @property
    def failures(self):
        return [c.name for c in self.conditions if not c.holds]

    def __len__(self):
        return len(self.conditions)

    def to_list(self):
        return [c.to_dict() for c in self.conditions]


@dataclass(frozen=True)
class GridWitness:
    v: int
    crt_modulus: int
    kappa: int | None
    gamma: int | None
    lambdas: tuple
    hensel_roots: tuple  # ((p, j, theta, zeta), ...)
    report: ConditionReport | None = None

    def with_v(self, v: int) -> "GridWitness":
        return GridWitness(v, self.crt_modulus, self.kappa, self.gamma, self.lambdas, self.hensel_roots, None)

    def roots_dict(self):
        return {(p, j): z for p, j, _, z in self.hensel_roots}


def check_params(params: GridParams) -> None:
    case, s, r, K, L = params.case, params.s, params.r, params.K, params.L
    if case.is_ac:
        if s is not None:
            raise BadOrdering("a = c cases take no s")
        ordered = 1 < r < K and 2 * K < L
    else:
        ordered = s is not None and 1 < s < r < K and 2 * K < L
    if not ordered:
        raise BadOrdering(f"need {'s < ' if not case.is_ac else ''}r < K < L/2, got s={s} r={r} K={K} L={L}")
    threshold = admissibility_threshold(case)
    low = r if case.is_ac else s
    if low <= threshold:
        raise BelowThreshold(f"{'r' if case.is_ac else 's'} = {low} must exceed {threshold}")
    expected = families(case, r, K, L, s)
    for name, elem, spec in zip(("Q1", "Q2", "Q3"), params.Qs, expected):
        if elem.spec != spec:
            raise WrongFamily(f"{name} is drawn from {elem.spec}, expected {spec}")
    if params.qdl.L != L:
        raise BadOrdering(f"Q_delta_L was built for L={params.qdl.L}, not {L}")
    if case.is_ac:
        # prod_{p<=K} p^{4K} prod_{K<p<=L} p^{1+3L/2} <= Q_{delta,L}, squared to keep exponents integral
        lhs = 1
        for p in sieve_primes(L):
            lhs *= p ** (8 * K) if p <= K else p ** (2 + 3 * L)
        if lhs > params.Q**2:
            raise BadOrdering("the CRT modulus bound exceeds Q_{delta,L}")


def _lift(P, p, theta, j, roots):
    zs = roots_mod_prime_power(P, p, 1)
    if len(zs) != 2:
        raise HenselFailure(f"omega_P{j}({p}) = {len(zs)}, expected 2")
    try:
        zeta = hensel_lift(P, p, theta, zs[0])
    except (NotSimpleRoot, NotARoot) as exc:
        raise HenselFailure(str(exc)) from exc
    roots.append((p, j, theta, zeta))
    return zeta, p ** (theta + 1)


def _form_window(P, j, Qj, lo, hi, zero_residue, roots, out):
    """Constraints on lo < p <= hi from an irreducible form P_j and Q_j."""
    for p in primes_in_range(lo, hi):
        w = omega(P, p)
        if w == 0:
            out.append((zero_residue % p, p))
        elif w == 2:
            out.append(_lift(P, p, Qj.theta(p), j, roots))
        else:
            raise HenselFailure(f"omega_P{j}({p}) = {w} inside the construction range")


def _linear_window(lam, Qj, lo, hi, out):
    """v = lam^{-1} (p^theta - 1) mod p^{theta+1}, making 1 + lam v exactly divisible by p^theta."""
    for p in primes_in_range(lo, hi):
        theta = Qj.theta(p)
        mod = p ** (theta + 1)
        out.append((pow(lam, -1, mod) * (p**theta - 1) % mod, mod))


def construct_v(params: GridParams) -> GridWitness:
    check_params(params)
    case = params.case
    P1, P2, P3 = case.forms
    cp = choose_parameters(case)
    s, r, K, L = params.s, params.r, params.K, params.L
    Q1, Q2, Q3 = params.Qs
    roots, cons = [], []
    if case.is_ac:
        for p in sieve_primes(r):
            mod = p ** (2 * Q1.theta(p))
            cons.append((Q1.value % mod, mod))
        if case.kind == AC_RED:
            g = cp.gamma
            for p in primes_in_range(r, K):
                theta = Q2.theta(p)
                mod = p ** (theta + 1)
                ginv = pow(g, -1, mod)
                cons.append(((ginv - ginv * p**theta) % mod, mod))
        else:
            _form_window(P2, 2, Q2, r, K, cp.kappa, roots, cons)
        _form_window(P3, 3, Q3, K, L, cp.kappa, roots, cons)
    else:
        for p in sieve_primes(s):
            cons.append((0, p ** (2 * s)))
        _form_window(P1, 1, Q1, s, r, 0, roots, cons)
        if case.kind == APB_ALL:
            _form_window(P2, 2, Q2, r, K, 0, roots, cons)
        else:
            _linear_window(cp.lambdas[0], Q2, r, K, cons)
        if case.kind == APB_BOTH:
            _linear_window(cp.lambdas[2], Q3, K, L, cons)
        else:
            _form_window(P3, 3, Q3, K, L, 0, roots, cons)
    v, modulus = crt_solve(cons)
    witness = GridWitness(v, modulus, cp.kappa, cp.gamma, cp.lambdas, tuple(roots))
    report = verify_witness(params, witness)
    if not report.all_pass:
        raise HenselFailure(f"constructed v fails {report.failures}")
    return GridWitness(v, modulus, cp.kappa, cp.gamma, cp.lambdas, tuple(roots), report)


# ---------------------------------------------------------------- verification


def _pair(name, Q, value, Qj, M0):
    """(Q, value) = Qj and value/Qj = Qj^{-1} mod M0."""
    g = gcd(Q, value)
    out = [Condition(f"{name}: gcd(Q, {name}) = Q_j", g == Qj, {"gcd": g, "expected": Qj})]
    if value % Qj:
        out.append(Condition(f"{name}: quotient residue", False, {"remainder": value % Qj}))
        return out
    q = value // Qj
    target = pow(Qj, -1, M0) if M0 > 1 else 0
    out.append(
        Condition(
            f"{name}: {name}/Q_j = Q_j^-1 mod M",
            (q - target) % M0 == 0,
            {"residue": q % M0, "expected": target, "M": M0},
        )
    )
    return out


def _unit(name, Q, value, M0):
    """(Q, value) = 1 and value = 1 mod M0."""
    g = gcd(Q, value)
    return [
        Condition(f"{name}: gcd(Q, {name}) = 1", g == 1, {"gcd": g}),
        Condition(f"{name}: {name} = 1 mod M", (value - 1) % M0 == 0, {"residue": value % M0, "M": M0}),
    ]


def verify_witness(params: GridParams, witness: GridWitness) -> ConditionReport:
    case = params.case
    P1, P2, P3 = case.forms
    Q = params.Q
    Q1, Q2, Q3 = (q.value for q in params.Qs)
    v = witness.v
    conds = [Condition("range: 0 <= v <= Q - 1", 0 <= v <= Q - 1, {"v": v})]
    if case.is_ac:
        g = gcd(Q, v)
        conds.append(Condition("(i) gcd(Q, v) = Q1", g == Q1, {"gcd": g, "expected": Q1}))
        ok = v % Q1 == 0 and (v // Q1 - 1) % Q1 == 0
        conds.append(Condition("(i) v/Q1 = 1 mod Q1", ok, {"residue": (v // Q1) % Q1 if v % Q1 == 0 else "n/a"}))
        if case.kind == AC_RED:
            gm = witness.gamma
            conds += _pair("(ii) 1 - gamma v", Q, 1 - gm * v, Q2, Q1)
            conds += _unit("(iii) 1 + gamma v", Q, 1 + gm * v, Q1)
            conds += _pair("(iv) P3(1,v)", Q, P3.at_one(v), Q3, Q1)
        else:
            conds += _pair("(ii) P2(1,v)", Q, P2.at_one(v), Q2, Q1)
            conds += _pair("(iii) P3(1,v)", Q, P3.at_one(v), Q3, Q1)
    else:
        Ms = q_L(params.s).value
        conds += _pair("(i) P1(1,v)", Q, P1.at_one(v), Q1, Ms)
        if case.kind == APB_ALL:
            conds += _pair("(ii) P2(1,v)", Q, P2.at_one(v), Q2, Ms)
            conds += _pair("(iii) P3(1,v)", Q, P3.at_one(v), Q3, Ms)
        else:
            l1, l2 = witness.lambdas[:2]
            conds += _pair("(ii) 1 + l1 v", Q, 1 + l1 * v, Q2, Ms)
            conds += _unit("(iii) 1 + l2 v", Q, 1 + l2 * v, Ms)
            if case.kind == APB_P2RED:
                conds += _pair("(iv) P3(1,v)", Q, P3.at_one(v), Q3, Ms)
            else:
                l3, l4 = witness.lambdas[2:]
                conds += _pair("(iv) 1 + l3 v", Q, 1 + l3 * v, Q3, Ms)
                conds += _unit("(v) 1 + l4 v", Q, 1 + l4 * v, Ms)
    # residue-level divisibility: P_j(Qm+1, Qn+v) = P_j(1, v) mod Q and Q_j | Q
    for j, (P, Qj) in enumerate(zip(case.forms, (Q1, Q2, Q3)), start=1):
        conds.append(Condition(f"divisibility: Q{j} | P{j}(1,v)", P.at_one(v) % Qj == 0, {"remainder": P.at_one(v) % Qj}))
        for m, n in ((1, 1), (2, 3), (5, 4)):
            rem = P(Q * m + 1, Q * n + v) % Qj
            conds.append(Condition(f"divisibility: Q{j} | P{j} at ({m},{n})", rem == 0, {"remainder": rem}))
    for p, j, theta, zeta in witness.hensel_roots:
        P = case.forms[j - 1]
        mod = p ** (theta + 1)
        ok = (P.at_one(zeta) - p**theta) % mod == 0
        conds.append(Condition(f"hensel: P{j}(1, zeta) = {p}^{theta} mod {p}^{theta + 1}", ok, {"zeta": zeta}))
        conds.append(Condition(f"hensel: v = zeta mod {p}^{theta + 1}", (v - zeta) % mod == 0, {"zeta": zeta}))
    return ConditionReport(tuple(conds))


# ---------------------------------------------------------------- cofactors


@dataclass(frozen=True)
class CofactorValue:
    j: int
    m: int
    n: int
    value: int


def cofactor(params: GridParams, witness: GridWitness, j: int, m: int, n: int) -> CofactorValue:
    """R_j with Q_j R_j = P_j(Q m + 1, Q n + v)."""
    if j not in (1, 2, 3):
        raise IndexOutOfRange(f"j = {j} is not in {{1, 2, 3}}")
    if m < 1 or n < 1:
        raise ValueError("m, n must be >= 1")
    Q, v = params.Q, witness.v
    Qj = params.Qs[j - 1].value
    total = params.case.forms[j - 1](Q * m + 1, Q * n + v)
    R, rem = divmod(total, Qj)
    if rem:
        raise DivisibilityFailure(f"Q{j} does not divide P{j}(Qm+1, Qn+v) at ({m},{n})")
    if params.case.kind == AC_RED and j in (1, 2):
        a, g = params.case.a, witness.gamma
        if j == 1:
            Q1 = Qj
            closed = 2 * a * (Q * m + 1) * ((Q // Q1) * n + v // Q1)
        else:
            Q2 = Qj
            closed = ((Q // Q2) * (m - g * n) + (1 - g * v) // Q2) * (Q * (m + g * n) + 1 + g * v)
        if closed != R:
            raise DivisibilityFailure(f"closed form R{j} disagrees at ({m},{n})")
    return CofactorValue(j, m, n, R)


# ---------------------------------------------------------------- factor shifts


def factor_shift(r: int, K: int, Q: FolnerElement) -> int:
    """v = Q^{-1} mod p^r for p <= r and v = 1 mod p for r < p <= K."""
    spec = Q.spec
    if spec.kind not in ("PhiRK", "PhiRKP") or spec.r != r or spec.K != K:
        raise WrongFamily(f"{spec} is not Phi_{{{r},{K}}} or Phi_{{{r},{K},P}}")
    cons = []
    for p in sieve_primes(r):
        mod = p**r
        cons.append((pow(Q.value, -1, mod), mod))
    for p in primes_in_range(r, K):
        cons.append((1, p))
    v, _ = crt_solve(cons) if cons else (1, 1)
    radical = math.prod(sieve_primes(K))
    small = math.prod(p**r for p in sieve_primes(r))
    if gcd(v, radical) != 1 or (v * Q.value - 1) % small:
        raise WrongFamily("shift post-conditions failed")
    return v


# ---------------------------------------------------------------- export


def witness_to_dict(params: GridParams, witness: GridWitness) -> dict:
    report = witness.report or verify_witness(params, witness)
    return {
        "params": params.to_dict(),
        "v": str(witness.v),
        "crt_modulus": str(witness.crt_modulus),
        "kappa": witness.kappa,
        "gamma": witness.gamma,
        "lambdas": list(witness.lambdas),
        "hensel_roots": [[p, j, t, str(z)] for p, j, t, z in witness.hensel_roots],
        "conditions": report.to_list(),
        "all_pass": report.all_pass,
    }


def witness_from_dict(d: dict):
    params = GridParams.from_dict(d["params"])
    witness = GridWitness(
        int(d["v"]),
        int(d["crt_modulus"]),
        d.get("kappa"),
        d.get("gamma"),
        tuple(d.get("lambdas", ())),
        tuple((int(p), int(j), int(t), int(z)) for p, j, t, z in d.get("hensel_roots", ())),
    )
    return params, witness


def witness_json(params, witness) -> str:
    return json.dumps(witness_to_dict(params, witness), indent=2, sort_keys=True)
