"""The equation a x^2 + b y^2 = c z^2: Rado classification, three-form
parametrizations, the cone sets S_delta and monochromatic-triple search."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import NonpositiveFormValue, NotFound, NotRadoTriple
from .numeric import TAU, TOL, signed_angle
from .quadforms import BinaryQuadraticForm

AC, BC, APB, NOT_RADO = "AC", "BC", "APlusB", "NotRado"
COORDS = ("x", "y", "z")


@dataclass(frozen=True)
class RadoTriple:
    a: int
    b: int
    c: int
    cls: str

    @property
    def coefficients(self):
        return (self.a, self.b, self.c)

    @property
    def is_rado(self):
        return self.cls != NOT_RADO

    def satisfied_by(self, x, y, z) -> bool:
        return self.a * x * x + self.b * y * y == self.c * z * z


def classify_rado(a: int, b: int, c: int) -> RadoTriple:
    if min(a, b, c) < 1:
        raise ValueError("coefficients must be positive")
    if a == c:
        cls = AC
    elif b == c:
        cls = BC
    elif a + b == c:
        cls = APB
    else:
        cls = NOT_RADO
    return RadoTriple(a, b, c, cls)


def _as_triple(triple) -> RadoTriple:
    if isinstance(triple, RadoTriple):
        return triple
    return classify_rado(*triple)


@dataclass(frozen=True)
class FormTriple:
    """P1, P2, P3 in the labelling used by the grid witnesses, and the
    coordinate each one parametrizes (coordinate_map[j] for P_{j+1})."""

    P1: BinaryQuadraticForm
    P2: BinaryQuadraticForm
    P3: BinaryQuadraticForm
    coordinate_map: tuple

    @property
    def forms(self):
        return (self.P1, self.P2, self.P3)

    def form_for(self, coord: str) -> BinaryQuadraticForm:
        return self.forms[self.coordinate_map.index(coord)]

    def xyz(self, m, n):
        vals = dict(zip(self.coordinate_map, (P(m, n) for P in self.forms)))
        return vals["x"], vals["y"], vals["z"]

    def identity_holds(self, a, b, c) -> bool:
        """a X^2 + b Y^2 - c Z^2 vanishes as a polynomial in (m, n)."""
        total = [0] * 5
        for coef, coord in ((a, "x"), (b, "y"), (-c, "z")):
            sq = _poly_square(self.form_for(coord).coefficients)
            for i in range(5):
                total[i] += coef * sq[i]
        return all(t == 0 for t in total)


def _poly_square(coefs):
    # (u m^2 + v mn + w n^2)^2 as coefficients of m^4, m^3 n, ..., n^4
    out = [0] * 5
    for i, ci in enumerate(coefs):
        for j, cj in enumerate(coefs):
            out[i + j] += ci * cj
    return out


def forms_for(triple) -> FormTriple:
    t = _as_triple(triple)
    a, b = t.a, t.b
    if t.cls == AC:
        return FormTriple(
            BinaryQuadraticForm(0, 2 * a, 0),
            BinaryQuadraticForm(1, 0, -a * b),
            BinaryQuadraticForm(1, 0, a * b),
            ("y", "x", "z"),
        )
    if t.cls == BC:
        # the a = c family for (b, a, b); x and y trade places
        return FormTriple(
            BinaryQuadraticForm(0, 2 * b, 0),
            BinaryQuadraticForm(1, 0, -a * b),
            BinaryQuadraticForm(1, 0, a * b),
            ("x", "y", "z"),
        )
    if t.cls == APB:
        return FormTriple(
            BinaryQuadraticForm(1, 0, a * b),
            BinaryQuadraticForm(1, -2 * b, -a * b),
            BinaryQuadraticForm(1, 2 * a, -a * b),
            ("z", "x", "y"),
        )
    raise NotRadoTriple(f"({a},{b},{t.c}) is not a Rado triple")


@dataclass(frozen=True)
class Solution:
    x: int
    y: int
    z: int
    positive: bool
    distinct: bool

    def as_tuple(self):
        return (self.x, self.y, self.z)


def solution(triple, k: int, m: int, n: int) -> Solution:
    x, y, z = (k * v for v in forms_for(triple).xyz(m, n))
    return Solution(x, y, z, min(x, y, z) > 0, len({x, y, z}) == 3)


# ---------------------------------------------------------------- S_delta


@dataclass(frozen=True)
class SDeltaSpec:
    """Cone m > alpha n (alpha stored through alpha^2) plus the circle test
    |P_j(m,n)^i - 1| <= delta for all three forms."""

    forms: FormTriple
    alpha_sq: Fraction
    delta: float

    def __post_init__(self):
        object.__setattr__(self, "alpha_sq", Fraction(self.alpha_sq))
        if self.alpha_sq <= 0:
            raise ValueError("alpha must be positive")
        if not 0 < self.delta <= 2:
            raise ValueError("delta must lie in (0, 2]")

    @property
    def alpha(self) -> float:
        return math.sqrt(self.alpha_sq)

    def in_cone(self, m: int, n: int) -> bool:
        return self.alpha_sq.denominator * m * m > self.alpha_sq.numerator * n * n

    def cone_start(self, n: int) -> int:
        """Smallest m with m > alpha n."""
        num, den = self.alpha_sq.numerator, self.alpha_sq.denominator
        m = math.isqrt(num * n * n // den)
        while den * m * m <= num * n * n:
            m += 1
        return m


def cone_slope_squared(triple) -> Fraction:
    """Default alpha^2: (2 sqrt(ab))^2 for a = c / b = c, (2 gamma)^2 with
    gamma = max(4b, sqrt(2ab)) for a + b = c."""
    t = _as_triple(triple)
    if t.cls in (AC, BC):
        return Fraction(4 * t.a * t.b)
    if t.cls == APB:
        return Fraction(4 * max(16 * t.b * t.b, 2 * t.a * t.b))
    raise NotRadoTriple(str(t.coefficients))


def sdelta_spec(triple, delta: float, alpha_sq=None) -> SDeltaSpec:
    return SDeltaSpec(forms_for(triple), cone_slope_squared(triple) if alpha_sq is None else alpha_sq, delta)


def _circle_ok(value: int, delta: float) -> bool:
    return 2.0 * abs(math.sin(math.log(value) / 2.0)) <= delta + TOL


def s_delta_contains(spec: SDeltaSpec, m: int, n: int) -> bool:
    if m < 1 or n < 1:
        raise ValueError("m, n must be >= 1")
    if not spec.in_cone(m, n):
        return False
    for P in spec.forms.forms:
        v = P(m, n)
        if v <= 0:
            raise NonpositiveFormValue(f"{P} = {v} at ({m},{n}) inside the cone")
        if not _circle_ok(v, spec.delta):
            return False
    return True


def s_delta_points(spec: SDeltaSpec, N: int):
    """Row-major (n outer, m inner) iterator over S_delta within [N]^2."""
    for n in range(1, N + 1):
        for m in range(max(1, spec.cone_start(n)), N + 1):
            if s_delta_contains(spec, m, n):
                yield (m, n)


def s_delta_density(spec: SDeltaSpec, N: int) -> tuple[int, float]:
    """Exact count of S_delta in [N]^2 and count / N^2."""
    if N < 1:
        raise ValueError("N must be >= 1")
    count = 0
    m_all = np.arange(1, N + 1, dtype=np.int64)
    for n in range(1, N + 1):
        m0 = spec.cone_start(n)
        if m0 > N:
            break
        m = m_all[m0 - 1 :]
        ok = np.ones(m.shape, dtype=bool)
        for P in spec.forms.forms:
            vals = P.alpha * m * m + P.beta * m * n + P.gamma * n * n
            if (vals <= 0).any():
                bad = int(m[np.argmax(vals <= 0)])
                raise NonpositiveFormValue(f"{P} <= 0 at ({bad},{n}) inside the cone")
            if spec.delta < 2:
                ok &= 2.0 * np.abs(np.sin(np.log(vals.astype(float)) / 2.0)) <= spec.delta + TOL
        count += int(ok.sum())
    return count, count / (N * N)


def cone_count(alpha_sq, N: int) -> int:
    """Number of (m, n) in [N]^2 with m > alpha n."""
    spec = SDeltaSpec(forms_for((1, 1, 1)), alpha_sq, 2.0)
    return sum(max(0, N - spec.cone_start(n) + 1) for n in range(1, N + 1))


# ---------------------------------------------------------------- monochromatic search


@dataclass(frozen=True)
class MonochromaticTriple:
    x: int
    y: int
    z: int
    params: tuple  # (k, m, n) for parametric hits, () for raw-scan hits
    angles: tuple  # per function, signed angles at x, y, z
    scanned: int

    def as_tuple(self):
        return (self.x, self.y, self.z)


def _in_arc(functions, values, half_width):
    limit = TAU * half_width - TOL
    angles = []
    for f in functions:
        row = tuple(signed_angle(f._angle(v)) for v in values)
        if any(abs(a) >= limit for a in row):
            return None
        angles.append(row)
    return tuple(angles)


def monochromatic_search(triple, functions, half_width: float, bounds=(50, 50)) -> MonochromaticTriple:
    """First (k, m, n) in scan order (k outer, then m, then n) giving a positive,
    pairwise distinct solution whose function values all lie in the open arc
    I = {e(t) : |t| < half_width}."""
    t = _as_triple(triple)
    forms = forms_for(t)
    k_max, m_max = bounds
    scanned = 0
    for k in range(1, k_max + 1):
        for m in range(1, m_max + 1):
            for n in range(1, m_max + 1):
                scanned += 1
                x, y, z = (k * v for v in forms.xyz(m, n))
                if min(x, y, z) <= 0 or len({x, y, z}) < 3:
                    continue
                angles = _in_arc(functions, (x, y, z), half_width)
                if angles is not None:
                    return MonochromaticTriple(x, y, z, (k, m, n), angles, scanned)
    raise NotFound(f"no monochromatic solution with k <= {k_max}, m, n <= {m_max}", bounds)


def raw_monochromatic_scan(triple, functions, half_width: float, bound: int) -> MonochromaticTriple:
    """Scan x (outer) and y up to bound, recovering z from integrality."""
    t = _as_triple(triple)
    if not t.is_rado:
        raise NotRadoTriple(str(t.coefficients))
    scanned = 0
    for x in range(1, bound + 1):
        for y in range(1, bound + 1):
            scanned += 1
            num = t.a * x * x + t.b * y * y
            if num % t.c:
                continue
            z = math.isqrt(num // t.c)
            if z * z * t.c != num or len({x, y, z}) < 3:
                continue
            angles = _in_arc(functions, (x, y, z), half_width)
            if angles is not None:
                return MonochromaticTriple(x, y, z, (), angles, scanned)
    raise NotFound(f"no monochromatic solution with x, y <= {bound}", (bound,))


def verify_monochromatic(triple, functions, half_width: float, xyz) -> bool:
    t = _as_triple(triple)
    x, y, z = xyz
    if not (min(x, y, z) > 0 and len({x, y, z}) == 3 and t.satisfied_by(x, y, z)):
        return False
    return _in_arc(functions, (x, y, z), half_width) is not None
