import itertools
import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pretlab.errors import BadOrdering, BelowThreshold, IndexOutOfRange, NotRadoTriple, WrongFamily
from pretlab.folner import FolnerSpec, elements, enumerate_family, q_L, sample
from pretlab.gridwitness import (
    AC_IRR,
    AC_RED,
    APB_ALL,
    APB_BOTH,
    APB_P2RED,
    CaseTag,
    admissibility_threshold,
    case_for,
    choose_parameters,
    cofactor,
    construct_v,
    excluded_constant,
    factor_shift,
    families,
    make_params,
    nondegenerate_parameters,
    smallest_parameters,
    verify_witness,
    witness_from_dict,
    witness_to_dict,
)
from pretlab.numeric import factorize
from pretlab.quadforms import BinaryQuadraticForm

TRIPLES = {AC_RED: (1, 1, 1), AC_IRR: (1, 2, 1), APB_ALL: (1, 1, 2), APB_P2RED: (3, 1, 4), APB_BOTH: (9, 16, 25)}


def test_case_selection():
    for kind, t in TRIPLES.items():
        assert case_for(*t).kind == kind
    swapped = case_for(2, 1, 1)
    assert swapped.kind == AC_IRR and swapped.triple == (1, 2, 1) and swapped.swapped
    # only P3 reducible: handled with a and b exchanged
    c = case_for(1, 3, 4)
    assert c.kind == APB_P2RED and c.triple == (3, 1, 4) and c.swapped
    with pytest.raises(NotRadoTriple):
        case_for(1, 1, 4)
    with pytest.raises(ValueError):
        CaseTag(AC_IRR, 1, 1, 1)


def test_parameters_and_thresholds():
    p = choose_parameters(case_for(1, 1, 1))
    assert (p.kappa, p.gamma) == (2, 1)
    assert excluded_constant(case_for(1, 1, 1)) == 2 * 2 * 1 * 1 * 2 * -1 * 3 * 5
    assert admissibility_threshold(case_for(1, 1, 1)) == 5
    assert choose_parameters(case_for(1, 2, 1)).kappa == 1
    assert excluded_constant(case_for(1, 1, 2)) == 4
    assert choose_parameters(case_for(9, 16, 25)).lambdas[:2] == (-36, 4)
    lam = choose_parameters(case_for(9, 16, 25)).lambdas
    assert lam[2] + lam[3] == 2 * 9
    const = excluded_constant(case_for(9, 16, 25))
    assert set(factorize(abs(const)).primes()) <= {2, 3, 5}


def oracle_conditions(params, v):
    """Independent recheck of the gcd and residue conditions."""
    case, Q = params.case, params.Q
    Q1, Q2, Q3 = (q.value for q in params.Qs)
    P1, P2, P3 = case.forms
    a, b = case.a, case.b

    def pair(value, Qj, M):
        return math.gcd(Q, value) == Qj and value % Qj == 0 and (value // Qj * Qj) % M == 1 % M

    def unit(value, M):
        return math.gcd(Q, value) == 1 and (value - 1) % M == 0

    checks = [0 <= v < Q]
    if case.kind.startswith("AC"):
        checks += [math.gcd(Q, v) == Q1, v % Q1 == 0 and (v // Q1) % Q1 == 1 % Q1]
        if case.kind == AC_RED:
            g = math.isqrt(a * b)
            checks += [pair(1 - g * v, Q2, Q1), unit(1 + g * v, Q1), pair(P3.at_one(v), Q3, Q1)]
        else:
            checks += [pair(P2.at_one(v), Q2, Q1), pair(P3.at_one(v), Q3, Q1)]
    else:
        Ms = q_L(params.s).value
        checks.append(pair(P1.at_one(v), Q1, Ms))
        if case.kind == APB_ALL:
            checks += [pair(P2.at_one(v), Q2, Ms), pair(P3.at_one(v), Q3, Ms)]
        else:
            l1, l2, *rest = choose_parameters(case).lambdas
            checks += [pair(1 + l1 * v, Q2, Ms), unit(1 + l2 * v, Ms)]
            if rest:
                checks += [pair(1 + rest[0] * v, Q3, Ms), unit(1 + rest[1] * v, Ms)]
            else:
                checks.append(pair(P3.at_one(v), Q3, Ms))
    return all(checks)


def smallest_witnesses(kind, limit=None):
    case = case_for(*TRIPLES[kind])
    s, r, K, L = smallest_parameters(case)
    combos = itertools.product(*(elements(f, 50, 0)[1] for f in families(case, r, K, L, s)))
    for Qs in itertools.islice(combos, limit):
        params = make_params(case, r, K, L, *Qs, s=s)
        yield params, construct_v(params)


@pytest.mark.parametrize("kind", list(TRIPLES))
def test_construction_passes_all_conditions(kind):
    for params, w in smallest_witnesses(kind, limit=25):
        assert w.report.all_pass
        assert oracle_conditions(params, w.v)
        for p, j, theta, zeta in w.hensel_roots:
            P = params.case.forms[j - 1]
            assert (P.at_one(zeta) - p**theta) % p ** (theta + 1) == 0


@pytest.mark.parametrize("kind", list(TRIPLES))
def test_mutations_are_detected(kind):
    broken = total = 0
    for params, w in smallest_witnesses(kind, limit=5):
        for d in range(1, 21):
            total += 1
            report = verify_witness(params, w.with_v(w.v + d))
            substantive = [c for c in report.conditions if not c.name.startswith("range")]
            broken += not all(c.holds for c in substantive)
            assert oracle_conditions(params, w.v + d) == report.all_pass
    assert broken / total >= 0.95


@pytest.mark.parametrize("kind", list(TRIPLES))
def test_cofactors_exact(kind):
    params, w = next(smallest_witnesses(kind, limit=1))
    Q = params.Q
    for j, P in enumerate(params.case.forms, start=1):
        Qj = params.Qs[j - 1].value
        for m, n in [(1, 1), (2, 7), (13, 5), (50, 50)]:
            R = cofactor(params, w, j, m, n)
            assert Qj * R.value == P(Q * m + 1, Q * n + w.v)
    with pytest.raises(IndexOutOfRange):
        cofactor(params, w, 4, 1, 1)


def test_ac_reducible_closed_forms():
    params, w = next(smallest_witnesses(AC_RED, limit=1))
    Q, Q1, v = params.Q, params.Q1.value, w.v
    rng = random.Random(5)
    for _ in range(100):
        m, n = rng.randint(1, 10**6), rng.randint(1, 10**6)
        closed = 2 * (Q * m + 1) * ((Q // Q1) * n + v // Q1)
        assert cofactor(params, w, 1, m, n).value == closed


def test_desk_instance_and_errors():
    case = case_for(1, 1, 1)
    P3 = case.forms[2]
    fams = families(case, 7, 11, 29)
    Qs = [sample(f, 1, 3)[0] for f in fams]
    params = make_params(case, 7, 11, 29, *Qs, delta=1.9)
    w = construct_v(params)
    assert w.report.all_pass and oracle_conditions(params, w.v)
    with pytest.raises(BelowThreshold):
        low = families(case, 2, 11, 29)
        construct_v(make_params(case, 2, 11, 29, *(sample(f, 1, 0)[0] for f in low)))
    with pytest.raises(BadOrdering):
        construct_v(make_params(case, 7, 11, 20, Qs[0], Qs[1], sample(FolnerSpec.phi_rkp(11, 20, P3), 1, 0)[0]))
    with pytest.raises(WrongFamily):
        construct_v(make_params(case, 7, 11, 29, Qs[0], sample(FolnerSpec.phi_rkp(7, 11, P3), 1, 0)[0], Qs[2]))


def test_nondegenerate_parameters():
    s, r, K, L = nondegenerate_parameters(case_for(1, 1, 2))
    assert (s, r, K, L) == (3, 5, 7, 17)
    for kind, t in TRIPLES.items():
        case = case_for(*t)
        s, r, K, L = nondegenerate_parameters(case)
        assert all(f.support for f in families(case, r, K, L, s))
        Qs = [sample(f, 1, 1)[0] for f in families(case, r, K, L, s)]
        assert construct_v(make_params(case, r, K, L, *Qs, s=s)).report.all_pass


def test_json_round_trip():
    params, w = next(smallest_witnesses(APB_BOTH, limit=1))
    d = witness_to_dict(params, w)
    assert isinstance(d["v"], str) and d["all_pass"]
    p2, w2 = witness_from_dict(d)
    assert w2.v == w.v and p2.Q == params.Q
    assert verify_witness(p2, w2).all_pass


def test_factor_shift_examples():
    assert factor_shift(2, 3, FolnerSpec.phi_rk(2, 3).element({3: 4})) == 1
    assert factor_shift(2, 5, FolnerSpec.phi_rk(2, 5).element({3: 6, 5: 6})) == 1
    with pytest.raises(WrongFamily):
        factor_shift(2, 3, FolnerSpec.phi_r(2).element({2: 3}))
    with pytest.raises(WrongFamily):
        factor_shift(3, 5, FolnerSpec.phi_rk(2, 5).element({3: 6, 5: 6}))


@given(st.integers(2, 6), st.integers(1, 8), st.integers(0, 10**6))
def test_factor_shift_post_conditions(r, extra, seed):
    K = r + extra
    for spec in (FolnerSpec.phi_rk(r, K), FolnerSpec.phi_rkp(r, K, BinaryQuadraticForm(1, 0, 1))):
        Q = sample(spec, 1, seed)[0]
        v = factor_shift(r, K, Q)
        radical = math.prod(p for p in range(2, K + 1) if all(p % d for d in range(2, p)))
        small = math.prod(p**r for p in range(2, r + 1) if all(p % d for d in range(2, p)))
        assert math.gcd(v, radical) == 1
        assert (v * Q.value) % small == 1 % small
