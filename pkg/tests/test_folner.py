import math
from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st
from mpmath import mp

from pretlab.errors import NotFoundWithinCap, PrimeNotInSupport, TooLarge
from pretlab.folner import (
    FolnerElement,
    FolnerSpec,
    certified_chord,
    dilation_defect,
    elements,
    enumerate_family,
    find_q_delta_L,
    q_L,
    sample,
)
from pretlab.numeric import Factorization
from pretlab.quadforms import BinaryQuadraticForm

SUM_SQ = BinaryQuadraticForm(1, 0, 1)


def values(spec):
    return [e.value for e in enumerate_family(spec)]


def test_enumeration_examples():
    assert values(FolnerSpec.phi_r(2)) == [8]
    assert values(FolnerSpec.phi_r(3)) == [1296]
    assert values(FolnerSpec.phi_rkp(2, 5, SUM_SQ)) == [5**6, 5**7]
    assert FolnerSpec.phi_rkp(2, 11, SUM_SQ).support == (5,)


def test_family_size_cap():
    spec = FolnerSpec.phi_r(40)
    assert spec.size > 10**6
    with pytest.raises(TooLarge):
        list(enumerate_family(spec))
    mode, elems = elements(spec, samples=7, seed=1)
    assert mode == "sampled" and len(elems) == 7


@given(st.integers(2, 14))
def test_enumeration_is_the_full_box(r):
    spec = FolnerSpec.phi_r(r)
    elems = list(enumerate_family(spec))
    assert len(elems) == spec.size == len({e.value for e in elems})
    for e in elems:
        for p, theta in e.exponents:
            assert r < theta <= 3 * r / 2


def test_sampling():
    assert [e.value for e in sample(FolnerSpec.phi_r(2), 3, 5)] == [8, 8, 8]
    assert [e.value for e in sample(FolnerSpec.phi_r(3), 1, 9)] == [1296]
    counts = Counter(e.value for e in sample(FolnerSpec.phi_rkp(2, 5, SUM_SQ), 4000, 11))
    assert abs(counts[5**6] / 4000 - 0.5) < 0.05
    a = [e.value for e in sample(FolnerSpec.phi_r(30), 5, 42)]
    assert a == [e.value for e in sample(FolnerSpec.phi_r(30), 5, 42)]


def test_element_validation_and_round_trip():
    spec = FolnerSpec.phi_rk(2, 5)
    e = spec.element({3: 6, 5: 7})
    assert e.value == 3**6 * 5**7
    assert FolnerElement.from_dict(e.to_dict()) == e
    with pytest.raises(ValueError):
        spec.element({5: 6})
    with pytest.raises(ValueError):
        spec.element({3: 5, 5: 6})


def test_dilation_defect():
    assert dilation_defect(FolnerSpec.phi_r(2), 2) == 1.0
    assert dilation_defect(FolnerSpec.phi_rkp(2, 11, SUM_SQ), 5) == pytest.approx(2 / 5)
    defects = [dilation_defect(FolnerSpec.phi_rk(2, K), 3) for K in (10, 20, 40)]
    assert defects == sorted(defects, reverse=True) and defects[-1] == pytest.approx(0.1)
    sampled = dilation_defect(FolnerSpec.phi_rk(2, 20), 3, "sampled", samples=20000, seed=3)
    assert abs(sampled - defects[1]) < 0.03
    with pytest.raises(PrimeNotInSupport):
        dilation_defect(FolnerSpec.phi_rkp(2, 11, SUM_SQ), 3)


def test_dilation_defect_against_symmetric_difference():
    # oracle: count p*Phi vs Phi directly on exponent vectors
    spec = FolnerSpec.phi_rk(3, 8)
    box = {e.exponents for e in enumerate_family(spec)}
    for p in spec.support:
        shifted = {tuple((q, t + (q == p)) for q, t in ex) for ex in box}
        assert dilation_defect(spec, p) == pytest.approx(min(1.0, len(box ^ shifted) / len(box)))


def test_q_L():
    assert q_L(1).value == 1
    assert q_L(2).value == 16
    assert q_L(3).value == 46656


def test_q_delta_L_examples():
    assert find_q_delta_L(2.0, 2).n_shift == 1
    q = find_q_delta_L(0.05, 2)
    assert (q.n_shift, q.value) == (5, 512)
    with pytest.raises(NotFoundWithinCap):
        find_q_delta_L(1e-12, 2, search_cap=10)


def oracle_n_shift(delta, L, cap):
    # independent high-precision linear scan
    with mp.workprec(300):
        base = mp.fsum(2 * L * mp.log(p) for p in (2, 3, 5, 7, 11, 13, 17, 19, 23) if p <= L)
        for n in range(1, cap + 1):
            x = base + n * mp.log(2)
            if 2 * abs(mp.sin(x / 2)) <= delta:
                return n
    return None


@pytest.mark.parametrize("delta,L", [(0.05, 2), (0.5, 5), (1.0, 7), (0.01, 3), (1.9, 23)])
def test_q_delta_L_against_oracle(delta, L):
    q = find_q_delta_L(delta, L)
    assert q.n_shift == oracle_n_shift(delta, L, q.n_shift)
    assert q.chord_upper <= delta


def test_certified_chord_encloses_value():
    fac = Factorization(((2, 9), (3, 6)))
    (lo, hi), _ = certified_chord(fac)
    with mp.workprec(300):
        true = 2 * abs(mp.sin(mp.log(2**9 * 3**6) / 2))
        assert mp.mpf(lo) <= true <= mp.mpf(hi)
    assert hi - lo < 1e-15
