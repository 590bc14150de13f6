from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from towbombe import tow
from towbombe.tow import A, B, Counts, FluctuationKind, FluctuationSpec, NO_FLUCTUATION, TowState


def state(na=0, la=0, nb=0, lb=0, omega=0.08):
    return TowState(plays=(na, nb), failures=(la, lb), omega=omega)


def with_q(qa, qb):
    # rewarded-only counts give Q_k = N_k exactly
    return state(na=qa, nb=qb)


# exact rational references for the derived examples
Q_10_4 = Fraction(10) - Fraction(108, 100) * 4               # 5.68
Q_PRIME_EXAMPLE = 10 - 4 + (Fraction(1, 2) - 1) * 5 + 3      # 6.5


@pytest.mark.parametrize("na, la, omega, expected", [
    (0, 0, 0.5, 0.0),
    (10, 4, 0.08, float(Q_10_4)),
    (5, 5, 1.0, -5.0),
])
def test_q_estimate(na, la, omega, expected):
    assert tow.q_estimate(state(na, la, omega=omega), A) == pytest.approx(expected, abs=1e-12)


def test_update_rewarded_and_failed():
    s = state()
    assert tow.q_estimate(tow.update(s, A, True), A) == 1.0
    assert tow.q_estimate(tow.update(s, A, False), A) == pytest.approx(-0.08, abs=1e-15)
    after = tow.update(tow.update(s, A, True), A, False)
    assert after.plays == (2, 0) and after.failures == (1, 0)


@given(st.integers(0, 50), st.integers(0, 50), st.booleans())
def test_update_never_touches_other_machine(n, extra, ok):
    s = state(na=n + extra, la=n, nb=n + 2 * extra, lb=extra)
    assert tow.q_estimate(tow.update(s, A, ok), B) == tow.q_estimate(s, B)


@given(st.integers(0, 40), st.integers(0, 40), st.floats(0.001, 3), st.sampled_from([A, B]))
def test_update_monotone(n, l, omega, k):
    s = TowState(plays=(n + l, n + l), failures=(l, l), omega=omega)
    before = tow.q_estimate(s, k)
    assert tow.q_estimate(tow.update(s, k, True), k) > before
    assert tow.q_estimate(tow.update(s, k, False), k) < before


def test_displacement_examples():
    assert tow.displacement(state()) == 0.0
    s = state(na=10, la=4, nb=2)
    assert tow.q_estimate(s, B) == 2.0
    assert tow.displacement(s) == pytest.approx(float(Q_10_4 - 2), abs=1e-12)
    assert tow.displacement(with_q(3, 3), 0.5) == 0.5


@given(st.integers(0, 30), st.integers(0, 30), st.integers(0, 30), st.integers(0, 30))
def test_displacement_antisymmetric(na, la, nb, lb):
    s = state(na + la, la, nb + lb, lb)
    assert tow.displacement(s, 0.0, B) == -tow.displacement(s, 0.0, A)


def test_select_follows_sign():
    rng = np.random.default_rng(0)
    assert tow.select(with_q(3, 1), NO_FLUCTUATION, rng) == A
    assert tow.select(with_q(1, 3), NO_FLUCTUATION, rng) == B


def test_select_tie_is_fair_coin():
    rng = np.random.default_rng(1)
    picks = [tow.select(with_q(2, 2), NO_FLUCTUATION, rng) for _ in range(10_000)]
    assert picks.count(A) / len(picks) == pytest.approx(0.5, abs=0.02)


@given(st.integers(0, 20), st.integers(0, 20), st.integers(0, 20), st.integers(0, 20), st.integers(0, 2**32 - 1))
def test_select_invariant_under_common_shift(qa, qb, la, shift, seed):
    base = state(na=qa + la, la=la, nb=qb + la, lb=la, omega=1.0)
    shifted = state(na=qa + la + shift, la=la, nb=qb + la + shift, lb=la, omega=1.0)
    fluct = FluctuationSpec(FluctuationKind.GAUSSIAN, 0.7)
    assert tow.select(base, fluct, np.random.default_rng(seed)) == \
        tow.select(shifted, fluct, np.random.default_rng(seed))


def test_alternating_fluctuation():
    fl = FluctuationSpec(FluctuationKind.ALTERNATING, 0.5)
    rng = np.random.default_rng(0)
    assert [fl.sample(rng, t) for t in range(4)] == [0.5, -0.5, 0.5, -0.5]
    assert tow.select(with_q(1, 1), fl, rng, t=0) == A
    assert tow.select(with_q(1, 1), fl, rng, t=1) == B


def test_invalid_state_and_fluctuation():
    with pytest.raises(ValueError):
        TowState(plays=(1, 0), failures=(2, 0))
    with pytest.raises(ValueError):
        TowState(omega=-0.1)
    with pytest.raises(ValueError):
        FluctuationSpec(FluctuationKind.GAUSSIAN, -1)


@pytest.mark.parametrize("gamma, expected", [(0.0, 0.0), (1.0, 1.0), (0.15, 0.15 / 1.85)])
def test_omega0(gamma, expected):
    assert tow.omega0(gamma) == pytest.approx(expected, abs=1e-15)


def test_omega0_reference_value_rounds_to_008():
    assert round(tow.omega0(0.15), 2) == 0.08
    assert tow.omega0(0.15) == pytest.approx(0.0811, abs=5e-5)


@pytest.mark.parametrize("gamma", [2.0, 2.5, -0.1])
def test_omega0_domain(gamma):
    with pytest.raises(ValueError):
        tow.omega0(gamma)


@pytest.mark.parametrize("probs, m, expected", [
    ((0.03, 0.05, 0.1, 0.2, 0.9), 3, 0.15 / 1.85),
    ((1, 0, 0), 2, 0.0),
    ((0.5, 0.5, 0.5), 2, 1.0),
])
def test_omega0_multi(probs, m, expected):
    assert tow.omega0_multi(probs, m) == pytest.approx(expected, abs=1e-15)


def test_omega0_multi_needs_m_plus_one_channels():
    with pytest.raises(ValueError):
        tow.omega0_multi((0.5, 0.4, 0.3), 3)


def test_q_prime_examples():
    c = Counts(plays=(10, 5), failures=(4, 3))
    assert tow.q_prime(c, 0.5, A) == pytest.approx(float(Q_PRIME_EXAMPLE), abs=1e-12)
    assert tow.q_prime(Counts(), 0.7, A) == 0.0
    assert tow.q_prime(Counts(plays=(9, 123), failures=(2, 0)), 1.0, A) == 7.0


def test_q_double_prime_examples():
    c = Counts(plays=(10, 5), failures=(4, 3))
    assert tow.q_double_prime(c, 0.5, A) == pytest.approx(float(Q_PRIME_EXAMPLE / Fraction(3, 2)), abs=1e-12)
    assert tow.q_double_prime(Counts(), 0.3, B) == 0.0
    assert tow.q_double_prime(c, 0.0, B) == tow.q_prime(c, 0.0, B) / 2
    with pytest.raises(ValueError):
        tow.q_double_prime(c, 2.0, A)


counts = st.integers(0, 10_000)


@given(counts, counts, counts, counts, st.floats(0, 1.99))
def test_tow_principle_identity(na, la_frac, nb, lb_frac, gamma):
    la, lb = la_frac % (na + 1), lb_frac % (nb + 1)
    s = TowState(plays=(na, nb), failures=(la, lb), omega=tow.omega0(gamma))
    lhs = tow.q_estimate(s, A) - tow.q_estimate(s, B)
    rhs = tow.q_double_prime(s, gamma, A) - tow.q_double_prime(s, gamma, B)
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)
