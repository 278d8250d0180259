"""Highest weight vector bases of the bidegree slices."""

import pytest

from traceforge.glcat import Partition, abs_delta
from traceforge.hwv import HwvBasis, hwv_basis, hwv_json, hwv_verify, span_equal

# (l1, l2) -> (P, Q, s)
TABLE = {
    (7, 5): (155, 119, 36),
    (6, 6): (185, 155, 30),
    (8, 5): (203, 136, 67),
    (7, 6): (252, 203, 49),
    (9, 5): (284, 188, 96),
    (8, 6): (390, 284, 106),
    (7, 7): (418, 390, 28),
}


@pytest.fixture(scope="module")
def small_bases():
    return {lam: hwv_basis(Partition.of(*lam)) for lam in ((7, 5), (6, 6))}


def test_small_weights_full_table(small_bases):
    for lam, basis in small_bases.items():
        P, Q, s = TABLE[lam]
        assert basis.P == P
        assert basis.Q == Q
        assert basis.alpha_rank == Q
        assert basis.s == s == P - Q


def test_vectors_are_killed_by_raising(small_bases):
    for basis in small_bases.values():
        for v in basis.vectors:
            assert abs_delta(v).is_zero()
            assert v.bidegree() == tuple(basis.lam)


def test_blocked_and_unblocked_spans_agree():
    lam = Partition(7, 5)
    plain = hwv_basis(lam, blocked=False)
    blocked = hwv_basis(lam, blocked=True)
    assert plain.blocked is False and blocked.blocked is True
    assert plain.s == blocked.s
    assert span_equal(plain, blocked)
    assert span_equal(blocked, plain)


def test_blocked_threaded_matches_serial():
    lam = Partition(6, 6)
    serial = hwv_basis(lam, blocked=True, threads=1)
    threaded = hwv_basis(lam, blocked=True, threads=4)
    assert span_equal(serial, threaded)


def test_blocked_default_kicks_in_above_threshold():
    assert hwv_basis(Partition(7, 5)).blocked is False
    assert hwv_basis(Partition(8, 5)).blocked is True


def test_span_equal_rejects_different_weights(small_bases):
    assert not span_equal(small_bases[(7, 5)], small_bases[(6, 6)])


def test_verify_report_exact_only(small_bases):
    rep = hwv_verify(small_bases[(6, 6)], evaluate=False)
    assert rep.ok
    assert rep.rank_ok and rep.abs_delta_zero
    assert rep.eval_delta_zero is None and rep.eval_h_fixed is None
    assert rep.checked_by_eval == 0


def test_verify_report_with_evaluation(small_bases, session_cache):
    rep = hwv_verify(small_bases[(7, 5)], evaluate=True, sample=3, cache=session_cache)
    assert rep.ok
    assert rep.checked_by_eval == 3
    assert rep.failures == ()


def test_verify_flags_a_broken_basis(small_bases):
    good = small_bases[(7, 5)]
    # swap in a vector that is not a highest weight vector
    from traceforge.glcat import AbsPoly

    bad_vec = AbsPoly.monomial(good.monomials[0])
    bad = HwvBasis(
        good.lam,
        good.P,
        good.Q,
        good.alpha_rank,
        good.blocked,
        good.monomials,
        (bad_vec,) + good.vectors[1:],
    )
    rep = hwv_verify(bad, evaluate=False)
    assert not rep.ok
    assert any("abs_delta" in f for f in rep.failures)


def test_hwv_json_shape(small_bases):
    doc = hwv_json(small_bases[(6, 6)])
    assert doc["lambda"] == [6, 6]
    assert doc["P"] == 185 and doc["Q"] == 155 and doc["s"] == 30
    assert len(doc["vectors"]) == 30
    for vec in doc["vectors"]:
        assert vec  # no empty vectors
        for name, frac in vec.items():
            assert name.startswith("u")
            num, den = frac.split("/")
            int(num), int(den)
