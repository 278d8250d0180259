"""Relation spaces at total degree 12 and the structures built on them.

The degree 13 and 14 slices take minutes and live in the acceptance module
behind the extended gate; everything here stays in the seconds range.
"""

import importlib.resources as ir

from fractions import Fraction

import pytest

from traceforge import relfinder
from traceforge.cache import CacheStore
from traceforge.genmat import EvalCache
from traceforge.glcat import AbsPoly, Partition, abs_delta, phi
from traceforge.phiparse import parse_phi
from traceforge.relfinder import (
    PARAMETER_SPLIT,
    RelationSpace,
    build_certificate,
    leading_analysis,
    leading_monomial,
    membership,
    new_relations,
    orbit,
    reduce_hsop,
    relation_space,
    verify_zero,
    verify_zero_abs,
    write_certificates,
)

DEG12_LEADING = {
    "u5_0*u8_0",
    "u5_0*u8_1",
    "u5_1*u8_0",
    "u5_1*u8_1",
    "u7_0^2",
}


@pytest.fixture(scope="module")
def cache(tmp_path_factory):
    store = CacheStore(tmp_path_factory.mktemp("relcache") / "store")
    return EvalCache(store=store)


@pytest.fixture(scope="module")
def s75(cache):
    return relation_space(Partition(7, 5), cache=cache)


@pytest.fixture(scope="module")
def s66(cache):
    return relation_space(Partition(6, 6), cache=cache)


def test_parameter_split_shape():
    hsop = {g.gid for g in PARAMETER_SPLIT.hsop}
    comp = {g.gid for g in PARAMETER_SPLIT.complement}
    assert len(hsop) == 15 and len(comp) == 15
    assert hsop | comp == set(range(30))
    assert not hsop & comp


def test_relation_dimensions(s75, s66):
    assert s75.r == 1
    assert s66.r == 2


def test_zeta_vectors_are_hwv_relations(s75, s66):
    for space in (s75, s66):
        for v in space.relvectors:
            assert abs_delta(v).is_zero()
            assert v.bidegree() == tuple(space.lam)
        for z in space.zeta:
            lead = next(c for c in z if c)
            assert lead == 1


def test_orbit_sizes(s75, s66):
    assert len(orbit(s75)) == 1 * 3  # a = 2 ladder
    assert len(orbit(s66)) == 2 * 1  # a = 0, two vectors
    for w in orbit(s75):
        assert not w.is_zero()


def test_orbit_ladder_ends_at_lowest_weight(s75):
    # applying the lowering derivation once more kills the last rung
    from traceforge.glcat import abs_delta1

    last = orbit(s75)[-1]
    assert abs_delta1(last).is_zero()


def test_leading_analysis_degree12(s75, s66):
    rep = leading_analysis([s75, s66])
    assert set(rep.names) == DEG12_LEADING
    assert len(rep.entries) == 5
    assert rep.absorbed == ()


def test_leading_monomials_avoid_hsop(s75, s66):
    hsop = set(PARAMETER_SPLIT.hsop)
    for space in (s75, s66):
        for vec in orbit(space):
            red = reduce_hsop(vec)
            lead = leading_monomial(red)
            assert lead is not None
            assert not any(g in hsop for g in lead)


def test_membership_of_bundled_relations(s66, s75, cache):
    data = ir.files("traceforge") / "data"
    p_prime = parse_phi((data / "v66prime.phi").read_text())
    p_second = parse_phi((data / "v66second.phi").read_text())
    p75 = parse_phi((data / "v75.phi").read_text())
    assert membership(p_prime, s66)
    assert membership(p_second, s66)
    assert membership(p75, s75)
    with pytest.raises(ValueError):
        membership(p75, s66)


def test_membership_rejects_non_relation(s75):
    probe = AbsPoly.monomial(s75.basis.monomials[0])
    # a bare monomial of the right bidegree is not in the relation span
    assert probe.bidegree() == (7, 5)
    if membership(probe, s75):
        pytest.fail("monomial unexpectedly in the relation space")


def test_verify_zero_reports(s66, cache):
    data = ir.files("traceforge") / "data"
    p = parse_phi((data / "v66prime.phi").read_text())
    rep = verify_zero_abs(p, cache)
    assert rep.zero
    assert rep.residual_terms == 0
    assert rep.residual_sample == ()

    bad = p + AbsPoly.monomial(s66.basis.monomials[0])
    rep2 = verify_zero_abs(bad, cache)
    assert not rep2.zero
    assert rep2.residual_terms > 0
    assert 0 < len(rep2.residual_sample) <= 10
    assert rep2.digest


def test_verify_zero_trace_expr(cache):
    e = phi(AbsPoly.gen(1, 0) * AbsPoly.gen(1, 2) - AbsPoly.gen(1, 1) * AbsPoly.gen(1, 1))
    rep = verify_zero(e, cache)
    # this difference is not a relation, so it must leave a residual
    assert not rep.zero


def test_exact_and_modular_agree(cache):
    a = relation_space(Partition(7, 5), mode="exact", cache=cache, use_cache=False)
    b = relation_space(Partition(7, 5), mode="modular", cache=cache, use_cache=False)
    assert a.zeta == b.zeta


def test_relation_space_cache_round_trip(cache):
    first = relation_space(Partition(6, 6), cache=cache)
    again = relation_space(Partition(6, 6), cache=cache)
    assert again.from_cache
    assert again.zeta == first.zeta
    assert [v for v in again.relvectors] == [v for v in first.relvectors]


def test_new_relations_degree12(cache):
    rep = new_relations(12, cache=cache)
    by_lam = {tuple(item.lam): item for item in rep.items}
    assert by_lam[(7, 5)].old == 0 and by_lam[(7, 5)].new == 1
    assert by_lam[(6, 6)].old == 0 and by_lam[(6, 6)].new == 2


def test_certificates(s75, cache):
    cert = build_certificate(s75, 0)
    doc = cert.to_json()
    assert doc["lambda"] == [7, 5]
    assert doc["index"] == 0
    assert doc["leading"] in DEG12_LEADING
    keys = write_certificates(s75, cache.store)
    assert len(keys) == 1
    assert cache.store.get_json(keys[0]) == doc


def test_new_relations_rejects_unknown_degree(cache):
    with pytest.raises(ValueError):
        new_relations(11, cache=cache)
