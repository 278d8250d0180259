"""Generic-matrix evaluation: tracelessness, path agreement, caching."""

import itertools

from hypothesis import given, settings
from hypothesis import strategies as st

import pytest

from traceforge.cache import CacheStore
from traceforge.genmat import (
    VARSET18,
    EvalCache,
    build_x,
    build_y,
    eval_trace_expr,
    eval_word_trace,
    literal_word_trace,
    word_trace_packed,
)
from traceforge.packedpoly import XCAP
from traceforge.polyring import CommPoly
from traceforge.tracelang import parse_trace


def test_x_is_diagonal_and_traceless():
    x = build_x()
    tr = CommPoly.zero(VARSET18)
    for i in range(4):
        tr = tr + x[i][i]
        for j in range(4):
            if i != j:
                assert x[i][j].is_zero()
    assert tr.is_zero()


def test_y_is_traceless_and_generic_off_diagonal():
    y = build_y()
    tr = CommPoly.zero(VARSET18)
    for i in range(4):
        tr = tr + y[i][i]
    assert tr.is_zero()
    # every off-diagonal entry is a single variable
    for i in range(4):
        for j in range(4):
            if i != j:
                assert len(y[i][j]) == 1


def test_tr_xy_matches_hand_expansion():
    x = build_x()
    y = build_y()
    expected = CommPoly.zero(VARSET18)
    for i in range(4):
        expected = expected + x[i][i] * y[i][i]
    assert eval_word_trace("xy") == expected


words = st.text(alphabet="xy", min_size=2, max_size=7)


@settings(max_examples=40, deadline=None)
@given(words)
def test_literal_equals_canonical_path(w):
    assert literal_word_trace(w) == eval_word_trace(w, EvalCache())


def test_packed_and_generic_paths_agree():
    cache = EvalCache()
    for w in ("xy", "xxyy", "xyxyxy", "yyx"):
        assert word_trace_packed(w, cache).to_comm(VARSET18) == literal_word_trace(w)


def test_generic_fallback_beyond_packed_capacity():
    w = "x" * (XCAP + 1) + "yy"
    p = eval_word_trace(w, EvalCache())
    assert not p.is_zero()
    # bidegree is preserved per monomial: 16 in the x block, 2 in the y block
    for m in p.terms:
        assert sum(m[:3]) == XCAP + 1
        assert sum(m[3:]) == 2


def test_eval_trace_expr_linear_combination():
    cache = EvalCache()
    e = parse_trace("tr(xxy) - tr(yxx)")
    assert eval_trace_expr(e, cache).is_zero()
    e2 = parse_trace("2tr(xy)tr(xy)")
    t = eval_word_trace("xy", cache)
    assert eval_trace_expr(e2, cache) == (t * t).scale(2)


def test_cache_counts_and_disk_round_trip(tmp_path):
    store = CacheStore(tmp_path / "c")
    c1 = EvalCache(store=store)
    eval_word_trace("xyxy", c1)
    eval_word_trace("yxyx", c1)  # same cyclic class, no new eval
    assert c1.stats.word_evals == 1
    c2 = EvalCache(store=store)
    p = eval_word_trace("xyxy", c2)
    assert c2.stats.word_evals == 0
    assert c2.stats.disk_hits == 1
    assert p == eval_word_trace("xyxy", EvalCache())


def test_short_word_rejected():
    with pytest.raises(ValueError):
        eval_word_trace("x")
    with pytest.raises(ValueError):
        literal_word_trace("y")


def test_cyclic_invariance_exhaustive_short():
    # all words up to length 5, one rotation each
    for n in range(2, 6):
        for bits in itertools.product("xy", repeat=n):
            w = "".join(bits)
            r = w[1:] + w[0]
            assert literal_word_trace(w) == literal_word_trace(r)
