"""Disk store: round trips, checksum guard, stat counters."""

from fractions import Fraction

from traceforge.cache import CacheStore, digest_text
from traceforge.polyring import CommPoly, VarSet

VS = VarSet(("a", "b"))


def sample_poly():
    a = CommPoly.variable(VS, "a")
    b = CommPoly.variable(VS, "b")
    return (a * a - b.scale(Fraction(7, 3))) * a + CommPoly.constant(VS, 2)


def test_poly_round_trip(tmp_path):
    store = CacheStore(tmp_path / "s")
    p = sample_poly()
    assert store.get_poly("k", VS) is None
    store.put_poly("k", p)
    assert store.get_poly("k", VS) == p
    assert store.stats.writes == 1
    assert store.stats.hits == 1
    assert store.stats.misses == 1


def test_json_round_trip(tmp_path):
    store = CacheStore(tmp_path / "s")
    doc = {"r": 2, "zeta": [["1/1", "0/1"]], "names": ["u7_0^2"]}
    store.put_json("summary", doc)
    assert store.get_json("summary") == doc


def test_distinct_keys_do_not_collide(tmp_path):
    store = CacheStore(tmp_path / "s")
    store.put_json("x", 1)
    store.put_json("y", 2)
    assert store.get_json("x") == 1
    assert store.get_json("y") == 2


def test_corrupted_payload_is_a_miss(tmp_path):
    store = CacheStore(tmp_path / "s")
    store.put_json("k", {"v": 1})
    path = store._path("k", ".json")
    path.write_bytes(b'{"v": 999}')
    assert store.get_json("k") is None
    assert store.stats.corrupt == 1


def test_missing_checksum_is_a_miss(tmp_path):
    store = CacheStore(tmp_path / "s")
    store.put_json("k", {"v": 1})
    side = store._path("k", ".json").with_suffix(".json.sha256")
    side.unlink()
    assert store.get_json("k") is None


def test_unparseable_poly_counts_corrupt(tmp_path):
    store = CacheStore(tmp_path / "s")
    p = sample_poly()
    store.put_poly("k", p)
    path = store._path("k", ".poly")
    garbage = b"not a polynomial"
    path.write_bytes(garbage)
    side = path.with_suffix(".poly.sha256")
    import hashlib

    side.write_text(hashlib.sha256(garbage).hexdigest())
    assert store.get_poly("k", VS) is None
    assert store.stats.corrupt == 1


def test_digest_text_stable():
    assert digest_text("abc") == digest_text("abc")
    assert digest_text("abc") != digest_text("abd")
