"""Evaluation of trace expressions on generic traceless 4x4 matrices.

x is generic diagonal traceless (entries x11, x22, x33, -(x11+x22+x33)); y is
fully generic traceless with the (4,4) entry eliminated.  This gives 3 + 15
independent variables in a fixed order.  Trace expressions evaluate to exact
polynomials in these 18 variables; two trace expressions agree identically on
the matrix pair iff their evaluations are equal, which is the semantic
equality oracle used everywhere else.

Evaluations are cached per cyclic-canonical word, optionally write-through to
a disk store, and counted, so reruns can be checked to perform no fresh
matrix work.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction

from .cache import CacheStore
from .packedpoly import NVARS, PackedCapacityError, PackedPoly, XCAP, YCAP
from .polyring import CommPoly, VarSet, poly_mul
from .tracelang import TraceExpr, TraceMonomial, Word, cyclic_normalize

VARSET18 = VarSet(
    (
        "x11",
        "x22",
        "x33",
        "y11",
        "y12",
        "y13",
        "y14",
        "y21",
        "y22",
        "y23",
        "y24",
        "y31",
        "y32",
        "y33",
        "y34",
        "y41",
        "y42",
        "y43",
    )
)

assert len(VARSET18) == NVARS

GenericMatrix = tuple[tuple[CommPoly, ...], ...]


def _var(name: str) -> CommPoly:
    return CommPoly.variable(VARSET18, name)


def build_x() -> GenericMatrix:
    """diag(x11, x22, x33, -(x11 + x22 + x33))."""
    z = CommPoly.zero(VARSET18)
    d4 = (_var("x11") + _var("x22") + _var("x33")).scale(Fraction(-1))
    rows = []
    for i, d in enumerate((_var("x11"), _var("x22"), _var("x33"), d4)):
        rows.append(tuple(d if i == j else z for j in range(4)))
    return tuple(rows)


def build_y() -> GenericMatrix:
    """Fully generic traceless: entry (4,4) is -(y11 + y22 + y33), all other
    entries are independent variables (entry (1,4) is y14)."""
    names = [
        ["y11", "y12", "y13", "y14"],
        ["y21", "y22", "y23", "y24"],
        ["y31", "y32", "y33", "y34"],
        ["y41", "y42", "y43", None],
    ]
    d4 = (_var("y11") + _var("y22") + _var("y33")).scale(Fraction(-1))
    return tuple(
        tuple(_var(n) if n is not None else d4 for n in row) for row in names
    )


# -- packed copies of the generic matrices, built once ----------------------

_PACKED_MATS: dict[str, list[list[PackedPoly]]] = {}
_PACKED_LOCK = threading.Lock()


def _packed_matrix(letter: str) -> list[list[PackedPoly]]:
    with _PACKED_LOCK:
        if letter not in _PACKED_MATS:
            mat = build_x() if letter == "x" else build_y()
            _PACKED_MATS[letter] = [
                [PackedPoly.from_comm(entry) for entry in row] for row in mat
            ]
    return _PACKED_MATS[letter]


def _packed_matmul(a, b):
    out = []
    for i in range(4):
        row = []
        for j in range(4):
            acc = PackedPoly.zero()
            for k in range(4):
                acc = acc.add(a[i][k].mul(b[k][j]))
            row.append(acc)
        out.append(row)
    return out


def _comm_matmul(a: GenericMatrix, b: GenericMatrix) -> GenericMatrix:
    out = []
    for i in range(4):
        row = []
        for j in range(4):
            acc = CommPoly.zero(VARSET18)
            for k in range(4):
                acc = acc + poly_mul(a[i][k], b[k][j])
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


@dataclass
class EvalStats:
    word_evals: int = 0
    mono_products: int = 0
    disk_hits: int = 0


class EvalCache:
    """Per-word and per-monomial evaluation cache.

    Thread-safe with last-writer-wins semantics; an optional CacheStore gives
    persistence for word evaluations.
    """

    def __init__(self, store: CacheStore | None = None):
        self.store = store
        self.stats = EvalStats()
        self._words: dict[Word, PackedPoly] = {}
        self._words_comm: dict[Word, CommPoly] = {}
        self._monos: dict[TraceMonomial, PackedPoly] = {}
        self._lock = threading.Lock()


_DEFAULT_CACHE = EvalCache()


def default_cache() -> EvalCache:
    return _DEFAULT_CACHE


def set_default_store(store: CacheStore | None) -> None:
    _DEFAULT_CACHE.store = store


def _word_fits_packed(w: Word) -> bool:
    return w.count("x") <= XCAP and w.count("y") <= YCAP


def _compute_word_packed(w: Word) -> PackedPoly:
    mat = _packed_matrix(w[0])
    for ch in w[1:]:
        mat = _packed_matmul(mat, _packed_matrix(ch))
    acc = PackedPoly.zero()
    for i in range(4):
        acc = acc.add(mat[i][i])
    return acc


def _compute_word_comm(w: Word) -> CommPoly:
    mats = {"x": build_x(), "y": build_y()}
    mat = mats[w[0]]
    for ch in w[1:]:
        mat = _comm_matmul(mat, mats[ch])
    acc = CommPoly.zero(VARSET18)
    for i in range(4):
        acc = acc + mat[i][i]
    return acc


def word_trace_packed(w: Word, cache: EvalCache | None = None) -> PackedPoly:
    """Packed evaluation of tr(w), keyed on the cyclic-canonical rotation."""
    cache = cache or _DEFAULT_CACHE
    if len(w) < 2:
        raise ValueError("words of length < 2 have no cached trace")
    if not _word_fits_packed(w):
        raise PackedCapacityError(f"word degree exceeds packed capacity: {w!r}")
    key = cyclic_normalize(w)
    hit = cache._words.get(key)
    if hit is not None:
        return hit
    poly: PackedPoly | None = None
    if cache.store is not None:
        stored = cache.store.get_poly(f"wordtrace:{key}", VARSET18)
        if stored is not None:
            poly = PackedPoly.from_comm(stored)
            with cache._lock:
                cache.stats.disk_hits += 1
    if poly is None:
        poly = _compute_word_packed(key)
        with cache._lock:
            cache.stats.word_evals += 1
        if cache.store is not None:
            cache.store.put_poly(f"wordtrace:{key}", poly.to_comm(VARSET18))
    with cache._lock:
        cache._words[key] = poly
    return poly


def eval_word_trace(w: Word, cache: EvalCache | None = None) -> CommPoly:
    """Evaluate tr(w) as an 18-variable polynomial.  len(w) >= 2 required."""
    cache = cache or _DEFAULT_CACHE
    if len(w) < 2:
        raise ValueError("trace of a word of length < 2 is not evaluated here")
    if _word_fits_packed(w):
        return word_trace_packed(w, cache).to_comm(VARSET18)
    key = cyclic_normalize(w)
    hit = cache._words_comm.get(key)
    if hit is not None:
        return hit
    poly = _compute_word_comm(key)
    with cache._lock:
        cache.stats.word_evals += 1
        cache._words_comm[key] = poly
    return poly


def trace_monomial_packed(mono: TraceMonomial, cache: EvalCache | None = None) -> PackedPoly:
    """Packed evaluation of a product of word traces, with prefix sharing."""
    cache = cache or _DEFAULT_CACHE
    if not mono:
        return PackedPoly.from_terms([((0,) * NVARS, Fraction(1))])
    hit = cache._monos.get(mono)
    if hit is not None:
        return hit
    if len(mono) == 1:
        poly = word_trace_packed(mono[0], cache)
    else:
        prefix = trace_monomial_packed(mono[:-1], cache)
        last = word_trace_packed(mono[-1], cache)
        poly = prefix.mul(last)
        with cache._lock:
            cache.stats.mono_products += 1
    with cache._lock:
        cache._monos[mono] = poly
    return poly


def _mono_fits_packed(mono: TraceMonomial) -> bool:
    p = sum(w.count("x") for w in mono)
    q = sum(w.count("y") for w in mono)
    return p <= XCAP and q <= YCAP


def _trace_monomial_comm(mono: TraceMonomial, cache: EvalCache | None) -> CommPoly:
    acc = CommPoly.constant(VARSET18, Fraction(1))
    for w in mono:
        acc = poly_mul(acc, eval_word_trace(w, cache))
    return acc


def eval_trace_expr(e: TraceExpr, cache: EvalCache | None = None) -> CommPoly:
    """Evaluate a trace expression on the generic matrix pair."""
    cache = cache or _DEFAULT_CACHE
    packed_acc = PackedPoly.zero()
    comm_acc = CommPoly.zero(VARSET18)
    for mono, c in e.terms.items():
        if _mono_fits_packed(mono):
            packed_acc = packed_acc.add(trace_monomial_packed(mono, cache).scale(c))
        else:
            comm_acc = comm_acc + _trace_monomial_comm(mono, cache).scale(c)
    out = packed_acc.to_comm(VARSET18)
    if comm_acc:
        out = out + comm_acc
    return out


def eval_trace_expr_packed(e: TraceExpr, cache: EvalCache | None = None) -> PackedPoly:
    """Packed evaluation; raises PackedCapacityError beyond field capacity."""
    cache = cache or _DEFAULT_CACHE
    acc = PackedPoly.zero()
    for mono, c in e.terms.items():
        if not _mono_fits_packed(mono):
            raise PackedCapacityError("monomial degree exceeds packed capacity")
        acc = acc.add(trace_monomial_packed(mono, cache).scale(c))
    return acc


def literal_word_trace(w: Word) -> CommPoly:
    """Trace of the literal product, no cyclic canonicalization and no cache.

    Exists so that cyclic invariance can be tested against an independent
    computation path.
    """
    if len(w) < 2:
        raise ValueError("words of length < 2 are not evaluated")
    if _word_fits_packed(w):
        return _compute_word_packed(w).to_comm(VARSET18)
    return _compute_word_comm(w)
