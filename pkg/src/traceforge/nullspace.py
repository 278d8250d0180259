"""Exact rational kernels of sparse and streamed integer matrices.

Two entry points share one contract: the returned vectors are an exact basis
of the right kernel, each normalized so its first nonzero coordinate (in
column order) is 1, ordered by their free column.  null_dense works on an
in-memory rational matrix; null_stream consumes rows in one or more passes
and supports an exact integer-echelon mode and a multi-prime modular mode.

The modular mode reduces per prime with vectorized arithmetic, requires at
least two primes to agree on the pivot column set, lifts the kernel by CRT
and rational reconstruction, and then re-verifies the candidate basis
exactly against a fresh pass over the rows.  More primes are drawn on any
failure; once the prime budget is exhausted a NullStreamError suggests the
exact mode.  Results are independent of block partitioning and thread count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt
from typing import Callable, Iterable, Iterator, Mapping, Sequence

import numpy as np

Rational = Fraction

# Primes just below 2**25: residue products times any in-scope column count
# stay far below 2**63, so int64 matmul is exact.
PRIMES: tuple[int, ...] = (
    33554393, 33554383, 33554371, 33554347, 33554341, 33554317, 33554291,
    33554273, 33554267, 33554249, 33554239, 33554221, 33554201, 33554167,
    33554159, 33554137, 33554123, 33554093, 33554083, 33554077, 33554051,
    33554021, 33554011, 33554009, 33553999, 33553991, 33553969, 33553967,
    33553909, 33553901, 33553879, 33553837, 33553799, 33553787, 33553771,
    33553769, 33553759, 33553747, 33553739, 33553727,
)

DEFAULT_PRIME_BUDGET = 20


class NullStreamError(RuntimeError):
    pass


@dataclass(frozen=True)
class QMatrix:
    """Sparse rational matrix: one dict per row mapping column to value."""

    rows: tuple[Mapping[int, Rational], ...]
    ncols: int

    def __post_init__(self) -> None:
        for r in self.rows:
            for c in r:
                if not (0 <= c < self.ncols):
                    raise ValueError(f"column {c} out of range")


@dataclass(frozen=True)
class NullBasis:
    ncols: int
    vectors: tuple[tuple[Rational, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.vectors)

    @property
    def rank(self) -> int:
        return self.ncols - len(self.vectors)


def _clear_row(row: Mapping[int, Rational]) -> dict[int, int]:
    den = 1
    for v in row.values():
        f = Fraction(v)
        den = den * f.denominator // gcd(den, f.denominator)
    out = {}
    for c, v in row.items():
        f = Fraction(v)
        n = f.numerator * (den // f.denominator)
        if n:
            out[c] = n
    return out


def _content(row: dict[int, int]) -> int:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return 1
    return g


class _IntEchelon:
    """Streaming fraction-free integer echelon keeping at most ncols rows.

    An incoming row is reduced against existing pivots in column order; if
    anything remains, its leftmost nonzero column becomes a new pivot.  The
    pivot column set this produces is intrinsic to the matrix (the
    lexicographically first independent column set), so it does not depend
    on row arrival order or batching.
    """

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.pivots: dict[int, dict[int, int]] = {}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def add_row(self, row, cleared: bool = False) -> None:
        if cleared:
            r = {c: v for c, v in dict(row).items() if v}
        else:
            r = _clear_row(row)
        while r:
            c = min(r)
            prow = self.pivots.get(c)
            if prow is None:
                g = _content(r)
                if r[c] < 0:
                    g = -g
                if g != 1:
                    r = {k: v // g for k, v in r.items()}
                self.pivots[c] = r
                return
            r = _combine_ff(r, prow, c)

    def rref(self) -> dict[int, dict[int, int]]:
        for c in sorted(self.pivots, reverse=True):
            row = self.pivots[c]
            later = sorted(c2 for c2 in row if c2 != c and c2 > c and c2 in self.pivots)
            for c2 in later:
                row = _combine_ff(row, self.pivots[c2], c2)
            if row.get(c, 0) < 0:
                row = {k: -v for k, v in row.items()}
            self.pivots[c] = row
        return self.pivots

    def kernel(self) -> NullBasis:
        rref = self.rref()
        pivot_cols = sorted(rref)
        vectors = []
        for f in range(self.ncols):
            if f in rref:
                continue
            v = [Fraction(0)] * self.ncols
            v[f] = Fraction(1)
            for c in pivot_cols:
                row = rref[c]
                e = row.get(f)
                if e:
                    v[c] = Fraction(-e, row[c])
            vectors.append(_normalize_first_one(v))
        return NullBasis(self.ncols, tuple(vectors))


def _combine_ff(r: dict[int, int], prow: dict[int, int], c: int) -> dict[int, int]:
    """Fraction-free combination eliminating column c of r against prow."""
    p, q = prow[c], r[c]
    g = gcd(p, q)
    mp, mq = p // g, q // g
    new = {k: v * mp for k, v in r.items()}
    for k, v in prow.items():
        s = new.get(k, 0) - v * mq
        if s:
            new[k] = s
        else:
            new.pop(k, None)
    g = _content(new)
    if g > 1:
        new = {k: v // g for k, v in new.items()}
    return new


def _normalize_first_one(v: Sequence[Fraction]) -> tuple[Fraction, ...]:
    lead = next((x for x in v if x), None)
    if lead is None or lead == 1:
        return tuple(v)
    return tuple(x / lead for x in v)


def null_dense(A: QMatrix) -> NullBasis:
    """Exact kernel of a QMatrix via fraction-free elimination."""
    ech = _IntEchelon(A.ncols)
    for row in A.rows:
        ech.add_row(row)
    return ech.kernel()


# ---------------------------------------------------------------------------
# Streamed kernels.

# A row source is either a sequence of row items or a zero-argument callable
# returning a fresh iterable of them (needed for multi-pass modes).  Row
# items may be dicts {col: value}, dense sequences, (index_array, values)
# pairs, 1-D integer arrays, or 2-D arrays whose rows are dense integer rows.
RowSource = Callable[[], Iterable] | Sequence


def _iter_source(rows: RowSource) -> Iterable:
    return rows() if callable(rows) else rows


def _iter_int_rows(rows: RowSource) -> Iterator[dict[int, int]]:
    for item in _iter_source(rows):
        if isinstance(item, np.ndarray):
            if item.ndim == 1:
                nz = np.flatnonzero(item)
                if len(nz):
                    yield {int(c): int(item[c]) for c in nz}
            else:
                for i in range(item.shape[0]):
                    row = item[i]
                    nz = np.flatnonzero(row)
                    if len(nz):
                        yield {int(c): int(row[c]) for c in nz}
        elif isinstance(item, Mapping):
            r = _clear_row(item)
            if r:
                yield r
        elif (
            isinstance(item, tuple)
            and len(item) == 2
            and isinstance(item[0], np.ndarray)
        ):
            idx, vals = item
            r = _clear_row({int(c): v for c, v in zip(idx, vals)})
            if r:
                yield r
        else:
            r = _clear_row({c: v for c, v in enumerate(item) if v})
            if r:
                yield r


def _iter_mod_blocks(
    rows: RowSource, ncols: int, p: int, block_rows: int
) -> Iterator[np.ndarray]:
    buf: list[dict[int, int]] = []

    def flush():
        B = np.zeros((len(buf), ncols), dtype=np.int64)
        for i, r in enumerate(buf):
            for c, v in r.items():
                B[i, c] = v % p
        return B

    for item in _iter_source(rows):
        if isinstance(item, np.ndarray) and item.ndim == 2:
            if buf:
                yield flush()
                buf = []
            if item.dtype == object:
                yield np.mod(item, p).astype(np.int64)
            else:
                yield np.mod(item.astype(np.int64, copy=False), p)
            continue
        if isinstance(item, np.ndarray) and item.ndim == 1:
            r = {int(c): int(item[c]) for c in np.flatnonzero(item)}
        elif isinstance(item, Mapping):
            r = _clear_row(item)
        elif (
            isinstance(item, tuple)
            and len(item) == 2
            and isinstance(item[0], np.ndarray)
        ):
            r = _clear_row({int(c): v for c, v in zip(item[0], item[1])})
        else:
            r = _clear_row({c: v for c, v in enumerate(item) if v})
        buf.append(r)
        if len(buf) >= block_rows:
            yield flush()
            buf = []
    if buf:
        yield flush()


def _modular_rref(
    rows: RowSource, ncols: int, p: int, block_rows: int
) -> tuple[tuple[int, ...], np.ndarray]:
    """RREF mod p of the streamed matrix: (pivot columns, reduced rows)."""
    R = np.zeros((0, ncols), dtype=np.int64)
    pivcols: list[int] = []
    for B in _iter_mod_blocks(rows, ncols, p, block_rows):
        if R.shape[0]:
            B = (B - (B[:, pivcols] @ R) % p) % p
        mask = np.any(B, axis=1)
        if not mask.any():
            continue
        for row in B[mask]:
            r = row
            if R.shape[0]:
                r = (r - (r[pivcols] @ R) % p) % p
            nz = np.flatnonzero(r)
            if not len(nz):
                continue
            c = int(nz[0])
            r = (r * pow(int(r[c]), p - 2, p)) % p
            if R.shape[0]:
                colvals = R[:, c].copy()
                if colvals.any():
                    R = (R - np.outer(colvals, r)) % p
            R = np.vstack([R, r[None, :]])
            pivcols.append(c)
    order = np.argsort(pivcols, kind="stable")
    return tuple(pivcols[i] for i in order), R[order]


def _mod_kernel_columns(
    pivcols: tuple[int, ...], R: np.ndarray, ncols: int
) -> tuple[list[int], np.ndarray]:
    """Kernel mod p in free-column canonical form.

    Returns (free columns ascending, matrix K with K[i] the kernel vector
    for free column i: 1 at the free column, -R[:, f] at the pivot columns).
    """
    pivset = set(pivcols)
    free = [c for c in range(ncols) if c not in pivset]
    K = np.zeros((len(free), ncols), dtype=np.int64)
    for i, f in enumerate(free):
        K[i, f] = 1
        if len(pivcols):
            K[i, list(pivcols)] = -R[:, f]
    return free, K


def crt_pair(r1: int, m1: int, r2: int, m2: int) -> tuple[int, int]:
    """Combine residues: value mod m1*m2 agreeing with both inputs."""
    t = ((r2 - r1) * pow(m1, -1, m2)) % m2
    return (r1 + m1 * t) % (m1 * m2), m1 * m2


def rational_reconstruct(a: int, m: int) -> Fraction | None:
    """Rational number n/d with n*d^-1 = a mod m, |n|, d <= sqrt(m/2).

    Returns None when no such fraction exists.
    """
    a %= m
    bound = isqrt(m // 2)
    r0, r1 = m, a
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    n, d = r1, s1
    if d == 0:
        return None
    if d < 0:
        n, d = -n, -d
    if d > bound or gcd(n, d) != 1:
        return None
    if (n - a * d) % m != 0:
        return None
    return Fraction(n, d)


def _reconstruct_vectors(
    per_prime: dict[int, tuple[list[int], np.ndarray]], ncols: int
) -> list[tuple[Fraction, ...]] | None:
    """CRT + rational reconstruction of kernel vectors across primes."""
    primes = sorted(per_prime)
    frees = [tuple(per_prime[p][0]) for p in primes]
    if len(set(frees)) != 1:
        return None
    free = frees[0]
    vectors: list[tuple[Fraction, ...]] = []
    M = 1
    for p in primes:
        M *= p
    for i in range(len(free)):
        coords: list[Fraction] = []
        for c in range(ncols):
            res, mod = 0, 1
            for p in primes:
                K = per_prime[p][1]
                res, mod = crt_pair(res, mod, int(K[i, c]) % p, p)
            f = rational_reconstruct(res, M)
            if f is None:
                return None
            coords.append(f)
        vectors.append(tuple(coords))
    return vectors


def _verify_exact(rows: RowSource, vectors: list[tuple[Fraction, ...]]) -> bool:
    """Exact check that every row is orthogonal to every candidate vector."""
    if not vectors:
        return True
    ncols = len(vectors[0])
    ints: list[np.ndarray] = []
    maxv = 0
    for v in vectors:
        den = 1
        for x in v:
            den = den * x.denominator // gcd(den, x.denominator)
        iv = [int(x * den) for x in v]
        maxv = max(maxv, max(abs(n) for n in iv) if iv else 0)
        ints.append(np.array(iv, dtype=object))
    V = np.stack(ints, axis=1)  # ncols x k, object
    V_small = None
    if maxv < 1 << 62:
        V_small = V.astype(np.int64)
    for item in _iter_source(rows):
        if isinstance(item, np.ndarray) and item.ndim == 2:
            B = item
            if (
                V_small is not None
                and B.dtype != object
                and B.size
                and int(np.abs(B).max()) * maxv * ncols < 1 << 62
            ):
                if np.any(B @ V_small):
                    return False
            else:
                if np.any(B.astype(object) @ V):
                    return False
        else:
            if isinstance(item, np.ndarray):
                r = {int(c): int(item[c]) for c in np.flatnonzero(item)}
            elif isinstance(item, Mapping):
                r = _clear_row(item)
            elif (
                isinstance(item, tuple)
                and len(item) == 2
                and isinstance(item[0], np.ndarray)
            ):
                r = _clear_row({int(c): v for c, v in zip(item[0], item[1])})
            else:
                r = _clear_row({c: v for c, v in enumerate(item) if v})
            for k in range(V.shape[1]):
                if sum(v * int(V[c, k]) for c, v in r.items()) != 0:
                    return False
    return True


def null_stream(
    rows: RowSource,
    ncols: int,
    mode: str = "exact",
    prime_budget: int | None = None,
    block_rows: int = 2048,
    threads: int = 1,
) -> NullBasis:
    """Kernel of a streamed matrix.  See the module docstring for contract.

    mode "exact": one streaming pass of fraction-free integer elimination.
    mode "modular": per-prime vectorized elimination, CRT lift, rational
    reconstruction, and a mandatory exact verification pass.
    """
    if ncols < 0:
        raise ValueError("negative column count")
    if mode == "exact":
        ech = _IntEchelon(ncols)
        for r in _iter_int_rows(rows):
            ech.add_row(r, cleared=True)
        return ech.kernel()
    if mode != "modular":
        raise ValueError(f"unknown mode {mode!r}")

    budget = DEFAULT_PRIME_BUDGET if prime_budget is None else prime_budget
    if budget < 2:
        raise ValueError("modular mode needs a budget of at least 2 primes")

    per_prime: dict[int, tuple[tuple[int, ...], np.ndarray]] = {}
    used = 0

    def run_prime(p: int):
        return _modular_rref(rows, ncols, p, block_rows)

    want = 2
    while True:
        batch = []
        while used < len(PRIMES) and used < budget and len(per_prime) + len(batch) < want:
            batch.append(PRIMES[used])
            used += 1
        if batch:
            if threads > 1:
                with ThreadPoolExecutor(max_workers=threads) as ex:
                    for p, res in zip(batch, ex.map(run_prime, batch)):
                        per_prime[p] = res
            else:
                for p in batch:
                    per_prime[p] = run_prime(p)
        if len(per_prime) < 2:
            raise NullStreamError(
                "modular kernel failed: prime budget exhausted; rerun with mode='exact'"
            )
        # keep the primes agreeing on the best pivot set: largest rank first
        # (modular rank never exceeds the true rank), then largest group
        best: dict[tuple[int, ...], list[int]] = {}
        for p, (piv, _) in per_prime.items():
            best.setdefault(piv, []).append(p)
        piv_best = max(best, key=lambda piv: (len(piv), len(best[piv]), best[piv]))
        good = sorted(best[piv_best])
        if len(good) >= 2:
            kernels = {
                p: _mod_kernel_columns(per_prime[p][0], per_prime[p][1], ncols)
                for p in good
            }
            vectors = _reconstruct_vectors(kernels, ncols)
            if vectors is not None and _verify_exact(rows, vectors):
                return NullBasis(
                    ncols, tuple(_normalize_first_one(v) for v in vectors)
                )
        if used >= budget or used >= len(PRIMES):
            raise NullStreamError(
                "modular kernel failed after "
                f"{used} primes (reconstruction or verification); "
                "rerun with mode='exact'"
            )
        want = len(per_prime) + 2
