"""Exact and modular kernels of streamed rational matrices."""

from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

import pytest

from traceforge.nullspace import (
    PRIMES,
    NullStreamError,
    QMatrix,
    crt_pair,
    null_dense,
    null_stream,
    rational_reconstruct,
)


def naive_rank(rows, ncols):
    """Plain fraction Gaussian elimination, written independently of the
    library so the two implementations can check each other."""
    mat = [[Fraction(r.get(c, 0)) for c in range(ncols)] for r in rows]
    rank = 0
    col = 0
    while col < ncols and rank < len(mat):
        piv = next((i for i in range(rank, len(mat)) if mat[i][col]), None)
        if piv is None:
            col += 1
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        inv = 1 / mat[rank][col]
        mat[rank] = [v * inv for v in mat[rank]]
        for i in range(len(mat)):
            if i != rank and mat[i][col]:
                f = mat[i][col]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[rank])]
        rank += 1
        col += 1
    return rank


def annihilates(rows, v):
    for r in rows:
        s = sum(Fraction(val) * v[c] for c, val in r.items())
        if s != 0:
            return False
    return True


frac = st.fractions(
    min_value=-6, max_value=6, max_denominator=4
)


@st.composite
def sparse_matrices(draw):
    ncols = draw(st.integers(min_value=1, max_value=6))
    nrows = draw(st.integers(min_value=0, max_value=7))
    rows = []
    for _ in range(nrows):
        row = {}
        for c in range(ncols):
            if draw(st.booleans()):
                v = draw(frac)
                if v:
                    row[c] = v
        rows.append(row)
    return rows, ncols


@settings(max_examples=60, deadline=None)
@given(sparse_matrices())
def test_null_dense_against_naive_elimination(mat):
    rows, ncols = mat
    basis = null_dense(QMatrix(tuple(rows), ncols))
    assert basis.rank == naive_rank(rows, ncols)
    assert basis.dim == ncols - basis.rank
    for v in basis.vectors:
        assert annihilates(rows, v)
        lead = next(x for x in v if x)
        assert lead == 1
    # normalized kernel vectors with equal span would collide; require distinct
    assert len(set(basis.vectors)) == basis.dim


@settings(max_examples=30, deadline=None)
@given(sparse_matrices())
def test_modular_matches_exact(mat):
    rows, ncols = mat
    exact = null_stream(lambda: iter(rows), ncols, mode="exact")
    modular = null_stream(lambda: iter(rows), ncols, mode="modular")
    assert set(exact.vectors) == set(modular.vectors)
    assert exact.rank == modular.rank


def test_row_source_accepts_list_and_factory():
    rows = [{0: Fraction(1), 1: Fraction(-1)}]
    a = null_stream(rows, 2, mode="exact")
    b = null_stream(lambda: iter(rows), 2, mode="exact")
    assert a.vectors == b.vectors == ((Fraction(1), Fraction(1)),)


def test_adversarial_prime_divisible_rows():
    # the first two primes see a zero row and report too large a kernel;
    # pivot-set voting must discard them in favor of later primes
    bad = PRIMES[0] * PRIMES[1]
    rows = [{0: Fraction(bad), 1: Fraction(bad)}]
    basis = null_stream(lambda: iter(rows), 2, mode="modular", prime_budget=6)
    assert basis.dim == 1
    assert basis.vectors[0] == (Fraction(1), Fraction(-1))


def test_modular_budget_too_small_rejected():
    with pytest.raises(ValueError):
        null_stream([], 1, mode="modular", prime_budget=1)


def test_modular_exhaustion_raises():
    bad = PRIMES[0] * PRIMES[1]
    rows = [{0: Fraction(bad), 1: Fraction(bad)}]
    with pytest.raises(NullStreamError):
        null_stream(lambda: iter(rows), 2, mode="modular", prime_budget=2)


def test_unknown_mode_rejected():
    with pytest.raises(ValueError):
        null_stream([], 1, mode="float")


def test_crt_pair():
    r, m = crt_pair(2, 3, 3, 5)
    assert m == 15
    assert r % 3 == 2 and r % 5 == 3


def test_rational_reconstruct_round_trip():
    m = 1
    for p in PRIMES[:4]:
        m *= p
    for f in (Fraction(3, 7), Fraction(-22, 41), Fraction(5), Fraction(0)):
        a = (f.numerator * pow(f.denominator, -1, m)) % m
        assert rational_reconstruct(a, m) == f


def test_rational_reconstruct_out_of_range():
    # residue of 1/3 mod 7 cannot be told apart from small integers
    assert rational_reconstruct(5, 7) in (Fraction(5), Fraction(-2), Fraction(1, 3), None)
    # a huge numerator over a tiny modulus must fail or round-trip exactly
    got = rational_reconstruct(6, 7)
    if got is not None:
        assert (got.numerator - 6 * got.denominator) % 7 == 0


def test_threaded_modular_matches_serial():
    rows = [
        {0: Fraction(2), 1: Fraction(4), 2: Fraction(-2)},
        {1: Fraction(1, 3), 2: Fraction(1)},
    ]
    serial = null_stream(lambda: iter(rows), 3, mode="modular", threads=1)
    threaded = null_stream(lambda: iter(rows), 3, mode="modular", threads=3)
    assert serial.vectors == threaded.vectors
