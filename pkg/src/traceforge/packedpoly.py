"""Fast exact arithmetic for the 18-variable evaluation polynomials.

Monomials are packed into a single int64 key: three 4-bit fields for the x
variables followed by fifteen 3-bit fields for the y variables (57 bits in
total), so multiplying monomials is integer addition of keys.  Coefficients
are int64 with a tracked magnitude bound; once a bound could reach 2**62 the
coefficient array switches to Python integers (object dtype), so results are
exact in all cases.  Each polynomial carries a single positive denominator.

Field capacity limits exponents to 15 per x variable and 7 per y variable.
Degrees are tracked per polynomial and operations that could overflow a field
raise PackedCapacityError; callers fall back to generic CommPoly arithmetic.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

import numpy as np

from .polyring import CommPoly, VarSet

NX = 3
NY = 15
NVARS = NX + NY

_XBITS = 4
_YBITS = 3
# x fields occupy the high bits, y fields the low 45 bits
SHIFTS = tuple(45 + _XBITS * (NX - 1 - i) for i in range(NX)) + tuple(
    _YBITS * (NY - 1 - i) for i in range(NY)
)
_XMASK = (1 << _XBITS) - 1
_YMASK = (1 << _YBITS) - 1
MASKS = (_XMASK,) * NX + (_YMASK,) * NY

XCAP = _XMASK
YCAP = _YMASK

_COEFF_LIMIT = 1 << 62


class PackedCapacityError(OverflowError):
    """An exponent field would overflow; use the generic representation."""


def pack_exponents(exps: Sequence[int]) -> int:
    if len(exps) != NVARS:
        raise ValueError(f"expected {NVARS} exponents")
    key = 0
    for e, s, m in zip(exps, SHIFTS, MASKS):
        if e < 0 or e > m:
            raise PackedCapacityError(f"exponent {e} exceeds field capacity {m}")
        key |= e << s
    return key


def unpack_keys(keys: np.ndarray) -> np.ndarray:
    """Exponent matrix (n x NVARS) for an int64 key array."""
    out = np.empty((len(keys), NVARS), dtype=np.int64)
    for i, (s, m) in enumerate(zip(SHIFTS, MASKS)):
        out[:, i] = (keys >> s) & m
    return out


def _as_coeffs(values, big: bool) -> np.ndarray:
    if big:
        return np.array(values, dtype=object)
    return np.asarray(values, dtype=np.int64)


def _max_abs(coeffs: np.ndarray) -> int:
    if len(coeffs) == 0:
        return 0
    return int(np.max(np.abs(coeffs)))


def _content(coeffs: np.ndarray) -> int:
    g = 0
    for c in coeffs:
        g = gcd(g, int(c))
        if g == 1:
            return 1
    return g


class PackedPoly:
    """Exact polynomial with packed monomial keys.

    Invariants: keys sorted ascending, no zero coefficients, den > 0,
    gcd(content, den) = 1, bound >= max |coefficient|.
    """

    __slots__ = ("keys", "coeffs", "den", "bound", "xdeg", "ydeg")

    def __init__(self, keys: np.ndarray, coeffs: np.ndarray, den: int, xdeg: int, ydeg: int):
        self.keys = keys
        self.coeffs = coeffs
        self.den = den
        self.bound = _max_abs(coeffs)
        self.xdeg = xdeg
        self.ydeg = ydeg

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls) -> "PackedPoly":
        return cls(np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64), 1, 0, 0)

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[Sequence[int], Fraction]]) -> "PackedPoly":
        keys, nums, dens = [], [], []
        xdeg = ydeg = 0
        for exps, c in terms:
            c = Fraction(c)
            if not c:
                continue
            keys.append(pack_exponents(exps))
            nums.append(c.numerator)
            dens.append(c.denominator)
            xdeg = max(xdeg, sum(exps[:NX]))
            ydeg = max(ydeg, sum(exps[NX:]))
        if not keys:
            return cls.zero()
        den = 1
        for d in dens:
            den = den * d // gcd(den, d)
        scaled = [n * (den // d) for n, d in zip(nums, dens)]
        big = any(abs(v) >= _COEFF_LIMIT for v in scaled)
        p = cls(np.array(keys, dtype=np.int64), _as_coeffs(scaled, big), den, xdeg, ydeg)
        return _combine(p.keys, p.coeffs, p.den, p.xdeg, p.ydeg)

    @classmethod
    def from_comm(cls, poly: CommPoly) -> "PackedPoly":
        return cls.from_terms(poly.terms.items())

    def to_comm(self, varset: VarSet) -> CommPoly:
        if len(varset) != NVARS:
            raise ValueError("VarSet arity mismatch")
        exps = unpack_keys(self.keys)
        terms = {
            tuple(int(e) for e in exps[i]): Fraction(int(self.coeffs[i]), self.den)
            for i in range(len(self.keys))
        }
        return CommPoly(varset, terms)

    # -- queries ------------------------------------------------------------

    def is_zero(self) -> bool:
        return len(self.keys) == 0

    @property
    def nnz(self) -> int:
        return len(self.keys)

    def is_big(self) -> bool:
        return self.coeffs.dtype == object

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PackedPoly):
            return NotImplemented
        return (
            self.den == other.den
            and len(self.keys) == len(other.keys)
            and bool(np.array_equal(self.keys, other.keys))
            and bool(np.array_equal(self.coeffs, other.coeffs))
        )

    def __repr__(self) -> str:
        return f"PackedPoly(nnz={self.nnz}, den={self.den}, deg=({self.xdeg},{self.ydeg}))"

    # -- arithmetic ---------------------------------------------------------

    def neg(self) -> "PackedPoly":
        return PackedPoly(self.keys, -self.coeffs, self.den, self.xdeg, self.ydeg)

    def scale(self, q: Fraction) -> "PackedPoly":
        q = Fraction(q)
        if not q:
            return PackedPoly.zero()
        bound = self.bound * abs(q.numerator)
        coeffs = self.coeffs
        if bound >= _COEFF_LIMIT and not self.is_big():
            coeffs = coeffs.astype(object)
        return _normalize(
            self.keys, coeffs * q.numerator, self.den * q.denominator, self.xdeg, self.ydeg
        )

    def add(self, other: "PackedPoly") -> "PackedPoly":
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        den = self.den * other.den // gcd(self.den, other.den)
        ma, mb = den // self.den, den // other.den
        bound = self.bound * ma + other.bound * mb
        big = bound >= _COEFF_LIMIT or self.is_big() or other.is_big()
        ca = self.coeffs.astype(object) if big and not self.is_big() else self.coeffs
        cb = other.coeffs.astype(object) if big and not other.is_big() else other.coeffs
        keys = np.concatenate([self.keys, other.keys])
        coeffs = np.concatenate([ca * ma, cb * mb])
        return _combine(
            keys, coeffs, den, max(self.xdeg, other.xdeg), max(self.ydeg, other.ydeg)
        )

    def mul(self, other: "PackedPoly") -> "PackedPoly":
        if self.is_zero() or other.is_zero():
            return PackedPoly.zero()
        xdeg = self.xdeg + other.xdeg
        ydeg = self.ydeg + other.ydeg
        if xdeg > XCAP or ydeg > YCAP:
            raise PackedCapacityError(
                f"product degree ({xdeg},{ydeg}) exceeds packed capacity ({XCAP},{YCAP})"
            )
        a, b = (self, other) if self.nnz >= other.nnz else (other, self)
        bound = a.bound * b.bound * min(a.nnz, b.nnz)
        big = bound >= _COEFF_LIMIT or a.is_big() or b.is_big()
        ca = a.coeffs.astype(object) if big and not a.is_big() else a.coeffs
        cb = b.coeffs.astype(object) if big and not b.is_big() else b.coeffs
        # chunk the larger factor to cap the size of the outer products
        chunk = max(1, 4_000_000 // max(1, b.nnz))
        pieces_k, pieces_c = [], []
        for start in range(0, a.nnz, chunk):
            ka = a.keys[start : start + chunk]
            pieces_k.append((ka[:, None] + b.keys[None, :]).ravel())
            pieces_c.append((ca[start : start + chunk, None] * cb[None, :]).ravel())
        keys = np.concatenate(pieces_k)
        coeffs = np.concatenate(pieces_c)
        return _combine(keys, coeffs, a.den * b.den, xdeg, ydeg)


def _combine(keys: np.ndarray, coeffs: np.ndarray, den: int, xdeg: int, ydeg: int) -> PackedPoly:
    """Sort by key, sum duplicates, drop zeros, strip content."""
    if len(keys) == 0:
        return PackedPoly.zero()
    order = np.argsort(keys, kind="stable")
    keys = keys[order]
    coeffs = coeffs[order]
    starts = np.empty(len(keys), dtype=bool)
    starts[0] = True
    np.not_equal(keys[1:], keys[:-1], out=starts[1:])
    idx = np.flatnonzero(starts)
    summed = np.add.reduceat(coeffs, idx)
    keys = keys[idx]
    nz = summed != 0
    if not nz.all():
        keys = keys[nz]
        summed = summed[nz]
    return _normalize(keys, summed, den, xdeg, ydeg)


def _normalize(keys: np.ndarray, coeffs: np.ndarray, den: int, xdeg: int, ydeg: int) -> PackedPoly:
    if len(keys) == 0:
        return PackedPoly.zero()
    g = gcd(_content(coeffs), den)
    if g > 1:
        den //= g
        if coeffs.dtype == object:
            coeffs = coeffs // g
        else:
            coeffs = coeffs // np.int64(g)
    if coeffs.dtype == object and _max_abs(coeffs) < _COEFF_LIMIT:
        coeffs = coeffs.astype(np.int64)
    return PackedPoly(keys, coeffs, den, xdeg, ydeg)


def linear_combination(polys: Sequence[PackedPoly], ints: Sequence[int]) -> PackedPoly:
    """Sum of ints[i] * polys[i] with integer weights."""
    acc = PackedPoly.zero()
    for p, c in zip(polys, ints, strict=True):
        if c == 0 or p.is_zero():
            continue
        acc = acc.add(p.scale(Fraction(c)))
    return acc
