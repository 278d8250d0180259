"""Defining relations among the generator modules in low degree.

A relation of weight lam is a highest weight vector in the generator algebra
whose image under the substitution into trace expressions evaluates to the
zero polynomial on the generic matrix pair.  relation_space finds all of
them for a given weight: it evaluates the monomial basis of the bidegree
slice, forms the evaluated image of each highest weight basis vector, and
takes the exact kernel of the resulting coefficient matrix.

The analysis layer mirrors the downstream structure results: orbits under
the lowering derivation, reduction modulo the ideal generated by a fixed
homogeneous system of parameters, leading monomials under a fixed precedence
order, and the split of each degree's relations into consequences of lower
degree relations and genuinely new ones.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import genmat
from .cache import digest_text
from .glcat import (
    ABS_GENS,
    AbsGen,
    AbsMonomial,
    AbsPoly,
    Partition,
    abs_delta,
    abs_delta1,
    abs_monomials,
    abs_poly_text,
    catalog,
    catalog_digest,
    gen_by_modj,
    mono_name,
    phi,
)
from .hwv import HwvBasis, hwv_basis
from .nullspace import NullBasis, null_stream
from .packedpoly import PackedPoly
from .polyring import CommPoly, poly_to_text
from .tracelang import TraceExpr, format_trace_expr

LAMBDAS_BY_DEGREE: dict[int, tuple[Partition, ...]] = {
    12: (Partition(7, 5), Partition(6, 6)),
    13: (Partition(8, 5), Partition(7, 6)),
    14: (Partition(9, 5), Partition(8, 6), Partition(7, 7)),
}


# ---------------------------------------------------------------------------
# Parameter split and monomial precedence.


@dataclass(frozen=True)
class ParameterSplit:
    """A homogeneous system of parameters among the 30 generators and its
    complement.  The two parts partition the generator set."""

    hsop: tuple[AbsGen, ...]
    complement: tuple[AbsGen, ...]

    def __post_init__(self) -> None:
        ids = [g.gid for g in self.hsop] + [g.gid for g in self.complement]
        if sorted(ids) != list(range(len(ABS_GENS))):
            raise ValueError("hsop and complement must partition the generators")


def _build_split() -> ParameterSplit:
    hsop = [g for g in ABS_GENS if g.module <= 4]
    hsop.append(gen_by_modj(6, 0))
    hsop.append(gen_by_modj(6, 2))
    hsop_ids = {g.gid for g in hsop}
    # precedence order on the complement, highest first
    order = [
        (5, 0), (5, 1), (7, 0), (8, 0), (8, 1), (6, 1),
        (9, 0), (9, 1), (9, 2), (10, 0),
        (11, 0), (11, 1), (11, 2), (11, 3), (12, 0),
    ]
    complement = tuple(gen_by_modj(i, j) for i, j in order)
    assert all(g.gid not in hsop_ids for g in complement)
    return ParameterSplit(tuple(hsop), complement)


PARAMETER_SPLIT = _build_split()

_LEAD_RANK: dict[int, int] = {
    g.gid: rank for rank, g in enumerate(PARAMETER_SPLIT.complement)
}


def reduce_hsop(p: AbsPoly) -> AbsPoly:
    """Drop every monomial divisible by an hsop generator."""
    hsop_ids = {g.gid for g in PARAMETER_SPLIT.hsop}
    out = AbsPoly()
    out.terms = {
        m: c for m, c in p.terms.items() if not any(g in hsop_ids for g in m)
    }
    return out


def mono_lead_key(mono: AbsMonomial) -> tuple[int, ...]:
    """Sort key under the complement precedence, extended lexicographically
    to monomials.  Smaller key means greater monomial."""
    return tuple(sorted(_LEAD_RANK[g] for g in mono))


def leading_monomial(p: AbsPoly) -> AbsMonomial | None:
    """Greatest monomial of an hsop-free polynomial, None if zero."""
    if p.is_zero():
        return None
    return min(p.terms, key=mono_lead_key)


# ---------------------------------------------------------------------------
# Relation spaces.


@dataclass(frozen=True)
class RelationSpace:
    lam: Partition
    basis: HwvBasis
    zeta: tuple[tuple[Fraction, ...], ...]
    relvectors: tuple[AbsPoly, ...]
    from_cache: bool = False

    @property
    def r(self) -> int:
        return len(self.relvectors)


_GEN_EVAL: list[PackedPoly] | None = None
_GEN_EVAL_LOCK = threading.Lock()
_ABS_EVAL_MEMO: dict[AbsMonomial, PackedPoly] = {}


def _gen_evals(cache: genmat.EvalCache | None) -> list[PackedPoly]:
    global _GEN_EVAL
    if _GEN_EVAL is None:
        with _GEN_EVAL_LOCK:
            if _GEN_EVAL is None:
                mods = catalog(cache)
                _GEN_EVAL = [
                    genmat.eval_trace_expr_packed(
                        mods[g.module - 1].basis[g.j], cache
                    )
                    for g in ABS_GENS
                ]
    return _GEN_EVAL


def eval_abs_monomial(
    mono: AbsMonomial, cache: genmat.EvalCache | None = None
) -> PackedPoly:
    """Packed evaluation of a generator monomial, with prefix sharing."""
    if not mono:
        return PackedPoly.from_terms([((0,) * 18, Fraction(1))])
    hit = _ABS_EVAL_MEMO.get(mono)
    if hit is not None:
        return hit
    gens = _gen_evals(cache)
    if len(mono) == 1:
        out = gens[mono[0]]
    else:
        out = eval_abs_monomial(mono[:-1], cache).mul(gens[mono[-1]])
    with _GEN_EVAL_LOCK:
        _ABS_EVAL_MEMO[mono] = out
    return out


def eval_abs_poly(p: AbsPoly, cache: genmat.EvalCache | None = None) -> CommPoly:
    """Evaluate an AbsPoly on the generic matrices (via the substitution
    into trace expressions, composed with evaluation)."""
    acc = PackedPoly.zero()
    for mono, c in p.terms.items():
        acc = acc.add(eval_abs_monomial(mono, cache).scale(c))
    return acc.to_comm(genmat.VARSET18)


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _assemble_matrix(
    basis: HwvBasis, cache: genmat.EvalCache | None
) -> tuple[np.ndarray, list[int]]:
    """Coefficient matrix of the evaluated highest weight vectors.

    Returns (M, colscale): M has one row per occurring monomial of the
    18-variable evaluation and one integer column per basis vector; the true
    evaluation of basis vector i is column i divided by colscale[i].
    """
    evals = {m: eval_abs_monomial(m, cache) for m in basis.monomials}
    all_keys = np.unique(
        np.concatenate(
            [e.keys for e in evals.values() if not e.is_zero()]
            or [np.empty(0, dtype=np.int64)]
        )
    )
    pos = {m: np.searchsorted(all_keys, e.keys) for m, e in evals.items()}
    s = basis.s
    columns: list[np.ndarray] = []
    colscale: list[int] = []
    for v in basis.vectors:
        L = 1
        for c in v.terms.values():
            L = _lcm(L, c.denominator)
        D = 1
        for m in v.terms:
            D = _lcm(D, evals[m].den)
        bound = 0
        for m, c in v.terms.items():
            e = evals[m]
            bound += abs(c.numerator) * (L // c.denominator) * (D // e.den) * e.bound
        big = bound >= 1 << 62
        col = np.zeros(len(all_keys), dtype=object if big else np.int64)
        for m, c in v.terms.items():
            e = evals[m]
            w = c.numerator * (L // c.denominator) * (D // e.den)
            coeffs = e.coeffs.astype(object) if big and not e.is_big() else e.coeffs
            np.add.at(col, pos[m], coeffs * w)
        columns.append(col)
        colscale.append(L * D)
    if any(c.dtype == object for c in columns):
        M = np.empty((len(all_keys), s), dtype=object)
    else:
        M = np.empty((len(all_keys), s), dtype=np.int64)
    for i, col in enumerate(columns):
        M[:, i] = col
    return M, colscale


def _space_digest(space_zeta, relvectors) -> str:
    text = "|".join(abs_poly_text(v) for v in relvectors)
    return digest_text(text)


def relation_space(
    lam: Partition,
    mode: str = "modular",
    blocked: bool | None = None,
    cache: genmat.EvalCache | None = None,
    threads: int = 1,
    prime_budget: int | None = None,
    use_cache: bool = True,
) -> RelationSpace:
    """All relations of weight lam, as exact highest weight combinations."""
    lam = Partition.of(*lam)
    cache = cache or genmat.default_cache()
    store = cache.store
    key = f"relspace:{lam.l1},{lam.l2}:{catalog_digest()}"
    if use_cache and store is not None:
        summary = store.get_json(key)
        if isinstance(summary, dict):
            loaded = _load_space(lam, summary, threads)
            if loaded is not None:
                return loaded
    basis = hwv_basis(lam, blocked=blocked, threads=threads)
    M, colscale = _assemble_matrix(basis, cache)

    block = 4096

    def factory():
        for start in range(0, M.shape[0], block):
            yield M[start : start + block]

    nb = null_stream(
        factory,
        basis.s,
        mode=mode,
        prime_budget=prime_budget,
        threads=threads,
    )
    zeta = []
    relvectors = []
    for w in nb.vectors:
        z = [wi * sc for wi, sc in zip(w, colscale)]
        lead = next((x for x in z if x), None)
        if lead is not None and lead != 1:
            z = [x / lead for x in z]
        zeta.append(tuple(z))
        v = AbsPoly()
        for zi, bv in zip(z, basis.vectors):
            if zi:
                v = v + bv.scale(zi)
        if not abs_delta(v).is_zero():
            raise AssertionError("relation vector is not a highest weight vector")
        if not v.is_zero() and v.bidegree() != (lam.l1, lam.l2):
            raise AssertionError("relation vector has wrong bidegree")
        relvectors.append(v)
    space = RelationSpace(lam, basis, tuple(zeta), tuple(relvectors))
    if store is not None:
        store.put_json(
            key,
            {
                "lambda": [lam.l1, lam.l2],
                "blocked": basis.blocked,
                "zeta": [
                    [f"{x.numerator}/{x.denominator}" for x in z] for z in space.zeta
                ],
                "digest": _space_digest(space.zeta, space.relvectors),
            },
        )
    return space


def _load_space(lam: Partition, summary: dict, threads: int) -> RelationSpace | None:
    try:
        blocked = bool(summary["blocked"])
        zeta = tuple(
            tuple(Fraction(x) for x in z) for z in summary["zeta"]
        )
        digest = summary["digest"]
    except (KeyError, ValueError, TypeError):
        return None
    basis = hwv_basis(lam, blocked=blocked, threads=threads)
    if any(len(z) != basis.s for z in zeta):
        return None
    relvectors = []
    for z in zeta:
        v = AbsPoly()
        for zi, bv in zip(z, basis.vectors):
            if zi:
                v = v + bv.scale(zi)
        relvectors.append(v)
    if _space_digest(zeta, relvectors) != digest:
        return None
    return RelationSpace(lam, basis, zeta, tuple(relvectors), from_cache=True)


# ---------------------------------------------------------------------------
# Verification and membership.


@dataclass(frozen=True)
class ZeroReport:
    zero: bool
    residual_terms: int
    residual_sample: tuple[tuple[str, str], ...]
    digest: str

    SAMPLE_CAP = 10


def verify_zero(e: TraceExpr, cache: genmat.EvalCache | None = None) -> ZeroReport:
    """Evaluate a trace expression and report whether it is identically
    zero; a nonzero residual is summarized monomial by monomial, capped."""
    residual = genmat.eval_trace_expr(e, cache)
    text = poly_to_text(residual)
    sample = []
    for m, c in residual.sorted_terms()[: ZeroReport.SAMPLE_CAP]:
        sample.append(
            (" ".join(str(x) for x in m), f"{c.numerator}/{c.denominator}")
        )
    return ZeroReport(
        residual.is_zero(), len(residual.terms), tuple(sample), digest_text(text)
    )


def verify_zero_abs(p: AbsPoly, cache: genmat.EvalCache | None = None) -> ZeroReport:
    """Same as verify_zero but straight from an AbsPoly (packed path)."""
    acc = PackedPoly.zero()
    for mono, c in p.terms.items():
        acc = acc.add(eval_abs_monomial(mono, cache).scale(c))
    residual = acc.to_comm(genmat.VARSET18)
    text = poly_to_text(residual)
    sample = tuple(
        (" ".join(str(x) for x in m), f"{c.numerator}/{c.denominator}")
        for m, c in residual.sorted_terms()[: ZeroReport.SAMPLE_CAP]
    )
    return ZeroReport(
        residual.is_zero(), len(residual.terms), sample, digest_text(text)
    )


def membership(candidate: AbsPoly, space: RelationSpace) -> bool:
    """Is the candidate in the rational span of the relation vectors?

    The candidate must be homogeneous of the space's bidegree; anything else
    is a usage error, not a False.
    """
    if candidate.is_zero():
        return True
    if candidate.bidegree() != (space.lam.l1, space.lam.l2):
        raise ValueError(
            f"candidate bidegree {candidate.bidegree()} does not match "
            f"the space weight {tuple(space.lam)}"
        )
    index = {m: i for i, m in enumerate(space.basis.monomials)}
    from .nullspace import _IntEchelon

    ech = _IntEchelon(len(index))
    for v in space.relvectors:
        ech.add_row({index[m]: c for m, c in v.terms.items()})
    base_rank = ech.rank
    ech.add_row({index[m]: c for m, c in candidate.terms.items()})
    return ech.rank == base_rank


# ---------------------------------------------------------------------------
# Orbits and leading monomials.


def orbit(space: RelationSpace) -> tuple[AbsPoly, ...]:
    """Ladder orbit of every relation vector: for each one the vectors
    e_j = delta1^j(v) / (a (a-1) ... (a-j+1)) for j = 0 .. a."""
    a = space.lam.l1 - space.lam.l2
    out: list[AbsPoly] = []
    for v in space.relvectors:
        cur = v
        out.append(cur)
        for j in range(1, a + 1):
            cur = abs_delta1(cur).scale(Fraction(1, a - j + 1))
            if cur.is_zero():
                raise AssertionError("orbit vector vanished before the ladder end")
            out.append(cur)
    return tuple(out)


@dataclass(frozen=True)
class LeadingEntry:
    bidegree: tuple[int, int]
    monomial: AbsMonomial
    name: str
    source_lambda: Partition
    source_vector: int
    orbit_j: int


@dataclass(frozen=True)
class LeadingReport:
    entries: tuple[LeadingEntry, ...]
    absorbed: tuple[tuple[Partition, int, int], ...]

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(e.name for e in self.entries)


def leading_analysis(
    spaces: RelationSpace | Sequence[RelationSpace],
) -> LeadingReport:
    """Leading monomials of the orbit vectors modulo the hsop ideal.

    Orbit vectors are processed in a fixed order (spaces as given, relation
    vectors in basis order, ladder position ascending).  Each vector is
    reduced modulo the hsop ideal and then against the previously recorded
    vectors of the same bidegree before its greatest monomial is recorded,
    so the result is a staircase of distinct leading monomials.  Vectors
    absorbed to zero by earlier ones are reported separately.
    """
    if isinstance(spaces, RelationSpace):
        spaces = [spaces]
    entries: list[LeadingEntry] = []
    absorbed: list[tuple[Partition, int, int]] = []
    pivots: dict[tuple[int, int], list[tuple[AbsMonomial, AbsPoly]]] = {}
    for space in spaces:
        a = space.lam.l1 - space.lam.l2
        orbs = orbit(space)
        for flat, vec in enumerate(orbs):
            vi, j = divmod(flat, a + 1)
            beta = vec.bidegree()
            red = reduce_hsop(vec)
            stair = pivots.setdefault(beta, [])
            while not red.is_zero():
                lead = leading_monomial(red)
                hit = next((pv for pm, pv in stair if pm == lead), None)
                if hit is None:
                    break
                red = red - hit.scale(red.terms[lead] / hit.terms[lead])
            if red.is_zero():
                absorbed.append((space.lam, vi, j))
                continue
            lead = leading_monomial(red)
            stair.append((lead, red))
            entries.append(
                LeadingEntry(beta, lead, mono_name(lead), space.lam, vi, j)
            )
    return LeadingReport(tuple(entries), tuple(absorbed))


# ---------------------------------------------------------------------------
# New relations by degree.


@dataclass(frozen=True)
class NewRelationsItem:
    lam: Partition
    r: int
    old: int
    new: int


@dataclass(frozen=True)
class NewRelationsReport:
    degree: int
    items: tuple[NewRelationsItem, ...]

    @property
    def decomposition(self) -> str:
        parts = []
        for it in self.items:
            if it.new == 0:
                continue
            w = f"W({it.lam.l1},{it.lam.l2})"
            parts.append(w if it.new == 1 else f"{it.new}*{w}")
        return " + ".join(parts) if parts else "0"


def _old_multiplicity(
    lam: Partition, products: list[AbsPoly]
) -> int:
    """Dimension of the weight-lam highest weight space inside the span of
    the given bidegree-lam vectors."""
    if not products:
        return 0
    from .nullspace import QMatrix, null_dense, _IntEchelon

    q_mons = abs_monomials(Partition(lam.l1 + 1, lam.l2 - 1)) if lam.l2 else []
    q_index = {m: i for i, m in enumerate(q_mons)}
    rows: list[dict[int, Fraction]] = [dict() for _ in q_mons]
    for c, prod in enumerate(products):
        img = abs_delta(prod)
        for m, coeff in img.terms.items():
            rows[q_index[m]][c] = rows[q_index[m]].get(c, Fraction(0)) + coeff
    K = null_dense(QMatrix(tuple(rows), len(products)))
    p_mons = abs_monomials(lam)
    p_index = {m: i for i, m in enumerate(p_mons)}
    ech = _IntEchelon(len(p_mons))
    for k in K.vectors:
        vec = AbsPoly()
        for ki, prod in zip(k, products):
            if ki:
                vec = vec + prod.scale(ki)
        ech.add_row({p_index[m]: c for m, c in vec.terms.items()})
    return ech.rank


def new_relations(
    degree: int,
    mode: str = "modular",
    cache: genmat.EvalCache | None = None,
    threads: int = 1,
) -> NewRelationsReport:
    """Split the weight multiplicities of degree-d relations into
    consequences of lower degree relations and new ones."""
    if degree not in LAMBDAS_BY_DEGREE:
        raise ValueError(f"no relation data for degree {degree}")
    lower_orbits: list[AbsPoly] = []
    for d in sorted(LAMBDAS_BY_DEGREE):
        if d >= degree:
            break
        for lam in LAMBDAS_BY_DEGREE[d]:
            space = relation_space(lam, mode=mode, cache=cache, threads=threads)
            lower_orbits.extend(orbit(space))
    items = []
    for lam in LAMBDAS_BY_DEGREE[degree]:
        space = relation_space(lam, mode=mode, cache=cache, threads=threads)
        products: list[AbsPoly] = []
        for w in lower_orbits:
            beta = w.bidegree()
            rem = (lam.l1 - beta[0], lam.l2 - beta[1])
            if rem[0] < 0 or rem[1] < 0 or rem == (0, 0):
                continue
            for m in _monomials_bidegree(rem):
                products.append(w * AbsPoly.monomial(m))
        old = _old_multiplicity(lam, products)
        items.append(NewRelationsItem(lam, space.r, old, space.r - old))
    return NewRelationsReport(degree, tuple(items))


def _monomials_bidegree(bideg: tuple[int, int]) -> list[AbsMonomial]:
    """Generator monomials of an arbitrary bidegree (no partition shape
    requirement)."""
    from .glcat import NGENS

    p0, q0 = bideg
    out: list[AbsMonomial] = []

    def recurse(gid: int, p: int, q: int, acc: list[int]) -> None:
        if p == 0 and q == 0:
            out.append(tuple(acc))
            return
        if gid >= NGENS:
            return
        gp, gq = ABS_GENS[gid].bidegree
        recurse(gid + 1, p, q, acc)
        if gp <= p and gq <= q:
            acc.append(gid)
            recurse(gid, p - gp, q - gq, acc)
            acc.pop()

    recurse(0, p0, q0, [])
    out.sort(key=lambda m: (len(m), m))
    return out


# ---------------------------------------------------------------------------
# Certificates.


@dataclass(frozen=True)
class RelationCertificate:
    lam: Partition
    index: int
    zeta: tuple[str, ...]
    abspoly: tuple[tuple[tuple[tuple[int, int], ...], str], ...]
    trace_form: str
    leading: str | None
    digest: str

    def to_json(self) -> dict:
        return {
            "lambda": [self.lam.l1, self.lam.l2],
            "index": self.index,
            "zeta": list(self.zeta),
            "abspoly": [
                {"monomial": [list(p) for p in mono], "coeff": c}
                for mono, c in self.abspoly
            ],
            "trace_form": self.trace_form,
            "leading": self.leading,
            "evaluation_digest": self.digest,
        }


def build_certificate(space: RelationSpace, index: int) -> RelationCertificate:
    v = space.relvectors[index]
    red = reduce_hsop(v)
    lead = leading_monomial(red)
    abspoly = tuple(
        (
            tuple((ABS_GENS[g].module, ABS_GENS[g].j) for g in mono),
            f"{c.numerator}/{c.denominator}",
        )
        for mono, c in v.sorted_terms()
    )
    claim = (
        f"relation;{space.lam.l1},{space.lam.l2};{abs_poly_text(v)};residual=0"
    )
    return RelationCertificate(
        space.lam,
        index,
        tuple(
            f"{x.numerator}/{x.denominator}" for x in space.zeta[index]
        ),
        abspoly,
        format_trace_expr(phi(v)),
        mono_name(lead) if lead is not None else None,
        digest_text(claim),
    )


def write_certificates(space: RelationSpace, store) -> list[str]:
    """Write one JSON certificate per relation vector; returns cache keys."""
    keys = []
    for i in range(space.r):
        cert = build_certificate(space, i)
        key = f"relcert:{space.lam.l1},{space.lam.l2}:{i}:{catalog_digest()}"
        store.put_json(key, cert.to_json())
        keys.append(key)
    return keys
