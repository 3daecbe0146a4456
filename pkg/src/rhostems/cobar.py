"""Brute-force Ext over the motivic dual Steenrod algebra via the reduced cobar complex.

One tridegree at a time: enumerate the cobar basis, build the
differential as a GF(2) matrix, and read off dimensions, cocycle
representatives, and products.  This is the independent ground-truth
oracle everything downstream is checked against.

Basis elements are rho^a tau^b [m_1 | ... | m_f] with each m_i a
coefficient-free nonconstant Milnor monomial.  In stem grading,

    s = sum t(m_i) - a - f,   w = sum w(m_i) - a - b,

so s - w = sum gamma(m_i) - f + b with gamma >= 1 per factor: each
tridegree has a finite basis (the coweight pays for every tensor
factor), which is the finiteness argument that makes enumeration total.

Tridegrees are independent, so contexts can be used from parallel
workers on disjoint degrees; all caches are per-context.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from . import gf2
from .steenrod import (
    MilnorMonomial,
    TriDegree,
    coeff_monomial,
    multiply,
    reduced_coproduct,
    right_unit,
)

BASES = ("R", "C", "classical")

# Hard cap on Milnor generator indices; gamma(tau_6) = 64 is far beyond
# any desk-scale coweight budget, so hitting the cap means a misuse.
MAX_GEN_INDEX = 6


@dataclass(frozen=True)
class CobarElement:
    """rho^a tau^b [factors]; factors are reduced Milnor monomials."""

    a: int
    b: int
    factors: tuple[MilnorMonomial, ...]

    def tridegree(self) -> TriDegree:
        t = -self.a
        w = -self.a - self.b
        for m in self.factors:
            mt, mw = m.degree()
            t += mt
            w += mw
        return TriDegree(t - len(self.factors), len(self.factors), w)

    def sort_key(self):
        return (self.a, self.b, tuple((m.taus, m.xis) for m in self.factors))

    def __str__(self) -> str:
        coeff = str(coeff_monomial(self.a, self.b))
        body = "[" + "|".join(str(m) for m in self.factors) + "]"
        return body if coeff == "1" else f"{coeff} {body}"


@lru_cache(maxsize=None)
def monomials_of_gamma(g: int) -> tuple[MilnorMonomial, ...]:
    """All reduced monomials m with gamma(m) == g, canonically sorted."""
    if g <= 0:
        return ()
    out: list[MilnorMonomial] = []

    def rec(idx: int, remaining: int, taus: int, xis: dict[int, int]):
        if remaining == 0:
            if taus or xis:
                arr = [0] * (max(xis) if xis else 0)
                for k, v in xis.items():
                    arr[k - 1] = v
                out.append(MilnorMonomial(0, 0, taus, tuple(arr)))
            return
        if idx > MAX_GEN_INDEX:
            return
        gx = (1 << idx) - 1  # gamma(xi_idx)
        gt = 1 << idx  # gamma(tau_idx)
        for ex in range(remaining // gx + 1):
            rem1 = remaining - ex * gx
            xis1 = dict(xis)
            if ex:
                xis1[idx] = ex
            rec(idx + 1, rem1, taus, xis1)
            if rem1 >= gt:
                rec(idx + 1, rem1 - gt, taus | (1 << idx), xis1)

    # tau_0 (gamma 1, exponent <= 1) first, then generators of index >= 1
    rec(1, g, 0, {})
    rec(1, g - 1, 1, {})
    out.sort()
    return tuple(out)


@lru_cache(maxsize=None)
def monomials_by_gamma_t(g: int) -> dict[int, tuple[MilnorMonomial, ...]]:
    """Monomials of gamma g bucketed by first degree t (t in [g, 2g])."""
    buckets: dict[int, list[MilnorMonomial]] = {}
    for m in monomials_of_gamma(g):
        buckets.setdefault(m.degree()[0], []).append(m)
    return {t: tuple(v) for t, v in buckets.items()}


def factor_tuples(gamma_total: int, nfactors: int, t_lo: int, t_hi: int):
    """Yield (factors, t_total) for all nfactors-tuples with
    sum gamma == gamma_total and total first degree within [t_lo, t_hi].

    Output-sensitive: branches are pruned with gamma <= t <= 2*gamma per
    remaining suffix, so enumeration cost tracks the result count.
    """
    if nfactors == 0:
        if gamma_total == 0 and t_lo <= 0 <= t_hi:
            yield (), 0
        return

    def rec(slots: int, g_left: int, t_left_lo: int, t_left_hi: int, acc: tuple):
        if slots == 0:
            if g_left == 0 and t_left_lo <= 0 <= t_left_hi:
                yield acc, 0
            return
        for g in range(1, g_left - (slots - 1) + 1):
            g_rest = g_left - g
            for mt, monos in monomials_by_gamma_t(g).items():
                # remaining total t must lie within [g_rest, 2*g_rest]
                lo = max(t_left_lo - mt, g_rest)
                hi = min(t_left_hi - mt, 2 * g_rest)
                if lo > hi:
                    continue
                for m in monos:
                    yield from (
                        (acc2, t2 + mt)
                        for acc2, t2 in rec(slots - 1, g_rest, lo, hi, acc + (m,))
                    )

    yield from rec(nfactors, gamma_total, t_lo, t_hi, ())


def _slide_coeff(prefix: tuple[MilnorMonomial, ...], a: int, b: int) -> list[tuple[int, int, tuple[MilnorMonomial, ...]]]:
    """Move a coefficient rho^a tau^b leftward across tensor factors.

    Crossing one tensor sign applies eta_R to the coefficient and
    multiplies it into the factor on the left; repeats until the
    coefficient reaches the external slot.  Returns an F2 sum of
    (a, b, new_prefix) triples.
    """
    if (a == 0 and b == 0) or not prefix:
        return [(a, b, prefix)]
    out: dict[tuple[int, int, tuple[MilnorMonomial, ...]], int] = {}
    last = prefix[-1]
    for pm in multiply(frozenset({last}), right_unit(a, b)):
        stripped = pm.strip_coefficient()
        for a2, b2, pre2 in _slide_coeff(prefix[:-1], pm.a, pm.b):
            key = (a2, b2, pre2 + (stripped,))
            out[key] = out.get(key, 0) ^ 1
    return [k for k, v in out.items() if v]


@lru_cache(maxsize=None)
def _inner_faces(factors: tuple[MilnorMonomial, ...]) -> tuple[tuple[int, int, tuple[MilnorMonomial, ...]], ...]:
    """Sum over i of [.. | reduced-coproduct(m_i) | ..] with coefficients
    slid to the outside; entries are (delta_a, delta_b, new_factors)."""
    acc: dict[tuple[int, int, tuple[MilnorMonomial, ...]], int] = {}
    for i, mi in enumerate(factors):
        prefix = factors[:i]
        suffix = factors[i + 1 :]
        for left, right in reduced_coproduct(mi):
            lstr = left.strip_coefficient()
            for a2, b2, pre2 in _slide_coeff(prefix, left.a, left.b):
                key = (a2, b2, pre2 + (lstr, right) + suffix)
                acc[key] = acc.get(key, 0) ^ 1
    return tuple(k for k, v in acc.items() if v)


@lru_cache(maxsize=None)
def _eta_face(b: int) -> tuple[tuple[int, int, MilnorMonomial], ...]:
    """eta_R(tau^b) - tau^b as (a, b, leading reduced factor) triples.

    rho is central with eta_R(rho) = rho, so the coefficient face of
    rho^a tau^b [..] is rho^a times this, i.e. d commutes with rho.
    """
    eta = right_unit(0, b).symmetric_difference(frozenset({coeff_monomial(0, b)}))
    return tuple((m.a, m.b, m.strip_coefficient()) for m in eta)


@lru_cache(maxsize=1_000_000)
def differential_terms(elt: CobarElement, base: str) -> tuple[CobarElement, ...]:
    """d(elt) as an F2 sum of cobar basis elements (one filtration up)."""
    acc: dict[CobarElement, int] = {}

    def emit(a: int, b: int, factors: tuple[MilnorMonomial, ...]):
        if base != "R" and a > 0:
            return
        if base == "classical":
            b = 0
        key = CobarElement(a, b, factors)
        acc[key] = acc.get(key, 0) ^ 1

    for da, db, lead in _eta_face(elt.b):
        emit(elt.a + da, db, (lead,) + elt.factors)
    for da, db, factors in _inner_faces(elt.factors):
        emit(elt.a + da, elt.b + db, factors)

    return tuple(k for k, v in acc.items() if v)


def d_squared_on(elt: CobarElement, base: str) -> list[CobarElement]:
    """d(d(elt)) as a (cancelled) F2 sum; empty means zero."""
    acc: dict[CobarElement, int] = {}
    for term in differential_terms(elt, base):
        for term2 in differential_terms(term, base):
            acc[term2] = acc.get(term2, 0) ^ 1
    return [k for k, v in acc.items() if v]


def rho_commutes_with_d(elt: CobarElement, base: str) -> bool:
    """Check d(rho * elt) == rho * d(elt) termwise."""
    bumped = CobarElement(elt.a + 1, elt.b, elt.factors)
    lhs = sorted(differential_terms(bumped, base), key=CobarElement.sort_key)
    rhs = sorted(
        (CobarElement(t.a + 1, t.b, t.factors) for t in differential_terms(elt, base)),
        key=CobarElement.sort_key,
    )
    return lhs == rhs


class CobarContext:
    """Per-base cobar computations with per-tridegree caching."""

    def __init__(self, base: str):
        if base not in BASES:
            raise ValueError(f"base must be one of {BASES}")
        self.base = base
        self._basis: dict[TriDegree, tuple[CobarElement, ...]] = {}
        self._images: dict[TriDegree, list[int]] = {}
        self._cohomology: dict[TriDegree, dict] = {}

    # -- basis enumeration -------------------------------------------------

    def basis(self, t: TriDegree) -> tuple[CobarElement, ...]:
        if t in self._basis:
            return self._basis[t]
        s, f, w = t
        c = s - w
        out: list[CobarElement] = []
        if self.base == "classical":
            # graded by (s, f) only; conventionally queried on w == s
            if w == s and f >= 0 and s >= 0:
                if f == 0:
                    if s == 0:
                        out.append(CobarElement(0, 0, ()))
                else:
                    for g in range(f, s + f + 1):
                        for factors, _tt in factor_tuples(g, f, s + f, s + f):
                            out.append(CobarElement(0, 0, factors))
        elif f >= 0 and c >= 0:
            for b in range(c + 1):
                g_total = c + f - b
                if f == 0:
                    if g_total == 0:
                        a = -s
                        if a >= 0 and not (self.base == "C" and a != 0):
                            out.append(CobarElement(a, b, ()))
                    continue
                if g_total < f:
                    continue
                t_hi = s + f if self.base == "C" else 2 * g_total
                if t_hi < s + f:
                    continue
                for factors, tt in factor_tuples(g_total, f, s + f, t_hi):
                    out.append(CobarElement(tt - (s + f), b, factors))
        out.sort(key=CobarElement.sort_key)
        self._basis[t] = tuple(out)
        return self._basis[t]

    def basis_index(self, t: TriDegree) -> dict[CobarElement, int]:
        return {e: i for i, e in enumerate(self.basis(t))}

    # -- differential ------------------------------------------------------

    def diff_target(self, t: TriDegree) -> TriDegree:
        return TriDegree(t.s - 1, t.f + 1, t.w)

    def _norm(self, t: TriDegree) -> TriDegree:
        # classical complex is (s, f)-graded: fold w onto the diagonal
        return TriDegree(t.s, t.f, t.s) if self.base == "classical" else t

    def diff_images(self, t: TriDegree) -> list[int]:
        """For each basis element at t, its differential as a bitmask over
        the basis at (s-1, f+1, w)."""
        t = self._norm(t)
        if t in self._images:
            return self._images[t]
        src = self.basis(t)
        tgt = self._norm(self.diff_target(t))
        tgt_index = self.basis_index(tgt)
        images = []
        for e in src:
            v = 0
            for term in differential_terms(e, self.base):
                try:
                    v ^= 1 << tgt_index[term]
                except KeyError:
                    raise AssertionError(
                        f"differential term {term} of {e} not in target basis at {tgt}"
                    )
            images.append(v)
        self._images[t] = images
        return images

    def diff_matrix(self, t: TriDegree) -> gf2.BitMatrix:
        """Matrix of d at t: rows = target basis, columns = source basis."""
        t = self._norm(t)
        images = self.diff_images(t)
        tgt_dim = len(self.basis(self._norm(self.diff_target(t))))
        rows = [0] * tgt_dim
        for s_idx, v in enumerate(images):
            while v:
                low = v & -v
                rows[low.bit_length() - 1] |= 1 << s_idx
                v ^= low
        return gf2.BitMatrix(tgt_dim, len(images), tuple(rows))

    def d_squared_is_zero(self, t: TriDegree) -> bool:
        """Check d(d(x)) == 0 for every basis element at t."""
        t = self._norm(t)
        images1 = self.diff_images(t)
        images2 = self.diff_images(self._norm(self.diff_target(t)))
        for v in images1:
            acc = 0
            i = 0
            while v:
                if v & 1:
                    acc ^= images2[i]
                v >>= 1
                i += 1
            if acc:
                return False
        return True

    # -- cohomology --------------------------------------------------------

    def cohomology(self, t: TriDegree) -> dict:
        """Kernel/image data at t: dim, echelon class reps, boundary reducer."""
        t = self._norm(t)
        if t in self._cohomology:
            return self._cohomology[t]
        n = len(self.basis(t))
        kernel = gf2.rref(self.diff_matrix(t)).kernel_basis
        prev = self._norm(TriDegree(t.s + 1, t.f - 1, t.w))
        if t.f == 0:
            boundary_rows: list[int] = []
        else:
            boundary_rows = [v for v in self.diff_images(prev) if v]
        reducer = gf2.reduce_mod_rowspace(boundary_rows, n)
        reduced = [reducer.reduce(v) for v in kernel]
        rank_, pivots, rws = gf2.gf2_py.rref_ints([v for v in reduced if v], n)
        data = {
            "dim": rank_,
            "reps": list(rws),
            "rep_pivots": list(pivots),
            "reducer": reducer,
        }
        self._cohomology[t] = data
        return data

    def ext_dimension(self, t: TriDegree) -> int:
        """dim Ext at t = dim C(t) - rank d(t) - rank d(prev), via sparse rank."""
        t = self._norm(t)
        if t in self._cohomology:
            return self._cohomology[t]["dim"]
        n = len(self.basis(t))
        if n == 0:
            return 0
        r1 = self._sparse_rank_at(t)
        prev = self._norm(TriDegree(t.s + 1, t.f - 1, t.w))
        r0 = self._sparse_rank_at(prev) if t.f > 0 else 0
        return n - r1 - r0

    def _sparse_rank_at(self, t: TriDegree) -> int:
        if not hasattr(self, "_rank_cache"):
            self._rank_cache: dict[TriDegree, int] = {}
        if t in self._rank_cache:
            return self._rank_cache[t]
        rows = []
        for v in self.diff_images(t):
            row = set()
            while v:
                low = v & -v
                row.add(low.bit_length() - 1)
                v ^= low
            rows.append(row)
        rank = gf2.sparse_rank(rows)
        self._rank_cache[t] = rank
        return rank

    def is_cocycle(self, t: TriDegree, v: int) -> bool:
        t = self._norm(t)
        images = self.diff_images(t)
        acc = 0
        i = 0
        while v:
            if v & 1:
                acc ^= images[i]
            v >>= 1
            i += 1
        return acc == 0

    def class_coords(self, t: TriDegree, v: int) -> int:
        """Coordinates of cocycle v in the canonical Ext basis at t."""
        t = self._norm(t)
        data = self.cohomology(t)
        v = data["reducer"].reduce(v)
        coords = 0
        for i, p in enumerate(data["rep_pivots"]):
            if (v >> p) & 1:
                v ^= data["reps"][i]
                coords |= 1 << i
        if v != 0:
            raise ValueError("vector is not in the span of Ext representatives")
        return coords

    def ext_product(self, t1: TriDegree, v1: int, t2: TriDegree, v2: int) -> tuple[TriDegree, int]:
        """Concatenation product of two cocycles, as a cocycle vector.

        Inputs must be cocycles (contract violation otherwise).  Output
        tridegree is the componentwise sum; the output class is
        well-defined modulo coboundaries.
        """
        t1, t2 = self._norm(t1), self._norm(t2)
        if not self.is_cocycle(t1, v1) or not self.is_cocycle(t2, v2):
            raise ValueError("ext_product requires cocycle inputs")
        b1 = self.basis(t1)
        b2 = self.basis(t2)
        t3 = self._norm(TriDegree(t1.s + t2.s, t1.f + t2.f, t1.w + t2.w))
        idx3 = self.basis_index(t3)
        acc: dict[CobarElement, int] = {}
        for i in range(len(b1)):
            if not (v1 >> i) & 1:
                continue
            for j in range(len(b2)):
                if not (v2 >> j) & 1:
                    continue
                e1, e2 = b1[i], b2[j]
                for a2, b2c, pre in _slide_coeff(e1.factors, e2.a, e2.b):
                    if self.base != "R" and a2 > 0:
                        continue
                    bb = 0 if self.base == "classical" else e1.b + b2c
                    key = CobarElement(e1.a + a2, bb, pre + e2.factors)
                    acc[key] = acc.get(key, 0) ^ 1
        out = 0
        for k, v in acc.items():
            if v:
                out ^= 1 << idx3[k]
        assert self.is_cocycle(t3, out), "product of cocycles must be a cocycle"
        return t3, out

    def rep_vector(self, t: TriDegree, k: int = 0) -> int:
        """k-th canonical Ext class representative at t."""
        return self.cohomology(self._norm(t))["reps"][k]

    def product_class(self, t1: TriDegree, v1: int, t2: TriDegree, v2: int) -> tuple[TriDegree, int]:
        """ext_product followed by reduction to Ext-basis coordinates."""
        t3, out = self.ext_product(t1, v1, t2, v2)
        return t3, self.class_coords(t3, out)

    # -- rho multiplication and the long exact sequence ---------------------

    def rho_rank(self, t: TriDegree) -> tuple[int, int, int]:
        """Rank data of rho: Ext(s,f,w) -> Ext(s-1,f,w-1)  (base R only).

        Returns (dim_source, dim_target, rank).
        """
        assert self.base == "R"
        t2 = TriDegree(t.s - 1, t.f, t.w - 1)
        src = self.cohomology(t)
        tgt = self.cohomology(t2)
        if src["dim"] == 0 or tgt["dim"] == 0:
            return src["dim"], tgt["dim"], 0
        b1 = self.basis(t)
        idx2 = self.basis_index(t2)
        rows = []
        for rep in src["reps"]:
            v = 0
            for i in range(len(b1)):
                if (rep >> i) & 1:
                    e = b1[i]
                    v ^= 1 << idx2[CobarElement(e.a + 1, e.b, e.factors)]
            rows.append(self.class_coords(t2, v))
        return src["dim"], tgt["dim"], gf2.rank(
            gf2.BitMatrix(len(rows), tgt["dim"], tuple(rows))
        )


def les_rank_identity(ctx_r: CobarContext, ctx_c: CobarContext, t: TriDegree) -> dict:
    """Exactness bookkeeping at Ext_C(s,f,w) for the rho long exact sequence:

        dim Ext_C(s,f,w) = dim coker(rho -> Ext_R(s,f,w))
                         + dim ker(rho: Ext_R(s,f,w+1) -> Ext_R(s-1,f,w)).
    """
    dim_c = ctx_c.ext_dimension(t)
    into_src, into_tgt, into_rank = ctx_r.rho_rank(TriDegree(t.s + 1, t.f, t.w + 1))
    out_src, _out_tgt, out_rank = ctx_r.rho_rank(TriDegree(t.s, t.f, t.w + 1))
    coker = into_tgt - into_rank
    ker = out_src - out_rank
    return {
        "t": t,
        "dim_C": dim_c,
        "coker": coker,
        "ker": ker,
        "ok": dim_c == coker + ker,
    }
