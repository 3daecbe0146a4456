"""The R-motivic dual Steenrod algebra over M2 = F2[rho, tau].

Milnor-basis monomials rho^a tau^b * tau(E) * xi(R) with the relation

    tau_k^2 = tau xi_{k+1} + rho tau_{k+1} + rho tau_0 xi_{k+1}

rewritten away, the coproduct, and the twisted right unit
eta_R(tau) = tau + rho tau_0.  Setting rho = 0 gives the C-motivic
algebra; additionally setting tau = 1 gives the classical one.

Degrees are bigraded (first coordinate, weight): tau_i and xi_i have
degrees (2^{i+1}-1, 2^i-1) and (2^{i+1}-2, 2^i-1); rho is (-1,-1) and
tau is (0,-1).

All values are immutable and all operations pure.  Coefficients are
carried on the left tensor factor only; right-factor coefficients are
slid across the tensor via eta_R (the Hopf-algebroid twist lives in
exactly one place: normalize_pair below).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, NamedTuple


class TriDegree(NamedTuple):
    """(stem s, Adams filtration f, weight w); coweight is derived."""

    s: int
    f: int
    w: int

    @property
    def coweight(self) -> int:
        return self.s - self.w

    def __add__(self, other):  # type: ignore[override]
        return TriDegree(self.s + other[0], self.f + other[1], self.w + other[2])

    def __sub__(self, other):
        return TriDegree(self.s - other[0], self.f - other[1], self.w - other[2])

    def __str__(self) -> str:
        return f"({self.s},{self.f},{self.w})"


@dataclass(frozen=True, order=True)
class MilnorMonomial:
    """rho^a tau^b tau(E) xi(R); E a bitmask of tau indices, R xi exponents.

    Canonical order is (a, b, E, R), which makes element serialization
    deterministic.  R is trailing-zero-trimmed, R[i] = exponent of
    xi_{i+1}.
    """

    a: int = 0
    b: int = 0
    taus: int = 0
    xis: tuple[int, ...] = ()

    def __post_init__(self):
        if self.a < 0 or self.b < 0 or self.taus < 0:
            raise ValueError("negative exponent")
        if self.xis and self.xis[-1] == 0:
            raise ValueError("xis not trimmed")

    @property
    def reduced_part(self) -> tuple[int, tuple[int, ...]]:
        return (self.taus, self.xis)

    def is_coefficient(self) -> bool:
        """True when the reduced part is constant (pure rho^a tau^b)."""
        return self.taus == 0 and not self.xis

    def is_unit(self) -> bool:
        return self.a == 0 and self.b == 0 and self.is_coefficient()

    def degree(self) -> tuple[int, int]:
        """(first coordinate, weight), additive over factors."""
        t = -self.a
        w = -self.a - self.b
        e = self.taus
        i = 0
        while e:
            if e & 1:
                t += (1 << (i + 1)) - 1
                w += (1 << i) - 1
            e >>= 1
            i += 1
        for i, r in enumerate(self.xis):
            t += r * ((1 << (i + 2)) - 2)
            w += r * ((1 << (i + 1)) - 1)
        return (t, w)

    def gamma(self) -> int:
        """degree difference t - w of the reduced part (coefficient-free).

        tau_i contributes 2^i and xi_i contributes 2^i - 1, so every
        nonconstant reduced monomial has gamma >= 1.
        """
        g = 0
        e = self.taus
        i = 0
        while e:
            if e & 1:
                g += 1 << i
            e >>= 1
            i += 1
        for i, r in enumerate(self.xis):
            g += r * ((1 << (i + 1)) - 1)
        return g

    def coefficient_part(self) -> "MilnorMonomial":
        return MilnorMonomial(self.a, self.b, 0, ())

    def strip_coefficient(self) -> "MilnorMonomial":
        return MilnorMonomial(0, 0, self.taus, self.xis)

    def __str__(self) -> str:
        parts = []
        if self.a == 1:
            parts.append("rho")
        elif self.a > 1:
            parts.append(f"rho^{self.a}")
        if self.b == 1:
            parts.append("tau")
        elif self.b > 1:
            parts.append(f"tau^{self.b}")
        e = self.taus
        i = 0
        while e:
            if e & 1:
                parts.append(f"t{i}")
            e >>= 1
            i += 1
        for i, r in enumerate(self.xis):
            if r == 1:
                parts.append(f"x{i + 1}")
            elif r > 1:
                parts.append(f"x{i + 1}^{r}")
        return " ".join(parts) if parts else "1"


def _xis_set(xis: tuple[int, ...], idx: int, delta: int) -> tuple[int, ...]:
    """xis with exponent of xi_{idx+1} increased by delta, trimmed."""
    r = list(xis) + [0] * max(0, idx + 1 - len(xis))
    r[idx] += delta
    while r and r[-1] == 0:
        r.pop()
    return tuple(r)


MONOMIAL_RE = re.compile(r"(rho|tau|t\d+|x\d+)(?:\^(\d+))?$")


def parse_monomial(text: str) -> MilnorMonomial:
    """Parse e.g. 'rho^3 tau^2 t0 t1 x1^2'; inverse of str()."""
    a = b = taus = 0
    xis: tuple[int, ...] = ()
    text = text.strip()
    if text == "1":
        return MilnorMonomial()
    for tok in text.split():
        m = MONOMIAL_RE.match(tok)
        if not m:
            raise ValueError(f"bad monomial token {tok!r}")
        name, exp = m.group(1), int(m.group(2) or 1)
        if name == "rho":
            a += exp
        elif name == "tau":
            b += exp
        elif name.startswith("t"):
            i = int(name[1:])
            if exp != 1 or (taus >> i) & 1:
                raise ValueError(f"tau_{i} squared in {text!r}; not in canonical form")
            taus |= 1 << i
        else:
            xis = _xis_set(xis, int(name[1:]) - 1, exp)
    return MilnorMonomial(a, b, taus, xis)


# A MilnorElement is a frozenset of monomials (an F2 sum: duplicates cancel).
MilnorElement = frozenset


def element(monos: Iterable[MilnorMonomial]) -> MilnorElement:
    """F2 sum with cancellation."""
    acc: set[MilnorMonomial] = set()
    for m in monos:
        if m in acc:
            acc.discard(m)
        else:
            acc.add(m)
    return frozenset(acc)


def el_add(x: MilnorElement, y: MilnorElement) -> MilnorElement:
    return x.symmetric_difference(y)


def el_str(x: MilnorElement) -> str:
    if not x:
        return "0"
    return " + ".join(str(m) for m in sorted(x))


def parse_element(text: str) -> MilnorElement:
    text = text.strip()
    if text == "0":
        return frozenset()
    return element(parse_monomial(t) for t in text.split("+"))


def el_degree(x: MilnorElement) -> tuple[int, int] | None:
    """Common bidegree of all terms; None for 0; raises if mixed."""
    degs = {m.degree() for m in x}
    if not degs:
        return None
    if len(degs) > 1:
        raise ValueError(f"inhomogeneous element: degrees {sorted(degs)}")
    return degs.pop()


@lru_cache(maxsize=None)
def _normalize_monomial(a: int, b: int, tau_counts: tuple[int, ...], xis: tuple[int, ...]) -> MilnorElement:
    """Rewrite tau_k^2 = tau xi_{k+1} + rho tau_{k+1} + rho tau_0 xi_{k+1}.

    tau_counts[k] is the multiplicity of tau_k; the rewrite strictly
    lowers the total tau count, so this terminates.
    """
    for k, c in enumerate(tau_counts):
        if c >= 2:
            rest = list(tau_counts)
            rest[k] -= 2
            while rest and rest[-1] == 0:
                rest.pop()
            rest_t = tuple(rest)
            out: set[MilnorMonomial] = set()
            # tau * xi_{k+1}
            for m in _normalize_monomial(a, b + 1, rest_t, _xis_set(xis, k, 1)):
                out ^= {m}
            # rho * tau_{k+1}
            bumped = list(rest_t) + [0] * max(0, k + 2 - len(rest_t))
            bumped[k + 1] += 1
            for m in _normalize_monomial(a + 1, b, tuple(bumped), xis):
                out ^= {m}
            # rho * tau_0 * xi_{k+1}
            bumped0 = list(rest_t) + [0] * max(0, 1 - len(rest_t))
            bumped0[0] += 1
            for m in _normalize_monomial(a + 1, b, tuple(bumped0), _xis_set(xis, k, 1)):
                out ^= {m}
            return frozenset(out)
    mask = 0
    for k, c in enumerate(tau_counts):
        if c:
            mask |= 1 << k
    return frozenset({MilnorMonomial(a, b, mask, xis)})


def mono_mul(x: MilnorMonomial, y: MilnorMonomial) -> MilnorElement:
    """Product of two monomials, in canonical form."""
    n = max(x.taus.bit_length(), y.taus.bit_length())
    counts = tuple(((x.taus >> k) & 1) + ((y.taus >> k) & 1) for k in range(n))
    while counts and counts[-1] == 0:
        counts = counts[:-1]
    xis = list(x.xis) + [0] * max(0, len(y.xis) - len(x.xis))
    for i, r in enumerate(y.xis):
        xis[i] += r
    while xis and xis[-1] == 0:
        xis.pop()
    return _normalize_monomial(x.a + y.a, x.b + y.b, counts, tuple(xis))


def multiply(x: MilnorElement, y: MilnorElement) -> MilnorElement:
    out: set[MilnorMonomial] = set()
    for mx in x:
        for my in y:
            out ^= mono_mul(mx, my)
    return frozenset(out)


def coeff_monomial(a: int, b: int) -> MilnorMonomial:
    return MilnorMonomial(a, b, 0, ())


def right_unit(a: int, b: int) -> MilnorElement:
    """eta_R(rho^a tau^b) = rho^a (tau + rho tau_0)^b, canonical form."""
    acc: MilnorElement = frozenset({coeff_monomial(a, 0)})
    tau_term = frozenset({coeff_monomial(0, 1), MilnorMonomial(1, 0, 1, ())})
    for _ in range(b):
        acc = multiply(acc, tau_term)
    return acc


def right_unit_element(p: MilnorElement) -> MilnorElement:
    """eta_R on a polynomial in rho, tau (each term a pure coefficient)."""
    out: set[MilnorMonomial] = set()
    for m in p:
        if not m.is_coefficient():
            raise ValueError(f"eta_R input must be a coefficient polynomial, got {m}")
        out ^= right_unit(m.a, m.b)
    return frozenset(out)


# --- Coproduct ------------------------------------------------------------
#
# A tensor is a frozenset of (left element monomial, right reduced monomial)
# pairs; all coefficients live on the left factor.  normalize_pair slides a
# right-factor coefficient across the tensor sign via eta_R.

Tensor = frozenset  # of (MilnorMonomial, MilnorMonomial) pairs


def normalize_pairs(pairs: Iterable[tuple[MilnorMonomial, MilnorMonomial]]) -> Tensor:
    out: set[tuple[MilnorMonomial, MilnorMonomial]] = set()
    for left, right in pairs:
        if right.a or right.b:
            coeff = right.coefficient_part()
            stripped = right.strip_coefficient()
            for lm in multiply(frozenset({left}), right_unit(coeff.a, coeff.b)):
                for p in normalize_pairs([(lm, stripped)]):
                    out ^= {p}
        else:
            out ^= {(left, right)}
    return frozenset(out)


def tensor_mul(t1: Tensor, t2: Tensor) -> Tensor:
    out: set[tuple[MilnorMonomial, MilnorMonomial]] = set()
    for l1, r1 in t1:
        for l2, r2 in t2:
            for lm in mono_mul(l1, l2):
                for rm in mono_mul(r1, r2):
                    for p in normalize_pairs([(lm, rm)]):
                        out ^= {p}
    return frozenset(out)


_UNIT = MilnorMonomial()


@lru_cache(maxsize=None)
def _coproduct_tau(k: int) -> Tensor:
    pairs = [(MilnorMonomial(0, 0, 1 << k, ()), _UNIT)]
    for i in range(k + 1):
        left = _UNIT if i == k else MilnorMonomial(0, 0, 0, _xis_set((), k - i - 1, 1 << i))
        pairs.append((left, MilnorMonomial(0, 0, 1 << i, ())))
    return frozenset(pairs)


@lru_cache(maxsize=None)
def _coproduct_xi(k: int, exp: int) -> Tensor:
    """Delta(xi_k^exp); Delta(xi_k) = sum xi_{k-i}^{2^i} (x) xi_i."""
    pairs = []
    for i in range(k + 1):
        left = _UNIT if i == k else MilnorMonomial(0, 0, 0, _xis_set((), k - i - 1, 1 << i))
        right = _UNIT if i == 0 else MilnorMonomial(0, 0, 0, _xis_set((), i - 1, 1))
        pairs.append((left, right))
    acc = frozenset(pairs)
    out: Tensor = frozenset({(_UNIT, _UNIT)})
    for _ in range(exp):
        out = tensor_mul(out, acc)
    return out


@lru_cache(maxsize=None)
def coproduct(m: MilnorMonomial) -> Tensor:
    """Full coproduct, multiplicative over factors, coefficients left.

    Delta is left-M2-linear, so the coefficient rho^a tau^b of m joins
    the left factor unchanged.
    """
    acc: Tensor = frozenset({(m.coefficient_part(), _UNIT)})
    e = m.taus
    i = 0
    while e:
        if e & 1:
            acc = tensor_mul(acc, _coproduct_tau(i))
        e >>= 1
        i += 1
    for i, r in enumerate(m.xis):
        if r:
            acc = tensor_mul(acc, _coproduct_xi(i + 1, r))
    return acc


@lru_cache(maxsize=None)
def reduced_coproduct(m: MilnorMonomial) -> Tensor:
    """Coproduct with both components constant-free (coideal part).

    Pairs whose left or right reduced part is constant are dropped; this
    is the coproduct of the quotient coalgebra A/M2 used by the reduced
    cobar complex.
    """
    if m.a or m.b:
        raise ValueError("reduced coproduct expects a coefficient-free monomial")
    return frozenset(
        (left, right)
        for left, right in coproduct(m)
        if not left.is_coefficient() and not right.is_coefficient()
    )


def specialize_monomial(m: MilnorMonomial, base: str) -> MilnorMonomial | None:
    """Project to the C-motivic (rho=0) or classical (rho=0, tau=1) algebra."""
    if base == "R":
        return m
    if m.a > 0:
        return None
    if base == "C":
        return m
    if base == "classical":
        return MilnorMonomial(0, 0, m.taus, m.xis)
    raise ValueError(f"unknown base {base!r}")


def specialize(x: MilnorElement, base: str) -> MilnorElement:
    out: set[MilnorMonomial] = set()
    for m in x:
        sm = specialize_monomial(m, base)
        if sm is not None:
            if sm in out:
                out.discard(sm)
            else:
                out.add(sm)
    return frozenset(out)
