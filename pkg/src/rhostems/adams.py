"""The R-motivic Adams spectral sequence from E2 = Ext_R.

Differentials act on E-infinity lines of the rho-Bockstein (rho-linearly
on their rho-multiples, with torsion projection).  d2 and d3 values come
from the fact tables plus Leibniz closure over line factorizations; on
all other multiplicative generators the differentials vanish through
the computed coweight range, and the engine certifies that no candidate
d_r (r >= 4) source/target pairs remain, so E4 = E-infinity there.

The homotopy reconstruction reads pi_{s,w} off the E-infinity classes at
(s,w), with 2/eta/rho-structure from products, the hidden rho/h/eta
extension tables, and 2 = h + rho eta.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import extc
from .assembler import ExtClass, ExtPresentation
from .bockstein import Key
from .facts import Fact, Ledger
from .steenrod import TriDegree

INF = None


class AdamsError(Exception):
    pass


@dataclass
class AdamsState:
    presentation: ExtPresentation
    # line -> (r, value class or None) for r = 2, 3; absence = no fact yet
    diff: dict[tuple[Key, int], ExtClass | None] = field(default_factory=dict)
    pinned: set[Key] = field(default_factory=set)  # permanent cycles
    dead: dict[ExtClass, int] = field(default_factory=dict)  # class -> page killed
    report: list[str] = field(default_factory=list)


def _expr_class(pres: ExtPresentation, expr) -> ExtClass | None:
    k = expr.min_rho_exp() if expr.terms else 0
    el = extc.el_reduce((b, m) for a, b, m in expr.terms if a == k)
    if el is None or len(el) != 1:
        return None
    return ExtClass(k, next(iter(el)))


def _sum_classes(pres: ExtPresentation, expr) -> set[ExtClass] | None:
    acc: set[ExtClass] = set()
    for a, b, m in expr.terms:
        el = extc.el_reduce([(b, m)])
        if el is None:
            return None
        if not el:
            continue
        c = ExtClass(a, next(iter(el)))
        if pres.alive(c):
            acc ^= {c}
    return acc


class AdamsEngine:
    def __init__(self, pres: ExtPresentation, ledger: Ledger, coweight_limit: int = 12):
        self.pres = pres
        self.cw_limit = coweight_limit
        self.f_cap = 22
        self.d2: dict[Key, set[ExtClass]] = {}
        self.d3: dict[Key, set[ExtClass]] = {}
        self.pinned: set[Key] = set()
        self.dead2: set[ExtClass] = set()
        self.dead3: set[ExtClass] = set()
        self.report: list[str] = []
        self.ledger = ledger
        self._ingest(ledger)

    # -- ingestion -------------------------------------------------------------

    def _ingest(self, ledger: Ledger):
        for f in ledger.by_kind("permanent-cycle"):
            line = self._line(f.payload["element"])
            if line is None:
                raise AdamsError(f"permanent cycle is not a single line: {f.line()}")
            self.pinned.add(line)
        for f in ledger.by_kind("adams-diff"):
            r = f.payload["r"]
            src = self._line(f.payload["source"])
            if src is None:
                raise AdamsError(f"adams fact source not a single class: {f.line()}")
            val = _sum_classes(self.pres, f.payload["target"])
            if val is None:
                raise AdamsError(f"adams fact target outside dataset: {f.line()}")
            if src in self.pinned:
                raise AdamsError(
                    f"contradiction: {f.line()} differentiates a pinned permanent cycle"
                )
            table = self.d2 if r == 2 else self.d3
            table[src] = val

    def _line(self, expr) -> Key | None:
        c = _expr_class(self.pres, expr)
        if c is None or c.rho != 0:
            return c.line if c is not None and c.rho == 0 else None
        return c.line

    # -- differentials on lines --------------------------------------------------

    def lines(self) -> list[Key]:
        return sorted(
            (
                k
                for k, tor in self.pres.torsion.items()
                if self.pres.engine.states[k].degree.coweight <= self.cw_limit + 1
                and self.pres.engine.states[k].degree.f <= self.f_cap
            ),
            key=str,
        )

    def derive_d2(self):
        """Leibniz closure of d2 over line factorizations.

        Any line that is a product of two live lines inherits
        d2(xy) = d2(x) y + x d2(y); remaining lines are multiplicative
        generators where the table is complete (zero if unlisted).
        """
        lines = self.lines()
        live = set(lines)
        changed = True
        while changed:
            changed = False
            for z in lines:
                if z in self.d2:
                    continue
                fact = self._factor(z, live)
                if fact is None:
                    continue
                x, y = fact
                if not (x in self.d2 or self._generator_zero(x)) or not (
                    y in self.d2 or self._generator_zero(y)
                ):
                    continue
                val = self._leibniz_value(x, y, self.d2)
                if val is None:
                    continue
                self.d2[z] = val
                changed = True
        # unlisted lines are generators with zero differential by the
        # vanishing theorem; record explicitly for the report
        for z in lines:
            self.d2.setdefault(z, set())

    def _generator_zero(self, x: Key) -> bool:
        # pinned permanent cycles and mask lines never support differentials
        return x in self.d2 or x in self.pinned

    def _factor(self, z: Key, live: set[Key]) -> tuple[Key, Key] | None:
        """One factorization of z into two live lines, canonical choice."""
        zb, zm = z.b, dict(z.m)
        # split off the smallest atom
        for name, exp in sorted(zm.items()):
            for b1 in range(zb + 1):
                a = extc.BasisElt(b1, extc.mono((name, 1)))
                rest_m = dict(zm)
                rest_m[name] -= 1
                rest = extc.BasisElt(zb - b1, extc.mono_from_dict(rest_m))
                if a == z or not rest.m and rest.b == 0:
                    continue
                if a in live and rest in live:
                    # the product must reduce back to z
                    el = extc.el_mul(frozenset({a}), frozenset({rest}))
                    if el and len(el) == 1 and next(iter(el)) == z:
                        return a, rest
        # pure tau-power split for lines like tau^b * m with tau^b live
        if zb and zm:
            a = extc.BasisElt(zb, ())
            rest = extc.BasisElt(0, z.m)
            if a in live and rest in live:
                el = extc.el_mul(frozenset({a}), frozenset({rest}))
                if el and len(el) == 1 and next(iter(el)) == z:
                    return a, rest
        return None

    def _leibniz_value(self, x: Key, y: Key, table: dict) -> set[ExtClass] | None:
        acc: set[ExtClass] = set()
        for u, v in ((x, y), (y, x)):
            for c in table.get(u, set()):
                prod = self.pres.product(c, ExtClass(0, v))
                if prod == "unknown":
                    return None
                if isinstance(prod, ExtClass) and self.pres.alive(prod):
                    acc ^= {prod}
        return acc

    # -- running the pages ---------------------------------------------------------

    def run(self):
        self.derive_d2()
        # apply d2 on all rho-multiples with torsion projection
        for z, val in sorted(self.d2.items(), key=lambda kv: str(kv[0])):
            if not val:
                continue
            if z in self.pinned:
                raise AdamsError(
                    f"contradiction: derived d2({z}) != 0 but {z} is pinned "
                    f"as a permanent cycle (fact citations conflict)"
                )
            tor = self.pres.torsion.get(z)
            k = 0
            while tor is INF or k < tor:
                vk = {ExtClass(c.rho + k, c.line) for c in val}
                vk = {c for c in vk if self.pres.alive(c)}
                if vk:
                    if len(vk) == 1:
                        tgt = next(iter(vk))
                        self.dead2.add(ExtClass(k, z))
                        self.dead2.add(tgt)
                    else:
                        # target is a sum: kill source and mark the sum's
                        # lexicographically first member (basis change)
                        tgt = sorted(vk, key=str)[0]
                        self.dead2.add(ExtClass(k, z))
                        self.dead2.add(tgt)
                        self.report.append(
                            f"d2(rho^{k} {z}) hits the sum {sorted(map(str, vk))}; "
                            f"basis changed to eliminate {tgt}"
                        )
                k += 1
                if tor is INF and k > 40:
                    break
        # d3 on E3
        for z, val in sorted(self.d3.items(), key=lambda kv: str(kv[0])):
            if z in self.pinned:
                raise AdamsError(f"d3 fact differentiates pinned cycle {z}")
            tor = self.pres.torsion.get(z)
            k = 0
            while tor is INF or k < tor:
                if ExtClass(k, z) in self.dead2:
                    k += 1
                    continue
                vk = {ExtClass(c.rho + k, c.line) for c in val}
                vk = {c for c in vk if self.pres.alive(c) and c not in self.dead2}
                if vk:
                    tgt = sorted(vk, key=str)[0]
                    self.dead3.add(ExtClass(k, z))
                    self.dead3.add(tgt)
                    if len(vk) > 1:
                        self.report.append(
                            f"d3(rho^{k} {z}) hits the sum {sorted(map(str, vk))}; "
                            f"basis changed to eliminate {tgt}"
                        )
                k += 1
                if tor is INF and k > 40:
                    break

    def alive_einfty(self, c: ExtClass) -> bool:
        return self.pres.alive(c) and c not in self.dead2 and c not in self.dead3

    def classes_at(self, s: int, w: int, f_cap: int | None = None) -> list[tuple[int, ExtClass]]:
        """Live E-infinity classes at (s,w) as (filtration, class) pairs."""
        cap = f_cap if f_cap is not None else self.f_cap
        out = []
        for line, tor in self.pres.torsion.items():
            d = self.pres.engine.states[line].degree
            k = d.s - s
            if k < 0 or d.w - k != w or d.f > cap:
                continue
            if tor is not INF and k >= tor:
                continue
            c = ExtClass(k, line)
            if self.alive_einfty(c):
                out.append((d.f, c))
        return sorted(out, key=lambda fc: (fc[0], str(fc[1])))

    def certify_e4_is_einfty(self) -> list[str]:
        """List every degree-admissible candidate d_r (r >= 4) between live
        classes through the coweight limit; empty means E4 = E-infinity."""
        by_deg: dict[TriDegree, list[ExtClass]] = {}
        for line, tor in self.pres.torsion.items():
            d = self.pres.engine.states[line].degree
            if d.coweight > self.cw_limit or d.f > self.f_cap:
                continue
            kmax = (tor - 1) if tor is not INF else min(self.f_cap - 0, 30)
            for k in range(0, kmax + 1):
                c = ExtClass(k, line)
                if self.alive_einfty(c):
                    by_deg.setdefault(TriDegree(d.s - k, d.f, d.w - k), []).append(c)
        candidates = []
        for t, classes in sorted(by_deg.items()):
            for r in range(4, self.f_cap + 1):
                t2 = TriDegree(t.s - 1, t.f + r, t.w)
                for y in by_deg.get(t2, ()):
                    for x in classes:
                        if x.line in self.pinned:
                            continue
                        candidates.append(
                            f"candidate d{r}: {x} at {t} -> {y} at {t2}"
                        )
        return candidates
