"""Assemble Ext_R from the rho-Bockstein E-infinity page.

The presentation carries the surviving lines with their rho-torsions,
the multiplicative structure (E-infinity products plus the hidden h0/h1
extensions and the ad-hoc hidden/relation facts), and the comparison
maps to Ext_C.  This is the Adams E2-page used downstream.

A product of classes is evaluated as: reduce the underlying Ext_C[rho]
product; if the resulting line is alive at the needed rho power the
product is visible; if it dies but a hidden-extension fact covers the
pair, the hidden value (one rho-filtration jump or more) is used;
otherwise the product is zero (or unknown if it leaves the dataset).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from . import extc
from .bockstein import BocksteinEngine, Key
from .facts import Fact, Ledger, parse_ext_expr
from .steenrod import TriDegree

INF = None


@dataclass(frozen=True)
class ExtClass:
    """rho^k times a named E-infinity line; the F2-basis of Ext_R."""

    rho: int
    line: Key

    def __str__(self) -> str:
        if self.rho == 0:
            return str(self.line)
        p = "rho" if self.rho == 1 else f"rho^{self.rho}"
        return f"{p} {self.line}"


class ExtPresentation:
    def __init__(self, engine: BocksteinEngine, ledger: Ledger):
        self.engine = engine
        self.coweight_limit = engine.cw_limit - 1  # torsion certified below the line limit
        # line -> torsion (INF for masked; None-as-undetermined excluded)
        self.torsion: dict[Key, int | None] = {}
        self.undetermined: set[Key] = set()
        for key, st in engine.states.items():
            if st.status == "masked":
                self.torsion[key] = INF
            elif st.status == "target":
                self.torsion[key] = st.r
            elif st.status == "boundary":
                self.torsion[key] = INF
                self.undetermined.add(key)
        # hidden extension facts, keyed by (multiplier expr text, source line)
        self.hidden: dict[tuple[str, Key], tuple[int, Key]] = {}
        self.relations: list[Fact] = []
        for f in ledger.by_kind("hidden-ext"):
            mult = f.payload["multiplier"]
            if mult in ("rho", "h", "eta"):
                continue  # homotopy-level extensions live in the Adams stage
            src = self._expr_line(f.payload["source"])
            tgt_rho, tgt = self._expr_class(f.payload["target"])
            if src is None or tgt is None:
                raise ValueError(f"hidden-ext endpoints not single lines: {f.line()}")
            mult_nominal = extc.el_mul(
                self._expr_element(parse_ext_expr(mult)),
                frozenset({src}),
            )
            if mult_nominal:
                only = next(iter(mult_nominal))
                if self.alive(ExtClass(0, only)):
                    raise ValueError(
                        f"hidden extension {f.line()} but the nominal product is alive"
                    )
            if mult == "h0":
                # target of a hidden h0 extension cannot support rho
                # multiplication, since rho h0 = 0 in Ext_R
                if self.alive(ExtClass(tgt_rho + 1, tgt)):
                    raise ValueError(
                        f"hidden h0 extension target supports rho multiplication: {f.line()}"
                    )
            self.hidden[(mult, src)] = (tgt_rho, tgt)
        for f in ledger.by_kind("relation"):
            self.relations.append(f)

    # -- expression helpers ---------------------------------------------------

    def _expr_element(self, expr) -> extc.Element | None:
        return extc.el_reduce((b, m) for a, b, m in expr.terms if a == 0)

    def _expr_line(self, expr) -> Key | None:
        el = self._expr_element(expr)
        if el is None or len(el) != 1:
            return None
        return next(iter(el))

    def _expr_class(self, expr) -> tuple[int, Key | None]:
        k = expr.min_rho_exp()
        el = extc.el_reduce((b, m) for a, b, m in expr.terms if a == k)
        if el is None or len(el) != 1:
            return k, None
        return k, next(iter(el))

    # -- structure ------------------------------------------------------------

    def alive(self, c: ExtClass) -> bool:
        t = self.torsion.get(c.line)
        if c.line not in self.torsion:
            return False
        return t is INF or c.rho < t

    def classes_at(self, t: TriDegree, f_cap: int = 40) -> list[ExtClass]:
        out = []
        for line, tor in self.torsion.items():
            d = self.engine.states[line].degree
            if d.f != t.f or d.coweight != t.coweight:
                continue
            k = d.s - t.s
            if k < 0 or (tor is not INF and k >= tor):
                continue
            if d.f <= f_cap:
                out.append(ExtClass(k, line))
        return sorted(out, key=str)

    def product(self, x: ExtClass, y: ExtClass) -> ExtClass | None | str:
        """Product in Ext_R; None = zero, 'unknown' = outside the dataset."""
        el = extc.el_mul(frozenset({x.line}), frozenset({y.line}))
        if el is None:
            return "unknown"
        k = x.rho + y.rho
        if el:
            line = next(iter(el))
            if self.alive(ExtClass(k, line)):
                return ExtClass(k, line)
            hiddens = []
            for (mult, src), (tr, tgt) in self.hidden.items():
                pass
            # fall through to the hidden table below
        # hidden extension by either factor name
        for a, b in ((x, y), (y, x)):
            if a.rho == 0:
                hx = self.hidden.get((str(a.line), b.line))
                if hx is not None:
                    tr, tgt = hx
                    if self.alive(ExtClass(tr + k, tgt)):
                        return ExtClass(tr + k, tgt)
                    return None
        if el == frozenset():
            return None
        return None

    def line_product(self, x: Key, y: Key) -> ExtClass | None | str:
        return self.product(ExtClass(0, x), ExtClass(0, y))

    # -- checks ----------------------------------------------------------------

    def evaluate_expr(self, expr) -> tuple[set[ExtClass], bool]:
        """Evaluate a (sum of) rho^a tau^b monomial expression to E-infinity
        classes; returns (classes, complete) where complete is False when
        some term could not be evaluated inside the dataset."""
        acc: set[ExtClass] = set()
        complete = True
        for a, b, m in expr.terms:
            el = extc.el_reduce([(b, m)])
            if el is None:
                complete = False
                continue
            if not el:
                continue
            line = next(iter(el))
            c = ExtClass(a, line)
            if self.alive(c):
                acc ^= {c}
        return acc, complete

    def relation_check(self, fact: Fact) -> str:
        lhs, lc = self.evaluate_expr(fact.payload["lhs"])
        rhs, rc = self.evaluate_expr(fact.payload["rhs"])
        if not (lc and rc):
            return "inconclusive (gap in partial product table)"
        return "ok" if lhs == rhs else f"violation: {sorted(map(str, lhs))} != {sorted(map(str, rhs))}"

    def check_exactness(self, max_coweight: int = 5, max_stem: int = 10, max_f: int = 10) -> list[dict]:
        """Per tridegree: dim Ext_C = dim coker(rho) + dim ker(rho), with the
        rho action read from the torsion table (exact in the paired model)."""
        from .validate import dataset_dimensions

        cells = dataset_dimensions(max_coweight + 1)
        report = []
        for s in range(0, max_stem + 1):
            for cw in range(0, max_coweight + 1):
                for f in range(0, max_f + 1):
                    t = TriDegree(s, f, s - cw)
                    dim_c = len(cells.get(t, []))
                    # rho into t: from (s+1, f, w+1); ker of rho leaving (s, f, w+1)
                    into = self.classes_at(TriDegree(s + 1, f, s - cw + 1), max_f)
                    at = self.classes_at(t, max_f)
                    image = sum(1 for c in into if self.alive(ExtClass(c.rho + 1, c.line)))
                    out_src = self.classes_at(TriDegree(s, f, s - cw + 1), max_f)
                    ker = sum(1 for c in out_src if not self.alive(ExtClass(c.rho + 1, c.line)))
                    coker = len(at) - image
                    report.append(
                        {
                            "t": t,
                            "dim_C": dim_c,
                            "coker": coker,
                            "ker": ker,
                            "ok": dim_c == coker + ker,
                        }
                    )
        return report

    def to_json(self) -> str:
        doc = {
            "generators": [
                {
                    "name": str(line),
                    "s": self.engine.states[line].degree.s,
                    "f": self.engine.states[line].degree.f,
                    "w": self.engine.states[line].degree.w,
                    "torsion": tor,
                    "undetermined": line in self.undetermined,
                }
                for line, tor in sorted(self.torsion.items(), key=lambda kv: str(kv[0]))
            ],
            "hidden": [
                {"multiplier": mult, "source": str(src), "rho": tr, "target": str(tgt)}
                for (mult, src), (tr, tgt) in sorted(
                    self.hidden.items(), key=lambda kv: (kv[0][0], str(kv[0][1]))
                )
            ],
            "relations": [f.line() for f in self.relations],
        }
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))
