"""Cross-validation of the bundled Ext_C dataset against the cobar oracle.

Compares, tridegree by tridegree, the number of dataset basis elements
(tau^b * canonical monomial) with the brute-force cobar Ext dimension.
Cells whose cobar complex is too large for desk-scale checking are
skipped and reported as uncovered; everything else must match exactly.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from . import extc
from .cobar import CobarContext, factor_tuples
from .steenrod import TriDegree


def dataset_dimensions(max_coweight: int = 14) -> dict[TriDegree, list[str]]:
    """All dataset basis elements grouped by tridegree."""
    cells: dict[TriDegree, list[str]] = {}
    for m in extc.canonical_monomials_in_range():
        order = extc.tau_order(m)
        d = extc.mono_degree(m)
        b = 0
        while order is None or b < order:
            t = TriDegree(d.s, d.f, d.w - b)
            if t.coweight > max_coweight:
                break
            if extc.reduce_monomial(b, m):
                cells.setdefault(t, []).append(str(extc.BasisElt(b, m)))
            b += 1
    return cells


def cobar_cost(t: TriDegree) -> int:
    """Estimated basis size of the C-motivic cobar complex at t."""
    s, f, w = t
    c = s - w
    if f == 0:
        return 1
    total = 0
    for b in range(c + 1):
        g = c + f - b
        if g < f:
            continue
        total += sum(1 for _ in factor_tuples(g, f, s + f, s + f))
    return total


@dataclass
class OracleCheckReport:
    checked: int = 0
    skipped: list = field(default_factory=list)
    mismatches: list = field(default_factory=list)
    seconds: float = 0.0

    def ok(self) -> bool:
        return not self.mismatches


def check_against_oracle(
    max_coweight: int = 13,
    max_f: int = 7,
    max_stem: int = 34,
    cost_limit: int = 60_000,
    verbose: bool = False,
) -> OracleCheckReport:
    """Compare dataset dimensions with oracle Ext_C dimensions.

    The comparison must cover every cell in the window; cells exceeding
    cost_limit are recorded as skipped (uncovered), not failures.
    """
    t0 = time.time()
    ctx = CobarContext("C")
    cells = dataset_dimensions(max_coweight)
    report = OracleCheckReport()
    for s in range(0, max_stem + 1):
        for cw in range(0, max_coweight + 1):
            w = s - cw
            for f in range(0, max_f + 1):
                t = TriDegree(s, f, w)
                want = len(cells.get(t, []))
                # skip cells where both sides are structurally empty
                if want == 0 and (cw + f > extc.RANGE_SLICE or s > extc.RANGE_STEM):
                    continue
                cost = cobar_cost(t) + cobar_cost(TriDegree(s + 1, f - 1, w)) + cobar_cost(
                    TriDegree(s - 1, f + 1, w)
                )
                if cost > cost_limit:
                    report.skipped.append((t, cost))
                    continue
                got = ctx.ext_dimension(t)
                report.checked += 1
                if got != want:
                    report.mismatches.append((t, got, want, cells.get(t, [])))
                    if verbose:
                        print(f"MISMATCH {t}: oracle {got}, dataset {want} {cells.get(t, [])}", flush=True)
    report.seconds = time.time() - t0
    return report
