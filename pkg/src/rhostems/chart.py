"""Spectral-sequence page model: tridegraded F2[rho]-modules of named lines.

A page is a collection of rho-lines: each line has an anchor tridegree,
a generator name, and a torsion order r (rho^r * gen = 0; r = None means
rho-periodic).  Page-turning consumes validated differential facts in
the paired-tower model: a differential d_r(x) = rho^r y removes the x
line entirely and truncates the y line to torsion r.

Pages are persistent immutable snapshots; take_homology returns a new
page and records provenance, so the interactive session gets cheap undo
and diffing.  Infinite h1-periodic families are carried as symbolic
family records (anchor + stride + member torsion pattern) rather than
expanded lines.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from .steenrod import TriDegree

INFINITE = None  # torsion value for rho-periodic lines


class PageError(Exception):
    pass


class StaleFactError(PageError):
    """A differential referenced a line that is not live on this page."""


class TorsionRuleError(PageError):
    """A differential violated the rho-torsion-free requirement."""


@dataclass(frozen=True)
class RhoLine:
    """A free or truncated rho-tower anchored at a named generator.

    Occupies tridegrees (s-k, f, w-k) for 0 <= k < torsion
    (all k when torsion is None, i.e. rho-periodic).
    """

    name: str
    anchor: TriDegree
    torsion: int | None = INFINITE
    masked: bool = False  # pinned rho-periodic via the classical mask
    alias_of: tuple[str, ...] = ()  # basis-change: this line is a sum

    def occupies(self, t: TriDegree) -> bool:
        k = self.anchor.s - t.s
        if k < 0 or t.f != self.anchor.f or self.anchor.w - t.w != k:
            return False
        return self.torsion is INFINITE or k < self.torsion

    def key(self) -> tuple:
        return (self.anchor.coweight, self.anchor.s, self.anchor.f, self.name)


@dataclass(frozen=True)
class FamilyLine:
    """Symbolic h1-periodic family: lines anchor + j*stride for j >= start.

    torsion_pattern[j % len(torsion_pattern)] gives the member torsion
    (None entries mean rho-periodic members, e.g. the masked h1 towers).
    """

    name: str  # e.g. "h1^j" or "h1^j c0"
    anchor: TriDegree  # degree of the j = start member
    stride: TriDegree
    start: int
    torsion_pattern: tuple[int | None, ...]
    masked: bool = False

    def member_anchor(self, j: int) -> TriDegree:
        k = j - self.start
        return TriDegree(
            self.anchor.s + k * self.stride.s,
            self.anchor.f + k * self.stride.f,
            self.anchor.w + k * self.stride.w,
        )

    def member_torsion(self, j: int) -> int | None:
        return self.torsion_pattern[(j - self.start) % len(self.torsion_pattern)]


@dataclass(frozen=True)
class Page:
    """One spectral-sequence page; immutable snapshot."""

    sequence: str  # "bockstein" | "adams"
    r: int
    lines: tuple[RhoLine, ...]
    families: tuple[FamilyLine, ...] = ()
    products: tuple[tuple[str, str, str], ...] = ()  # (gen, gen, expression)
    provenance: tuple[str, ...] = ()

    def line_map(self) -> dict[str, RhoLine]:
        return {ln.name: ln for ln in self.lines}

    def live(self, name: str) -> bool:
        return name in self.line_map()


def take_homology(page: Page, diffs: list) -> Page:
    """Apply validated differentials ``(source, target, r)`` (names + page).

    Every differential must connect live lines; the source line is
    removed, the target torsion becomes min(current, r).  The rho-torsion
    rule is enforced: on the page where the differential fires, neither
    endpoint may already be truncated below what the differential needs.
    """
    lines = {ln.name: ln for ln in page.lines}
    prov = list(page.provenance)
    for source, target, r in diffs:
        if source not in lines or target not in lines:
            missing = source if source not in lines else target
            raise StaleFactError(f"line {missing!r} is not live on page r={page.r}")
        src, tgt = lines[source], lines[target]
        if src.torsion is not INFINITE and src.torsion < r:
            raise TorsionRuleError(
                f"source {source} has torsion {src.torsion} < r={r}; "
                "differential source must be rho-torsion free on its page"
            )
        if tgt.torsion is not INFINITE and tgt.torsion < r:
            raise TorsionRuleError(
                f"target {target} has torsion {tgt.torsion} < r={r}; "
                "rho^r * target is already dead on this page"
            )
        if tgt.masked or src.masked:
            raise TorsionRuleError(
                f"differential {source} -> {target} touches a masked rho-periodic line"
            )
        del lines[source]
        lines[target] = replace(tgt, torsion=r)
        prov.append(f"d{r}:{source}->{target}")
    survivors = tuple(sorted(lines.values(), key=RhoLine.key))
    prods = tuple(
        (x, y, e)
        for (x, y, e) in page.products
        if x in lines and y in lines
    )
    return Page(page.sequence, page.r + 1, survivors, page.families, prods, tuple(prov))


def query(page: Page, coweight=None, stem=None, filtration=None, expand_families_to_f: int = 40):
    """Lines (with torsion) whose anchor passes the given range filters.

    Filters are (lo, hi) pairs or None.  Families are expanded up to the
    given filtration bound so the output is finite.  Deterministic order
    (coweight, s, f, name).
    """

    def in_range(val, rng):
        return rng is None or (rng[0] <= val <= rng[1])

    out = []
    for ln in page.lines:
        t = ln.anchor
        if in_range(t.coweight, coweight) and in_range(t.s, stem) and in_range(t.f, filtration):
            out.append((t, ln.name, ln.torsion, ln.masked))
    for fam in page.families:
        j = fam.start
        while True:
            t = fam.member_anchor(j)
            if t.f > expand_families_to_f:
                break
            if in_range(t.coweight, coweight) and in_range(t.s, stem) and in_range(t.f, filtration):
                out.append((t, fam.name.replace("^j", f"^{j}"), fam.member_torsion(j), fam.masked))
            j += 1
    out.sort(key=lambda row: (row[0].coweight, row[0].s, row[0].f, row[1]))
    return out


def page_to_json(page: Page) -> str:
    """Stable-key JSON serialization of a page."""
    doc = {
        "sequence": page.sequence,
        "r": page.r,
        "lines": [
            {
                "name": ln.name,
                "s": ln.anchor.s,
                "f": ln.anchor.f,
                "w": ln.anchor.w,
                "torsion": ln.torsion,
                "masked": ln.masked,
            }
            for ln in sorted(page.lines, key=RhoLine.key)
        ],
        "families": [
            {
                "name": fam.name,
                "s": fam.anchor.s,
                "f": fam.anchor.f,
                "w": fam.anchor.w,
                "stride": list(fam.stride),
                "start": fam.start,
                "torsion_pattern": list(fam.torsion_pattern),
                "masked": fam.masked,
            }
            for fam in sorted(page.families, key=lambda x: (x.anchor, x.name))
        ],
        "products": [list(p) for p in sorted(page.products)],
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def page_from_json(text: str) -> Page:
    doc = json.loads(text)
    lines = tuple(
        RhoLine(
            d["name"],
            TriDegree(d["s"], d["f"], d["w"]),
            d["torsion"],
            d.get("masked", False),
        )
        for d in doc["lines"]
    )
    families = tuple(
        FamilyLine(
            d["name"],
            TriDegree(d["s"], d["f"], d["w"]),
            TriDegree(*d["stride"]),
            d["start"],
            tuple(d["torsion_pattern"]),
            d.get("masked", False),
        )
        for d in doc.get("families", ())
    )
    products = tuple(tuple(p) for p in doc.get("products", ()))
    return Page(doc["sequence"], doc["r"], lines, families, products)
