"""The rho-Bockstein engine: from Ext_C[rho] to Ext_R.

Implements the slice strategy end to end: build the E1-page lines
tau^b * m over the bundled Ext_C dataset, pin the rho-periodic classes
given by the classical mask, commit the seeded differentials, close
under the Leibniz rule, and force the remaining pairings slice by slice
(N = s + f - w is constant along differentials, so each slice resolves
independently once products are known).

Every line (coweight <= limit) ends in exactly one state:

    masked         pinned rho-periodic (classical-mask image), torsion oo
    source         supports d_r; the line dies at its page
    target         hit by d_r; survives with torsion r (a permanent cycle)
    boundary       coweight = limit and neither of the above: it must be
                   hit from coweight limit+1, outside the computed range,
                   so its torsion is finite but undetermined here

Anything else is unresolved, which the acceptance run requires to be
empty.  Runs are deterministic: all iteration orders are canonical, so
two runs over the same ledger produce identical reports byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import extc
from .chart import FamilyLine, Page, RhoLine
from .facts import Fact, Ledger
from .steenrod import TriDegree

Key = extc.BasisElt


class EngineError(Exception):
    pass


class ContradictionError(EngineError):
    """A fact targets a dead line or violates the torsion rule."""


class StaleClaim(EngineError):
    """An eager Leibniz claim is invalidated by a lower-page differential
    derived later; the run restarts with the claim suppressed."""

    def __init__(self, claim: tuple, new: tuple | None = None):
        self.claim = claim
        self.new = new
        super().__init__(f"stale claim {claim} (invalidated by {new})")


@dataclass
class LineState:
    key: Key
    degree: TriDegree
    status: str = "unresolved"  # unresolved|masked|source|target|boundary
    r: int | None = None
    partner: Key | None = None
    zero_through: int = 0  # d_t known zero for t <= zero_through
    must_survive: bool = False  # product of permanent cycles
    technique: str = ""
    justification: str = ""

    @property
    def slice_n(self) -> int:
        return self.degree.coweight + self.degree.f

    def alive_on_page(self, r: int) -> bool:
        """Line not yet removed at page r (sources die at their page)."""
        if self.status == "source":
            return r <= self.r
        return True

    def permanent(self) -> bool:
        return self.status in ("masked", "target", "boundary")

    def d_known_zero_at(self, r: int) -> bool:
        if self.permanent():
            return True
        if self.status == "source":
            return r < self.r
        return r <= self.zero_through


@dataclass
class AppliedDiff:
    source: Key
    r: int
    target: Key
    technique: str
    provenance: str
    justification: str = ""

    def sort_key(self):
        st = extc.mono_degree(self.source.m)
        n = (st.s - st.w - self.source.b) + st.f
        return (n, self.r, str(self.source))


class BocksteinEngine:
    def __init__(self, coweight_limit: int = 13, f_limit: int = 15, suppressed: frozenset = frozenset()):
        if coweight_limit > extc.RANGE_COWEIGHT:
            raise EngineError(
                f"Ext_C dataset covers coweight <= {extc.RANGE_COWEIGHT}; "
                f"requested {coweight_limit} (range error)"
            )
        self.cw_limit = coweight_limit
        self.n_max = coweight_limit + f_limit
        if self.n_max > extc.RANGE_SLICE - 1:
            raise EngineError(
                f"slice bound {self.n_max} beyond dataset slices <= {extc.RANGE_SLICE - 1}"
            )
        self.suppressed = suppressed
        self.states: dict[Key, LineState] = {}
        self.applied: list[AppliedDiff] = []
        self.deferred: list[str] = []
        self.reports: list[str] = []
        self._build_e1()
        self._apply_mask()

    # -- construction --------------------------------------------------------

    def _build_e1(self):
        for m in extc.canonical_monomials_in_range():
            order = extc.tau_order(m)
            d = extc.mono_degree(m)
            b = 0
            while order is None or b < order:
                t = TriDegree(d.s, d.f, d.w - b)
                if t.coweight > self.cw_limit:
                    break
                if t.coweight + t.f <= self.n_max and extc.reduce_monomial(b, m):
                    key = Key(b, m)
                    self.states[key] = LineState(key, t)
                b += 1

    def _apply_mask(self):
        mask_keys = []
        for m in extc.mask_monomials():
            key = Key(0, m)
            if key not in self.states:
                raise EngineError(f"mask element {extc.mono_str(m)} has no E1 line")
            mask_keys.append(key)
        # classical h0^k tower maps to the motivic h1^k tower (k = 0: unit)
        for j in range(0, self.n_max + 1):
            key = Key(0, extc.mono(("h1", j)))
            if key in self.states:
                mask_keys.append(key)
        for key in mask_keys:
            st = self.states[key]
            st.status = "masked"
            st.technique = "mask"
            st.justification = "rho-periodic: classical Ext image under (s,f) -> (2s+f,f,s+f)"

    # -- helpers ---------------------------------------------------------------

    def line_of_element(self, el: extc.Element) -> Key | None:
        """The single basis element of a one-term reduced element."""
        if el is None or len(el) != 1:
            return None
        return next(iter(el))

    def product_line(self, x: Key, y: Key) -> Key | None | str:
        """x*y as a line; None if zero; 'unknown' if out of range."""
        el = extc.el_mul(frozenset({x}), frozenset({y}))
        if el is None:
            return "unknown"
        if not el:
            return None
        assert len(el) == 1, "monomial products must reduce to monomials"
        return next(iter(el))

    # -- committing differentials ----------------------------------------------

    def commit(self, source: Key, r: int, target: Key, technique: str, provenance: str, justification: str = ""):
        ss = self.states.get(source)
        ts = self.states.get(target)
        if ss is None or ts is None:
            missing = source if ss is None else target
            raise ContradictionError(f"differential endpoint {missing} is not an E1 line (stale fact)")
        for st, role in ((ss, "source"), (ts, "target")):
            if st.status == "masked":
                raise ContradictionError(
                    f"d{r}({source}) = rho^{r} {target}: {role} {st.key} is a pinned rho-periodic line"
                )
        if ss.status == "source" or ss.status == "target" or ss.status == "boundary":
            if ss.status == "source" and ss.r == r and ss.partner == target:
                return  # idempotent duplicate
            if ss.status == "source" and ss.r > r:
                raise StaleClaim((ss.key, ss.r, ss.partner))
            raise ContradictionError(
                f"d{r}({source}): source already resolved as {ss.status} "
                f"(r={ss.r}, partner={ss.partner}) — offending fact chain: {provenance}"
            )
        if ts.status != "unresolved":
            if ts.status == "target" and ts.r > r:
                raise StaleClaim((ts.partner, ts.r, ts.key))
            raise ContradictionError(
                f"d{r}({source}) = rho^{r} {target}: target already {ts.status} "
                f"(r={ts.r}, partner={ts.partner}) — offending fact chain: {provenance}"
            )
        if ss.zero_through >= r:
            raise ContradictionError(
                f"d{r}({source}) -> {target}: differential contradicts known d_t = 0 "
                f"through t = {ss.zero_through} ({provenance}; {justification})"
            )
        if ss.must_survive:
            raise ContradictionError(
                f"d{r}({source}): source is a product of permanent cycles ({provenance})"
            )
        want = TriDegree(ss.degree.s - 1, ss.degree.f + 1, ss.degree.w)
        have = TriDegree(ts.degree.s - r, ts.degree.f, ts.degree.w - r)
        if want != have:
            raise ContradictionError(
                f"d{r}({source}) -> {target}: degree mismatch {have} != {want}"
            )
        ss.status, ss.r, ss.partner, ss.technique, ss.justification = (
            "source", r, target, technique, justification,
        )
        ts.status, ts.r, ts.partner, ts.technique = "target", r, source, technique
        self.applied.append(AppliedDiff(source, r, target, technique, provenance, justification))

    # -- fact ingestion ----------------------------------------------------------

    def ingest(self, facts: list[Fact]):
        rows = []
        for f in facts:
            if f.kind != "bockstein-diff":
                continue
            src = extc.el_reduce((b, m) for a, b, m in f.payload["source"].terms if a == 0)
            if src is None or len(src) != 1:
                raise EngineError(f"fact source not a single E1 line: {f.line()}")
            tgt_expr = f.payload["target"].rho_stripped()
            k = f.payload["target"].min_rho_exp()
            if k != f.payload["r"]:
                raise EngineError(
                    f"fact target rho-power {k} != r={f.payload['r']}: {f.line()}"
                )
            tgt = extc.el_reduce((b, m) for a, b, m in tgt_expr.terms)
            if tgt is None or len(tgt) != 1:
                raise EngineError(f"fact target not a single E1 line: {f.line()}")
            rows.append((f.payload["r"], next(iter(src)), next(iter(tgt)), f))
        # commit in increasing page order for well-defined liveness
        rows.sort(key=lambda row: (row[0], str(row[1])))
        for r, src, tgt, f in rows:
            self.commit(src, r, tgt, f.technique, f.provenance, f.note or f.provenance)

    # -- Leibniz closure -----------------------------------------------------------

    def leibniz_round(self, max_r: int) -> int:
        """One pass of d_r(x y) = d_r(x) y + x d_r(y) over known sources.

        Only differentials with r <= max_r are emitted; processing pages
        in increasing order keeps eager target claims sound (a page-r
        claim can only be invalidated by a difference at a page < r,
        which the staging commits first).  Returns the number of state
        changes.
        """
        changes = 0
        sources = sorted(
            (st for st in self.states.values() if st.status == "source" and st.r <= max_r),
            key=lambda st: (st.r, str(st.key)),
        )
        lines = sorted(self.states.values(), key=lambda st: str(st.key))
        for ss in sources:
            r = ss.r
            xbar = ss.partner
            for ys in lines:
                # need y alive on page r with d_r(y) known
                if not ys.alive_on_page(r):
                    continue
                if not (ys.permanent() or (ys.status == "source" and ys.r >= r) or ys.zero_through >= r):
                    continue
                if ys.key == ss.key:
                    # d_r(x^2) = 2 x d_r(x) = 0; the square survives page r
                    z = self.product_line(ss.key, ss.key)
                    if isinstance(z, Key):
                        zs = self.states.get(z)
                        if zs and zs.status == "unresolved" and zs.zero_through < r:
                            zs.zero_through = r
                            changes += 1
                    continue
                z = self.product_line(ss.key, ys.key)
                if z == "unknown":
                    continue
                if z is None:
                    continue
                zs = self.states.get(z)
                if zs is None or zs.status != "unresolved":
                    continue
                # value = xbar * y (+ x * ybar when y dies at the same page)
                v1 = self.product_line(xbar, ys.key)
                if v1 == "unknown":
                    self.deferred.append(
                        f"defer d{r}({z}): product {xbar} * {ys.key} leaves the dataset range"
                    )
                    continue
                terms: dict[Key, int] = {}
                if v1 is not None:
                    terms[v1] = terms.get(v1, 0) ^ 1
                if ys.status == "source" and ys.r == r:
                    v2 = self.product_line(ss.key, ys.partner)
                    if v2 == "unknown":
                        self.deferred.append(
                            f"defer d{r}({z}): product {ss.key} * {ys.partner} leaves the dataset range"
                        )
                        continue
                    if v2 is not None:
                        terms[v2] = terms.get(v2, 0) ^ 1
                live_terms = []
                undecidable = False
                for w, c in sorted(terms.items(), key=lambda kv: str(kv[0])):
                    if not c:
                        continue
                    ws = self.states.get(w)
                    if ws is None:
                        undecidable = True  # value line outside tracked window
                        break
                    # is rho^r * w nonzero on page r?
                    if ws.status == "source":
                        if ws.r < r:
                            continue  # line already dead: term vanishes on E_r
                        if ws.r == r:
                            undecidable = True  # dies this page to another source
                            break
                        live_terms.append(w)
                    elif ws.status == "target":
                        if ws.r <= r:
                            continue  # truncated at or below this page
                        live_terms.append(w)
                    else:
                        # masked, boundary, or unresolved: line is unhit so
                        # far, hence alive through page r; committing below
                        # claims it as the target (contradictions surface
                        # at commit time)
                        live_terms.append(w)
                if undecidable:
                    continue
                if not live_terms:
                    if zs.zero_through < r:
                        zs.zero_through = r
                        changes += 1
                    continue
                if len(live_terms) != 1:
                    self.deferred.append(
                        f"defer d{r}({z}) = sum of {len(live_terms)} lines (basis change needed)"
                    )
                    continue
                w = live_terms[0]
                ws = self.states[w]
                if (z, r, w) in self.suppressed:
                    # a later lower-page differential truncates w, so this
                    # claim's value is zero on its page (learned restart)
                    if zs.zero_through < r:
                        zs.zero_through = r
                        changes += 1
                    continue
                if ws.status in ("masked",):
                    raise ContradictionError(
                        f"Leibniz d{r}({z}) hits masked line {w}"
                    )
                if ws.status == "target" and ws.r > r:
                    # the earlier, higher-page claim was premature: its
                    # value dies on its page once this d_r truncates w
                    raise StaleClaim((ws.partner, ws.r, w), (z, r, w, str(ss.key), str(ys.key)))
                if ws.status == "boundary" or (ws.status == "target" and ws.r != r):
                    raise ContradictionError(
                        f"Leibniz d{r}({z}) = rho^{r} {w} clashes with {ws.status} (r={ws.r})"
                    )
                # also record d_t(z) = 0 for t < r (both factors survive to r)
                if zs.zero_through < r - 1:
                    zs.zero_through = r - 1
                    changes += 1
                self.commit(
                    z, r, w, "leibniz", "leibniz",
                    f"d{r}({ss.key} * {ys.key}) = d{r}({ss.key}) * {ys.key}",
                )
                changes += 1
        # products of permanent cycles are permanent
        perms = [st for st in lines if st.permanent()]
        for i, xs in enumerate(perms):
            for ys in perms[i:]:
                z = self.product_line(xs.key, ys.key)
                if isinstance(z, Key):
                    zs = self.states.get(z)
                    if zs and zs.status == "unresolved" and not zs.must_survive:
                        zs.must_survive = True
                        zs.justification = f"product of permanent cycles {xs.key} * {ys.key}"
                        changes += 1
        return changes

    # -- pairing-force -------------------------------------------------------------

    def candidates(self, z: LineState) -> list[tuple[str, int, Key | None]]:
        """Possible roles for an unresolved line: ('source', r, target) or
        ('target', r, source); coweight-limit lines also get
        ('external', 0, None) for differentials entering from outside."""
        out: list[tuple[str, int, Key | None]] = []
        deg = z.degree
        if not z.must_survive:
            for r in range(max(1, z.zero_through + 1), self.n_max + 2):
                t = TriDegree(deg.s - 1 + r, deg.f + 1, deg.w + r)
                for w in self._lines_at(t):
                    ws = self.states[w]
                    if ws.status == "unresolved" and (z.key, r, w) not in self.suppressed:
                        out.append(("source", r, w))
        for r in range(1, self.n_max + 2):
            t = TriDegree(deg.s - r + 1, deg.f - 1, deg.w - r)
            for v in self._lines_at(t):
                vs = self.states[v]
                if (
                    vs.status == "unresolved"
                    and not vs.must_survive
                    and vs.zero_through < r
                    and (v, r, z.key) not in self.suppressed
                ):
                    out.append(("target", r, v))
        if deg.coweight == self.cw_limit:
            out.append(("external", 0, None))
        return out

    def _line_index(self):
        if not hasattr(self, "_by_degree"):
            self._by_degree: dict[TriDegree, list[Key]] = {}
            for key, st in self.states.items():
                self._by_degree.setdefault(st.degree, []).append(key)
            for v in self._by_degree.values():
                v.sort(key=str)
        return self._by_degree

    def _lines_at(self, t: TriDegree) -> list[Key]:
        return self._line_index().get(t, [])

    def force_round(self, max_r: int, allow_external: bool) -> int:
        changes = 0
        unresolved = sorted(
            (st for st in self.states.values() if st.status == "unresolved"),
            key=lambda st: (st.slice_n, str(st.key)),
        )
        for z in unresolved:
            if z.status != "unresolved":
                continue
            cands = self.candidates(z)
            if len(cands) == 0:
                raise ContradictionError(
                    f"line {z.key} at {z.degree} has no possible differential partner"
                )
            if len(cands) > 1:
                continue
            role, r, other = cands[0]
            excluded = (
                f"unique admissible partner for {z.key} at {z.degree} "
                f"(all other degree-admissible pairings are dead or claimed)"
            )
            if role == "external":
                if not allow_external:
                    continue
                z.status = "boundary"
                z.technique = "boundary"
                z.justification = (
                    "coweight-limit line: must be hit from outside the computed range"
                )
                changes += 1
            elif role == "source":
                if r > max_r:
                    continue
                self.commit(z.key, r, other, "pairing-forced", "strategy", excluded)
                changes += 1
            else:
                if r > max_r:
                    continue
                self.commit(other, r, z.key, "pairing-forced", "strategy", excluded)
                changes += 1
        return changes

    # -- main loop -------------------------------------------------------------------

    def run(self, ledger: Ledger, techniques: tuple[str, ...] | None = None) -> None:
        facts = ledger.by_kind("bockstein-diff")
        if techniques is not None:
            facts = [f for f in facts if f.technique in techniques]
        self.ingest(facts)
        top = self.n_max + 1
        for stage in list(range(1, top + 1)) + [top, top]:
            while True:
                ch = self.leibniz_round(stage)
                ch += self.force_round(stage, allow_external=(stage == top))
                if not ch:
                    break

    def unresolved(self) -> list[LineState]:
        return sorted(
            (st for st in self.states.values() if st.status == "unresolved"),
            key=lambda st: (st.slice_n, str(st.key)),
        )


def run_engine(
    ledger: Ledger,
    techniques: tuple[str, ...] | None = None,
    coweight_limit: int = 13,
    f_limit: int = 15,
    max_restarts: int = 200,
) -> BocksteinEngine:
    """Run the engine, restarting with learned suppressions on stale claims.

    An eager page-r claim can be invalidated when a lower-page
    differential into the same target is derived later; each such event
    identifies one premature claim, which is suppressed (its value is
    zero on its page) and the run replayed.  The loop is deterministic
    and terminates because each restart adds one suppression.
    """
    suppressed: set = set()
    for _ in range(max_restarts):
        eng = BocksteinEngine(coweight_limit, f_limit, frozenset(suppressed))
        try:
            eng.run(ledger, techniques)
            eng.reports.append(f"suppressed stale claims: {len(suppressed)}")
            return eng
        except StaleClaim as sc:
            if sc.claim in suppressed:
                raise EngineError(f"stale claim loop on {sc.claim}")
            suppressed.add(sc.claim)
    raise EngineError("too many stale-claim restarts")

    # -- outputs ------------------------------------------------------------------

    def einfty_page(self) -> Page:
        lines = []
        for key, st in sorted(self.states.items(), key=lambda kv: str(kv[0])):
            if st.status == "source":
                continue
            if st.status == "masked":
                lines.append(RhoLine(str(key), st.degree, None, masked=True))
            elif st.status == "target":
                lines.append(RhoLine(str(key), st.degree, st.r))
            elif st.status == "boundary":
                lines.append(RhoLine(str(key), st.degree, None, masked=False))
        fams = (
            FamilyLine(
                "h1^j",
                TriDegree(self.n_max + 1, self.n_max + 1, self.n_max + 1),
                TriDegree(1, 1, 1),
                self.n_max + 1,
                (None,),
                masked=True,
            ),
        )
        return Page("bockstein", self.n_max + 2, tuple(lines), fams)

    def report_text(self) -> str:
        out = ["# rho-Bockstein run report", ""]
        out.append(f"coweight limit {self.cw_limit}; slices N <= {self.n_max}")
        out.append(f"lines: {len(self.states)}")
        out.append("")
        out.append("## applied differentials")
        for d in sorted(self.applied, key=AppliedDiff.sort_key):
            out.append(
                f"bockstein d {d.r} : {d.source} -> rho^{d.r} {d.target}"
                f"  [technique={d.technique}] {d.justification}"
            )
        out.append("")
        out.append("## boundary lines (coweight-limit, torsion undetermined)")
        for st in sorted(self.states.values(), key=lambda s: str(s.key)):
            if st.status == "boundary":
                out.append(f"{st.key} at {st.degree}")
        out.append("")
        out.append("## unresolved")
        for st in self.unresolved():
            out.append(f"{st.key} at {st.degree} (slice {st.slice_n})")
        out.append("")
        out.append("## deferred products")
        for d in sorted(set(self.deferred)):
            out.append(d)
        return "\n".join(out) + "\n"
