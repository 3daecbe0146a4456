"""The provenance-tagged store of deduction facts.

Machine encoding of the differential/extension/bracket tables consumed
and reproduced by the engines, plus user-entered deductions.  Facts are
line-oriented UTF-8:

    bockstein d 1 : tau -> rho h0 @ prop:6.1 technique=seed
    adams d 2 : h4 -> h0 h3^2 @ table:adams-d2 technique=comparison-classical
    permanent-cycle : tau^2 h2 @ table:perm technique=manual
    hidden h0 : tau h1 -> rho tau h1^2 @ table:Bock-h0-extn technique=manual
    hidden eta : h0^3 h4 -> rho^3 h1^2 e0 @ table:Adams-eta-extn technique=manual
    relation : h1^2 tau^4 h3 + tau^4 h2^3 = rho^5 tau h0 h3^2 @ lem:7.12 technique=manual
    massey : < rho^2 , tau h1 , h2 > = tau^2 h2 ; indet rho^4 h3 @ table:Massey technique=manual
    toda : < rho^2 , tau eta , nu > detected tau^2 h2 @ table:Toda technique=manual
    scalar-extension : rho h4 -> tau h3^2 @ table:R-to-C technique=manual
    pi-element tau sigma^2 : (14,7) detected rho h4 @ table:pi-notation technique=manual

`#` starts a comment; `@` introduces provenance; `technique=` the tag.
Parsing and printing round-trip bit-exactly on canonical lines.

Hidden extensions with multiplier rho/h/eta are homotopy-level (Adams
filtration rules); any other multiplier is an Ext-level (rho-Bockstein
filtration) extension.  Degree checks follow the grading of the two
spectral sequences: Bockstein d_r shifts by (-1,+1,0) with an explicit
rho^r on the target, Adams d_r by (-1,+r,0); n-fold Massey products add
(n-2)*(+1,-1,0), Toda brackets add n-2 to the stem.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field

from . import extc
from .steenrod import TriDegree

TECHNIQUES = (
    "seed",
    "leibniz",
    "pairing-forced",
    "massey",
    "comparison-C",
    "comparison-classical",
    "manual",
)

KINDS = (
    "bockstein-diff",
    "adams-diff",
    "permanent-cycle",
    "hidden-ext",
    "relation",
    "massey",
    "toda",
    "scalar-extension",
    "named-homotopy-element",
)


class FactSyntaxError(ValueError):
    def __init__(self, msg: str, line_no: int | None = None, line: str = ""):
        loc = f"line {line_no}: " if line_no is not None else ""
        super().__init__(f"{loc}{msg}" + (f"  [{line.strip()}]" if line else ""))
        self.line_no = line_no


class FactValidationError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Ext-level expressions: F2 sums of rho^a tau^b (monomial) terms.

@dataclass(frozen=True)
class ExtExpr:
    """Syntactic Ext expression; terms are (rho_exp, tau_exp, monomial)."""

    terms: tuple[tuple[int, int, extc.Monomial], ...]
    text: str

    def degree(self) -> TriDegree:
        degs = set()
        for a, b, m in self.terms:
            d = extc.mono_degree(m)
            degs.add(TriDegree(d.s - a, d.f, d.w - a - b))
        if len(degs) != 1:
            raise FactValidationError(
                f"inhomogeneous expression {self.text!r}: degrees {sorted(degs)}"
            )
        return degs.pop()

    def min_rho_exp(self) -> int:
        return min(a for a, _, _ in self.terms)

    def rho_stripped(self) -> "ExtExpr":
        """Divide out the common rho power."""
        k = self.min_rho_exp()
        return ExtExpr(
            tuple((a - k, b, m) for a, b, m in self.terms),
            " + ".join(term_str(a - k, b, m) for a, b, m in self.terms),
        )

    def __str__(self) -> str:
        return self.text


def term_str(a: int, b: int, m: extc.Monomial) -> str:
    parts = []
    if a == 1:
        parts.append("rho")
    elif a > 1:
        parts.append(f"rho^{a}")
    if b == 1:
        parts.append("tau")
    elif b > 1:
        parts.append(f"tau^{b}")
    if m:
        parts.append(extc.mono_str(m))
    return " ".join(parts) if parts else "1"


def parse_ext_expr(text: str) -> ExtExpr:
    """Parse an Ext-level expression over rho, tau and the generator table."""
    text = " ".join(text.split())
    if text == "0":
        return ExtExpr((), "0")
    terms = []
    for part in text.split("+"):
        a = b = 0
        pairs: list[tuple[str, int]] = []
        for tok in part.split():
            mt = re.fullmatch(r"([A-Za-z][A-Za-z0-9]*)(?:\^(\d+))?", tok)
            if not mt:
                raise FactSyntaxError(f"bad token {tok!r} in {text!r}")
            name, exp = mt.group(1), int(mt.group(2) or 1)
            if name == "rho":
                a += exp
            elif name == "tau":
                b += exp
            else:
                pairs.append((name, exp))
        try:
            b2, pairs2 = extc._absorb_g(b, pairs)
        except ValueError as e:
            raise FactSyntaxError(str(e))
        for name, _ in pairs2:
            if name not in extc.GENERATORS:
                raise FactSyntaxError(f"unknown generator {name!r} in {text!r}")
        terms.append((a, b2, extc.mono(*pairs2)))
    canon = " + ".join(term_str(*t) for t in terms)
    return ExtExpr(tuple(terms), canon)


# ---------------------------------------------------------------------------
# pi-level expressions: products of named homotopy elements.

BUILTIN_PI = {
    # name: (s, w, detector filtration, detector ext expression or None)
    "rho": (-1, -1, 0, "rho"),
    "h": (0, 0, 1, "h0"),
    "eta": (1, 1, 1, "h1"),
    "nu": (3, 2, 1, "h2"),
    "sigma": (7, 4, 1, "h3"),
    "2": (0, 0, None, None),  # 2 = h + rho eta; no single detector
    "4": (0, 0, None, None),
    "8": (0, 0, None, None),
}


@dataclass(frozen=True)
class PiExpr:
    """Product of named pi elements (times powers); may be a brace class."""

    factors: tuple[tuple[str, int], ...]
    text: str

    def degree(self, names: dict[str, tuple[int, int]]) -> tuple[int, int]:
        s = w = 0
        for name, exp in self.factors:
            if name.startswith("{") and name.endswith("}"):
                d = parse_ext_expr(name[1:-1]).degree()
                s += d.s * exp
                w += d.w * exp
                continue
            if name in names:
                ns, nw = names[name]
            elif name in BUILTIN_PI:
                ns, nw = BUILTIN_PI[name][:2]
            else:
                raise FactValidationError(f"unknown pi element {name!r}")
            s += ns * exp
            w += nw * exp
        return (s, w)

    def __str__(self) -> str:
        return self.text


def parse_pi_expr(text: str) -> PiExpr:
    text = " ".join(text.split())
    factors: list[tuple[str, int]] = []
    for tok in re.findall(r"\{[^}]*\}(?:\^\d+)?|\S+", text):
        mt = re.fullmatch(r"(\{[^}]*\}|[A-Za-z0-9_'-]+)(?:\^(\d+))?", tok)
        if not mt:
            raise FactSyntaxError(f"bad pi token {tok!r}")
        factors.append((mt.group(1), int(mt.group(2) or 1)))
    return PiExpr(tuple(factors), text)


# ---------------------------------------------------------------------------
# Facts.

@dataclass(frozen=True)
class Fact:
    kind: str
    payload: dict
    provenance: str
    technique: str
    note: str = ""

    @property
    def id(self) -> str:
        return hashlib.sha1(self.line().encode()).hexdigest()[:12]

    def line(self) -> str:
        body = _format_body(self.kind, self.payload)
        out = f"{body} @ {self.provenance} technique={self.technique}"
        if self.note:
            out += f' note="{self.note}"'
        return out


def _format_body(kind: str, p: dict) -> str:
    if kind == "bockstein-diff":
        return f"bockstein d {p['r']} : {p['source']} -> {p['target']}"
    if kind == "adams-diff":
        return f"adams d {p['r']} : {p['source']} -> {p['target']}"
    if kind == "permanent-cycle":
        return f"permanent-cycle : {p['element']}"
    if kind == "hidden-ext":
        return f"hidden {p['multiplier']} : {p['source']} -> {p['target']}"
    if kind == "relation":
        return f"relation : {p['lhs']} = {p['rhs']}"
    if kind == "massey":
        inputs = " , ".join(str(x) for x in p["inputs"])
        out = f"massey : < {inputs} > = {p['value']}"
        if p.get("indet"):
            out += " ; indet " + " , ".join(str(x) for x in p["indet"])
        return out
    if kind == "toda":
        inputs = " , ".join(str(x) for x in p["inputs"])
        out = f"toda : < {inputs} >"
        if p.get("detected"):
            out += f" detected {p['detected']}"
        return out
    if kind == "scalar-extension":
        return f"scalar-extension : {p['source']} -> {p['target']}"
    if kind == "named-homotopy-element":
        return (
            f"pi-element {p['name']} : ({p['s']},{p['w']}) detected {p['detector']}"
        )
    raise ValueError(f"unknown kind {kind}")


_LINE_RE = re.compile(
    r"^(?P<body>.+?)\s*@\s*(?P<prov>\S+)\s+technique=(?P<tech>[a-zA-Z-]+)"
    r"(?:\s+note=\"(?P<note>[^\"]*)\")?\s*$"
)


def parse_fact_line(line: str, line_no: int | None = None) -> Fact:
    m = _LINE_RE.match(line.strip())
    if not m:
        raise FactSyntaxError("missing '@ provenance technique=...'", line_no, line)
    body = m.group("body").strip()
    prov, tech, note = m.group("prov"), m.group("tech"), m.group("note") or ""
    if tech not in TECHNIQUES:
        raise FactSyntaxError(f"unknown technique {tech!r}", line_no, line)

    def ext(s):
        return parse_ext_expr(s)

    try:
        if body.startswith("bockstein d ") or body.startswith("adams d "):
            seq = "bockstein" if body.startswith("bockstein") else "adams"
            mt = re.match(r"(?:bockstein|adams) d (\d+) : (.+?) -> (.+)$", body)
            if not mt:
                raise FactSyntaxError("bad differential syntax", line_no, line)
            kind = f"{seq}-diff"
            payload = {
                "r": int(mt.group(1)),
                "source": ext(mt.group(2)),
                "target": ext(mt.group(3)),
            }
        elif body.startswith("permanent-cycle :"):
            kind = "permanent-cycle"
            payload = {"element": ext(body.split(":", 1)[1])}
        elif body.startswith("hidden "):
            mt = re.match(r"hidden (.+?) : (.+?) -> (.+)$", body)
            if not mt:
                raise FactSyntaxError("bad hidden-extension syntax", line_no, line)
            kind = "hidden-ext"
            payload = {
                "multiplier": mt.group(1).strip(),
                "source": ext(mt.group(2)),
                "target": ext(mt.group(3)),
            }
        elif body.startswith("relation :"):
            lhs, rhs = body.split(":", 1)[1].split("=", 1)
            kind = "relation"
            payload = {"lhs": ext(lhs), "rhs": ext(rhs)}
        elif body.startswith("massey :"):
            mt = re.match(r"massey : < (.*?) > = ([^;]+?)(?:\s*;\s*indet (.+))?$", body)
            if not mt:
                raise FactSyntaxError("bad massey syntax", line_no, line)
            kind = "massey"
            payload = {
                "inputs": tuple(ext(x) for x in mt.group(1).split(" , ")),
                "value": ext(mt.group(2)),
                "indet": tuple(ext(x) for x in mt.group(3).split(" , "))
                if mt.group(3)
                else (),
            }
        elif body.startswith("toda :"):
            mt = re.match(r"toda : < (.*?) >(?:\s+detected (.+))?$", body)
            if not mt:
                raise FactSyntaxError("bad toda syntax", line_no, line)
            kind = "toda"
            payload = {
                "inputs": tuple(parse_pi_expr(x) for x in mt.group(1).split(" , ")),
                "detected": ext(mt.group(2)) if mt.group(2) else None,
            }
        elif body.startswith("scalar-extension :"):
            mt = re.match(r"scalar-extension : (.+?) -> (.+)$", body)
            if not mt:
                raise FactSyntaxError("bad scalar-extension syntax", line_no, line)
            kind = "scalar-extension"
            payload = {"source": ext(mt.group(1)), "target": ext(mt.group(2))}
        elif body.startswith("pi-element "):
            mt = re.match(
                r"pi-element (.+?) : \((-?\d+),(-?\d+)\) detected (.+)$", body
            )
            if not mt:
                raise FactSyntaxError("bad pi-element syntax", line_no, line)
            kind = "named-homotopy-element"
            payload = {
                "name": mt.group(1).strip(),
                "s": int(mt.group(2)),
                "w": int(mt.group(3)),
                "detector": ext(mt.group(4)),
            }
        else:
            raise FactSyntaxError(f"unknown fact kind in {body!r}", line_no, line)
    except FactSyntaxError:
        raise
    except ValueError as e:
        raise FactSyntaxError(str(e), line_no, line)
    return Fact(kind, payload, prov, tech)


def parse_facts(text: str) -> list[Fact]:
    out = []
    for no, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        out.append(parse_fact_line(stripped, no))
    return out


def print_facts(facts: list[Fact]) -> str:
    return "\n".join(f.line() for f in facts) + "\n"


# ---------------------------------------------------------------------------
# Degree validation.

PI_MULTIPLIER_DEG = {"rho": (-1, 0, -1), "h": (0, 1, 0), "eta": (1, 1, 1)}


def validate_fact(fact: Fact, pi_names: dict[str, tuple[int, int]] | None = None) -> list[str]:
    """Degree constraints per kind; returns a list of violations (empty = ok)."""
    v: list[str] = []
    p = fact.payload
    try:
        if fact.kind == "bockstein-diff":
            src, tgt, r = p["source"].degree(), p["target"].degree(), p["r"]
            want = TriDegree(src.s - 1, src.f + 1, src.w)
            if tgt != want:
                v.append(f"bockstein d{r}: target degree {tgt} != {want} (source {src})")
            if p["target"].terms and p["target"].min_rho_exp() < r:
                v.append(
                    f"bockstein d{r}: explicit rho-exponent {p['target'].min_rho_exp()} < r"
                )
        elif fact.kind == "adams-diff":
            src, tgt, r = p["source"].degree(), p["target"].degree(), p["r"]
            want = TriDegree(src.s - 1, src.f + r, src.w)
            if tgt != want:
                v.append(f"adams d{r}: target degree {tgt} != {want} (source {src})")
        elif fact.kind == "permanent-cycle":
            p["element"].degree()
        elif fact.kind == "hidden-ext":
            mult = p["multiplier"]
            src, tgt = p["source"].degree(), p["target"].degree()
            if mult in PI_MULTIPLIER_DEG:
                ds, df, dw = PI_MULTIPLIER_DEG[mult]
                if (tgt.s, tgt.w) != (src.s + ds, src.w + dw):
                    v.append(f"hidden {mult}: (s,w) {tgt.s, tgt.w} != {(src.s + ds, src.w + dw)}")
                if tgt.f <= src.f + df:
                    v.append(f"hidden {mult}: target filtration {tgt.f} not above {src.f + df}")
            else:
                md = parse_ext_expr(mult).degree()
                want = TriDegree(src.s + md.s, src.f + md.f, src.w + md.w)
                if (tgt.s, tgt.f, tgt.w) != (want.s, want.f, want.w):
                    v.append(f"hidden {mult}: target degree {tgt} != {want}")
                if p["target"].terms and p["target"].min_rho_exp() <= (
                    p["source"].min_rho_exp() + parse_ext_expr(mult).min_rho_exp()
                ):
                    v.append(
                        f"hidden {mult}: target rho-filtration not strictly higher"
                    )
        elif fact.kind == "relation":
            lhs, rhs = p["lhs"], p["rhs"]
            if lhs.terms and rhs.terms and lhs.degree() != rhs.degree():
                v.append(f"relation: degrees differ {lhs.degree()} vs {rhs.degree()}")
        elif fact.kind == "massey":
            n = len(p["inputs"])
            s = sum(x.degree().s for x in p["inputs"]) + (n - 2)
            f = sum(x.degree().f for x in p["inputs"]) - (n - 2)
            w = sum(x.degree().w for x in p["inputs"])
            val = p["value"].degree()
            if (val.s, val.f, val.w) != (s, f, w):
                v.append(f"massey: value degree {val} != ({s},{f},{w})")
            for ind in p["indet"]:
                d = ind.degree()
                if (d.s, d.f, d.w) != (s, f, w):
                    v.append(f"massey: indeterminacy degree {d} != ({s},{f},{w})")
        elif fact.kind == "toda":
            names = pi_names or {}
            n = len(p["inputs"])
            degs = [x.degree(names) for x in p["inputs"]]
            s = sum(d[0] for d in degs) + (n - 2)
            w = sum(d[1] for d in degs)
            if p["detected"] is not None:
                det = p["detected"].degree()
                if (det.s, det.w) != (s, w):
                    v.append(f"toda: detector (s,w) {(det.s, det.w)} != {(s, w)}")
        elif fact.kind == "scalar-extension":
            src, tgt = p["source"].degree(), p["target"].degree()
            if (src.s, src.w) != (tgt.s, tgt.w):
                v.append(f"scalar-extension: (s,w) differ {src} vs {tgt}")
            if tgt.f <= src.f:
                v.append("scalar-extension: target filtration not strictly higher")
            if any(a > 0 for a, _, _ in p["target"].terms):
                v.append("scalar-extension: target must be rho-free (lands in Ext_C)")
        elif fact.kind == "named-homotopy-element":
            det = p["detector"].degree()
            if (det.s, det.w) != (p["s"], p["w"]):
                v.append(
                    f"pi-element {p['name']}: detector at {(det.s, det.w)}, declared {(p['s'], p['w'])}"
                )
        else:
            v.append(f"unknown kind {fact.kind}")
    except FactValidationError as e:
        v.append(str(e))
    return v


# ---------------------------------------------------------------------------
# Ledger: append-only with tombstones.

@dataclass
class Ledger:
    facts: list[Fact] = field(default_factory=list)
    tombstones: set[str] = field(default_factory=set)
    events: list[tuple[str, str]] = field(default_factory=list)  # (op, fact id)

    def add(self, fact: Fact) -> str:
        self.facts.append(fact)
        self.events.append(("add", fact.id))
        return fact.id

    def retract(self, fact_id: str):
        if fact_id not in {f.id for f in self.facts}:
            raise KeyError(f"no fact with id {fact_id}")
        self.tombstones.add(fact_id)
        self.events.append(("retract", fact_id))

    def active(self) -> list[Fact]:
        return [f for f in self.facts if f.id not in self.tombstones]

    def by_kind(self, kind: str) -> list[Fact]:
        return [f for f in self.active() if f.kind == kind]

    def replay(self) -> "Ledger":
        """Rebuild from the event log; ids must reproduce exactly."""
        out = Ledger()
        by_id = {f.id: f for f in self.facts}
        for op, fid in self.events:
            if op == "add":
                out.add(by_id[fid])
            else:
                out.retract(fid)
        return out


def load_ledger_files(paths) -> Ledger:
    led = Ledger()
    for path in paths:
        with open(path, encoding="utf-8") as fh:
            for fact in parse_facts(fh.read()):
                led.add(fact)
    return led


def pi_name_table(ledger: Ledger) -> dict[str, tuple[int, int]]:
    names = {k: v[:2] for k, v in BUILTIN_PI.items()}
    for f in ledger.by_kind("named-homotopy-element"):
        names[f.payload["name"]] = (f.payload["s"], f.payload["w"])
    return names
