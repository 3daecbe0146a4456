"""R-motivic Mahowald invariants from the Adams E-infinity rho-tower data.

A classical alpha in pi_n is identified with the element of
pi[rho^-1] in degree (0,-n) detected by rho^J G, where G is the
rho-periodic image of alpha's classical detector under
(s,f) -> (2s+f, f, s+f) and J = stem(G).  Dividing by rho is possible
exactly while extension of scalars vanishes (the cofiber-of-rho
comparison), so the walk stops at the largest rho-power rho^m G that
carries a nonzero image: m = 0 (the same-name class) or a hidden value
from the extension-of-scalars table.  Then k = J - m and the invariant
is the image of the stopping class, with indeterminacy the images of
the other valid representatives (higher-filtration classes killed by
rho^k).
"""

from __future__ import annotations

from dataclasses import dataclass

from . import extc
from .adams import AdamsEngine
from .assembler import ExtClass
from .facts import Ledger
from .homotopy import HomotopyModel, PiCModel

# classical alpha -> its classical Adams detector, written in the
# motivic image alphabet already (h_n -> h_{n+1}, c0 -> c1, Ph1 -> h2g,
# Ph2 -> h3g applied to the classical monomial)
CLASSICAL_ALPHAS: dict[str, str] = {
    "2": "h1",
    "4": "h1^2",
    "8": "h1^3",
    "2^4": "h1^4",
    "eta": "h2",
    "eta^2": "h2^2",
    "nu": "h3",
    "2nu": "h1 h3",
    "4nu": "h1^2 h3",
    "nu^2": "h3^2",
    "sigma": "h4",
    "2sigma": "h1 h4",
    "4sigma": "h1^2 h4",
    "8sigma": "h1^3 h4",
    "eta sigma": "h2 h4",
    "epsilon": "c1",
    "eta^2 sigma": "h2^2 h4",
    "eta epsilon": "h2 c1",
    "mu9": "h2g",
    "eta mu9": "h2 h2g",
    "zeta11": "h3g",
    "2zeta11": "h1 h3g",
    "4zeta11": "h1^2 h3g",
}

# pi^C names of classes by their E-infinity detector (exact basis element)
PI_C_NAMES: list[tuple[int, str, str]] = [
    # (tau exponent, monomial, name)
    (0, "h2", "nu"), (0, "h0 h2", "2nu"), (1, "h1^3", "4nu"),
    (0, "h2^2", "nu^2"),
    (0, "h3", "sigma"), (0, "h0 h3", "2sigma"), (0, "h0^2 h3", "4sigma"),
    (0, "h0^3 h3", "8sigma"),
    (0, "h1 h3", "eta sigma"), (0, "h1^2 h3", "eta^2 sigma"),
    (0, "c0", "epsilon"), (0, "h1 c0", "eta epsilon"),
    (0, "d0", "kappa"), (1, "h3^2", "tau sigma^2"),
    (0, "h1 h4", "eta4"), (0, "h1^2 h4", "eta eta4"), (0, "h1^3 h4", "eta^2 eta4"),
    (0, "h2 h4", "nu4"), (0, "h0 h2 h4", "2nu4"), (1, "h1^3 h4", "4nu4"),
    (0, "c1", "sigmabar"), (0, "h2^2 h4", "nu nu4"), (0, "h2 c1", "nu sigmabar"),
    (0, "Pc0", "eta rho15"), (0, "h1 Pc0", "eta^2 rho15"), (0, "h1^2 Pc0", "eta^3 rho15"),
    (0, "h2 d0", "nu kappa"),
    (0, "h2g", "nu kappabar"), (0, "h0 h2g", "2 nu kappabar"),
    (1, "h0 h2g", "tau 2 nu kappabar"),
    (0, "h2 h2g", "nu nu kappabar"),
    (1, "h2 h2g", "tau nu^2 kappabar"),
    (0, "h1 h3g", "{h1 h3 g}"), (0, "h1^2 h3g", "eta {h1 h3 g}"),
    (0, "tg", "tau kappabar"), (0, "h1g", "eta kappabar"),
    (1, "h1 tg", "tau eta kappabar"), (0, "d0^2", "kappa^2"),
    (1, "h1^2 tg", "tau eta^2 kappabar"),
    (0, "c0 d0", "eta^2 kappabar"),
]


def _pi_c_name(c: ExtClass) -> str:
    if c.rho != 0:
        return f"rho^{c.rho} {c.line}"
    for b, mono_text, name in PI_C_NAMES:
        if c.line.b == b and c.line.m == extc.parse_mono(mono_text):
            return name
    # h1 towers: eta^k
    d = dict(c.line.m)
    if set(d) == {"h1"} and c.line.b == 0:
        return f"eta^{d['h1']}"
    return f"{{{c.line}}}"


@dataclass
class MahowaldResult:
    alpha: str
    k: int
    value: str
    value_degree: tuple[int, int]
    indeterminacy: list[str]
    betti_applicable: bool
    classical: str | None  # None = not determined


def betti_applicable(s: int, w: int) -> bool:
    """Betti comparison is valid when 2w - s < 4."""
    return 2 * w - s < 4


class MahowaldCalculator:
    def __init__(self, adams: AdamsEngine, homotopy: HomotopyModel, pic: PiCModel, ledger: Ledger):
        self.adams = adams
        self.homotopy = homotopy
        self.pic = pic
        # extension-of-scalars hidden values: source class -> target class
        self.scalar_hidden: dict[ExtClass, ExtClass] = {}
        for f in ledger.by_kind("scalar-extension"):
            src = self._class(f.payload["source"])
            tgt = self._class(f.payload["target"])
            if src is None or tgt is None:
                raise ValueError(f"bad scalar-extension fact: {f.line()}")
            self.scalar_hidden[src] = tgt

    def _class(self, expr) -> ExtClass | None:
        k = expr.min_rho_exp() if expr.terms else 0
        el = extc.el_reduce((b, m) for a, b, m in expr.terms if a == k)
        if el is None or len(el) != 1:
            return None
        return ExtClass(k, next(iter(el)))

    def scalars_image(self, c: ExtClass) -> tuple[ExtClass | None, bool]:
        """(image class on the C-motivic E-infinity page, hidden?)."""
        if c.rho == 0:
            if c.line in self.pic.classes:
                return ExtClass(0, c.line), False
            return None, False
        hidden = self.scalar_hidden.get(c)
        if hidden is not None:
            return hidden, True
        return None, False

    def r_mahowald(self, alpha: str) -> MahowaldResult:
        if alpha not in CLASSICAL_ALPHAS:
            raise ValueError(
                f"unknown classical element {alpha!r}; known: {sorted(CLASSICAL_ALPHAS)}"
            )
        g_mono = extc.parse_mono(CLASSICAL_ALPHAS[alpha])
        g_line = extc.BasisElt(0, g_mono)
        if g_line not in self.adams.pres.torsion:
            raise ValueError(f"rho-periodic representative {g_line} not on E-infinity (range error)")
        d = extc.mono_degree(g_mono)
        stem_j = d.s
        n = d.s - d.w  # the classical stem of alpha
        m_stop = 0
        for m in range(stem_j, 0, -1):
            img, _ = self.scalars_image(ExtClass(m, g_line))
            if img is not None:
                m_stop = m
                break
        k = stem_j - m_stop
        beta = ExtClass(m_stop, g_line)
        img, hidden = self.scalars_image(beta)
        assert img is not None
        value_name = _pi_c_name(img)
        img_deg = self.adams.pres.engine.states[img.line].degree
        value_sw = (img_deg.s - img.rho, img_deg.w - img.rho)
        beta_f = self.adams.pres.engine.states[g_line].degree.f
        indeterminacy = self._indeterminacy(k, k - n, beta_f, k)
        applicable = betti_applicable(*value_sw)
        classical = self._realize(value_name) if applicable else None
        return MahowaldResult(
            alpha, k, value_name, value_sw, indeterminacy, applicable, classical
        )

    def _indeterminacy(self, s: int, w: int, f_min: int, k: int) -> list[str]:
        out = []
        for fdeg, c in self.adams.classes_at(s, w):
            if fdeg <= f_min:
                continue
            # gamma must satisfy rho^k gamma = 0 in homotopy
            cur: ExtClass | None = c
            killed = False
            for _ in range(k):
                cur = self.homotopy.act_rho(cur)
                if cur is None:
                    killed = True
                    break
            if not killed:
                continue
            img, _ = self.scalars_image(c)
            if img is not None:
                out.append(_pi_c_name(img))
        return sorted(set(out))

    def _realize(self, name: str) -> str:
        """Betti realization on names: strip tau decorations."""
        toks = [t for t in name.split() if t != "tau" and not t.startswith("tau^")]
        return " ".join(toks)

    def classical_mahowald(self, alpha: str) -> MahowaldResult:
        res = self.r_mahowald(alpha)
        return res
