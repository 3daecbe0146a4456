"""Command-line surface: oracle sweeps, engine runs, charts, homotopy
queries, Mahowald invariants, and the interactive service."""

from __future__ import annotations

import argparse
import importlib.resources
import json
import os
import sys

from .steenrod import TriDegree


def data_dir() -> str:
    env = os.environ.get("RHOSTEMS_DATA")
    if env:
        return env
    return str(importlib.resources.files("rhostems") / "data")


def default_fact_files() -> list[str]:
    base = data_dir()
    return [
        os.path.join(base, name)
        for name in ("bockstein.facts", "ext-hidden.facts", "adams.facts", "homotopy.facts")
    ]


def load_default_ledger(paths=None):
    from .facts import load_ledger_files

    return load_ledger_files(paths or default_fact_files())


def cmd_oracle(args):
    from .cobar import CobarContext

    ctx = CobarContext(args.base)
    rows = []
    for s in range(args.min_stem, args.max_stem + 1):
        for cw in range(0, args.max_coweight + 1):
            for f in range(0, args.max_f + 1):
                t = TriDegree(s, f, s - cw) if args.base != "classical" else TriDegree(s, f, s)
                dim = ctx.ext_dimension(t)
                if dim or args.all:
                    rows.append((t.coweight, t.s, t.f, t.w, dim))
    rows.sort()
    for cw, s, f, w, dim in rows:
        sys.stdout.write(f"{s}\t{f}\t{w}\t{dim}\t{args.base}\n")


def cmd_bockstein(args):
    from .bockstein import run_engine
    from .chart import page_to_json

    ledger = load_default_ledger(args.facts)
    techniques = tuple(args.techniques.split(",")) if args.techniques else None
    eng = run_engine(ledger, techniques, coweight_limit=args.through_coweight)
    report = eng.report_text()
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(report)
    else:
        sys.stdout.write(report)
    if args.page_json:
        with open(args.page_json, "w", encoding="utf-8") as fh:
            fh.write(page_to_json(eng.einfty_page()))
    unresolved = eng.unresolved()
    sys.stderr.write(
        f"applied {len(eng.applied)} differentials; {len(unresolved)} unresolved\n"
    )
    return 1 if unresolved else 0


def build_pipeline(facts=None, coweight_limit=13):
    """Ledger -> Bockstein E-infinity -> Ext_R -> Adams E-infinity."""
    from .adams import AdamsEngine
    from .assembler import ExtPresentation
    from .bockstein import run_engine

    ledger = load_default_ledger(facts)
    eng = run_engine(ledger, coweight_limit=coweight_limit)
    pres = ExtPresentation(eng, ledger)
    adams = AdamsEngine(pres, ledger, coweight_limit=coweight_limit - 1)
    adams.run()
    return ledger, eng, pres, adams


def cmd_adams(args):
    ledger, eng, pres, adams = build_pipeline(args.facts)
    candidates = adams.certify_e4_is_einfty()
    lines = [
        "# Adams run report",
        f"d2 facts and derivations: {sum(1 for v in adams.d2.values() if v)} nonzero",
        f"d3 facts: {sum(1 for v in adams.d3.values() if v)} nonzero",
        f"remaining d_r candidates (r >= 4): {len(candidates)}",
        *candidates,
    ]
    out = "\n".join(lines) + "\n"
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return 1 if candidates else 0


def cmd_pi(args):
    from .facts import Ledger
    from .homotopy import HomotopyModel

    ledger, eng, pres, adams = build_pipeline(args.facts)
    model = HomotopyModel(adams, ledger)
    group = model.group(args.stem, args.weight)
    sys.stdout.write("(s,w) | order | generators | 2-divisibility notes\n")
    sys.stdout.write(group.describe() + "\n")


def cmd_mahowald(args):
    from .homotopy import HomotopyModel, PiCModel
    from .mahowald import MahowaldCalculator

    ledger, eng, pres, adams = build_pipeline(args.facts)
    model = HomotopyModel(adams, ledger)
    pic = PiCModel()
    calc = MahowaldCalculator(adams, model, pic, ledger)
    res = calc.r_mahowald(args.alpha)
    sys.stdout.write(f"alpha = {res.alpha}\n")
    sys.stdout.write(f"k = {res.k}\n")
    sys.stdout.write(f"R^R(alpha) = {res.value} in pi^C{res.value_degree}\n")
    sys.stdout.write(f"indeterminacy = {res.indeterminacy or '-'}\n")
    verdict = "applicable" if res.betti_applicable else "not applicable (2w - s >= 4)"
    sys.stdout.write(f"Betti comparison: {verdict}\n")
    if args.classical:
        if res.classical is not None:
            sys.stdout.write(f"R(alpha) = {res.classical}\n")
        else:
            sys.stdout.write("R(alpha) = not determined by this computation\n")


def cmd_chart(args):
    from .bockstein import run_engine
    from .charts_svg import emit_chart

    ledger = load_default_ledger(args.facts)
    eng = run_engine(ledger)
    page = eng.einfty_page()
    cw = (args.coweight, args.coweight) if args.coweight is not None else None
    svg = emit_chart(
        page,
        stem_range=(args.min_stem, args.max_stem),
        f_range=(0, args.max_f),
        coweight_range=cw,
    )
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(svg)
    else:
        sys.stdout.write(svg)


def cmd_serve(args):
    import uvicorn

    from .server import create_app

    app = create_app(args.facts or default_fact_files())
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")


def main(argv=None):
    ap = argparse.ArgumentParser(prog="rhostems")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("oracle", help="cobar Ext dimensions as TSV")
    p.add_argument("--base", choices=("R", "C", "classical"), default="R")
    p.add_argument("--min-stem", type=int, default=0)
    p.add_argument("--max-stem", type=int, default=10)
    p.add_argument("--max-coweight", type=int, default=5)
    p.add_argument("--max-f", type=int, default=8)
    p.add_argument("--all", action="store_true", help="emit zero groups too")
    p.set_defaults(fn=cmd_oracle)

    p = sub.add_parser("bockstein", help="run the rho-Bockstein engine")
    psub = p.add_subparsers(dest="subcmd", required=True)
    prun = psub.add_parser("run")
    prun.add_argument("--facts", nargs="*", default=None)
    prun.add_argument("--through-coweight", type=int, default=13)
    prun.add_argument("--techniques", default=None, help="comma list, e.g. seed,manual")
    prun.add_argument("--report", default=None)
    prun.add_argument("--page-json", default=None)
    prun.set_defaults(fn=cmd_bockstein)

    p = sub.add_parser("adams", help="run the Adams engine")
    psub = p.add_subparsers(dest="subcmd", required=True)
    prun = psub.add_parser("run")
    prun.add_argument("--facts", nargs="*", default=None)
    prun.add_argument("--report", default=None)
    prun.set_defaults(fn=cmd_adams)

    p = sub.add_parser("pi", help="homotopy group at (stem, weight)")
    p.add_argument("--stem", type=int, required=True)
    p.add_argument("--weight", type=int, required=True)
    p.add_argument("--facts", nargs="*", default=None)
    p.set_defaults(fn=cmd_pi)

    p = sub.add_parser("mahowald", help="R-motivic Mahowald invariant")
    p.add_argument("--alpha", required=True)
    p.add_argument("--classical", action="store_true")
    p.add_argument("--facts", nargs="*", default=None)
    p.set_defaults(fn=cmd_mahowald)

    p = sub.add_parser("chart", help="emit an SVG chart of the E-infinity page")
    p.add_argument("--coweight", type=int, default=None)
    p.add_argument("--min-stem", type=int, default=0)
    p.add_argument("--max-stem", type=int, default=26)
    p.add_argument("--max-f", type=int, default=16)
    p.add_argument("--out", default=None)
    p.add_argument("--facts", nargs="*", default=None)
    p.set_defaults(fn=cmd_chart)

    p = sub.add_parser("serve", help="interactive HTTP/WebSocket service")
    p.add_argument("--port", type=int, default=8351)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--facts", nargs="*", default=None)
    p.set_defaults(fn=cmd_serve)

    args = ap.parse_args(argv)
    return args.fn(args) or 0


if __name__ == "__main__":
    raise SystemExit(main())
