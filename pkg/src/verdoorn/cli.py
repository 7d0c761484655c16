"""Command-line interface.

Inputs
  panel.csv   region,sector,year,output,employment (comma or tab delimited)
  coords.csv  region,x,y,metric with metric in {planar_km, latlon_deg};
              for latlon_deg, x is latitude and y longitude

Outputs (in --out)
  report.json                 every statistic at full precision (pipeline)
  run_meta.json               wall-clock metadata, kept out of report.json
  tables_ols.txt              OLS estimates with diagnostics, one table per period
  tables_ml.txt               ML lag/error estimates for cells needing them
  moran_scatter_<cell>.csv    region,z,lag
  moran_<cell>.json           {I, expected, pseudo_p, n_perm, seed}
  lisa_<cell>.csv             region,z,lag,I_local,pseudo_p,cluster
  lisa_<cell>.json            region -> cluster map
  sweep.csv                   threshold,sector,period,I,pseudo_p,islands (sweep)
  weights.txt                 "n threshold_km" then "i j w_ij" per nonzero

Exit codes: 0 success, 2 validation error, 3 some cells failed, 4 total failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .errors import VerdoornError
from .fixture import DEFAULT_SEED, write_fixture
from .pipeline import (
    RunConfig,
    cell_name,
    cell_seed,
    lisa_csv,
    lisa_json,
    load_inputs,
    moran_summary,
    run_pipeline,
    scatter_csv,
    sweep_csv,
    sweep_threshold,
    _LISA,
    _MORAN,
    _RESID,
)
from .report import dumps, render_tables, write_atomic

EXIT_OK, EXIT_VALIDATION, EXIT_PARTIAL, EXIT_TOTAL = 0, 2, 3, 4

log = logging.getLogger("verdoorn")


def _periods(text: str) -> list[tuple[int, int]]:
    out = []
    for chunk in text.split(","):
        a, _, b = chunk.strip().partition("-")
        out.append((int(a), int(b)))
    return out


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with RunConfig fields; flags override it")
    p.add_argument("--panel", dest="panel_path", help="panel.csv")
    p.add_argument("--coords", dest="coords_path", help="coords.csv")
    p.add_argument("--threshold", dest="threshold_km", type=float, help="distance band in km (default 97)")
    p.add_argument("--periods", type=_periods, help="e.g. 1995-1999,2000-2005")
    p.add_argument("--sectors", type=lambda s: [x.strip() for x in s.split(",")],
                   help="comma-separated subset of Agriculture,Industry,Services,Total")
    p.add_argument("--alpha", type=float, help="significance level (default 0.05)")
    p.add_argument("--n-perm", dest="n_perm", type=int, help="permutations (default 999)")
    p.add_argument("--seed", type=int, help="base seed (default 0)")
    p.add_argument("--out", dest="output_dir", help="output directory (default ./out)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="verdoorn",
        description="Spatial cross-section analysis of regional productivity growth.",
        epilog=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pipeline", help="full analysis over all sectors and periods")
    _common(p)
    p.add_argument("--jobs", type=int, help="cells analysed concurrently (default 1)")

    for name, text in (
        ("moran", "global Moran's I of productivity growth with scatter export"),
        ("lisa", "local Moran statistics and cluster labels"),
        ("ols", "OLS with diagnostics and the specification decision"),
        ("lag", "ML spatial lag fit"),
        ("error", "ML spatial error fit"),
    ):
        _common(sub.add_parser(name, help=text))

    p = sub.add_parser("sweep", help="Moran's I across distance thresholds")
    _common(p)
    p.add_argument("--thresholds", type=_floats, required=True, help="sorted list, e.g. 50,97,150,200")

    p = sub.add_parser("fixture", help="write the synthetic 28-region panel")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", default="fixture")

    p = sub.add_parser("render", help="rebuild text tables from report.json")
    p.add_argument("report", help="path to report.json")
    p.add_argument("--out", help="directory for tables_ols.txt / tables_ml.txt (default: print)")
    return parser


def make_config(args: argparse.Namespace) -> RunConfig:
    data = {}
    if getattr(args, "config", None):
        data = json.loads(Path(args.config).read_text(encoding="utf-8"))
    for key in ("panel_path", "coords_path", "threshold_km", "periods", "sectors", "alpha",
                "n_perm", "seed", "output_dir", "jobs"):
        value = getattr(args, key, None)
        if value is not None:
            data[key] = value
    return RunConfig.from_mapping(data).validate()


def _cells(config, panel):
    sectors = config.sectors or list(panel.sectors)
    return [(s, p) for p in config.periods for s in sectors]


def _single(args, config) -> int:
    from .ingest import build_growth_vectors
    from .lisa import lisa
    from .moran import moran_scatter, permutation_test
    from .ols import estimate_verdoorn_ols, verdoorn_design
    from .specsearch import decide
    from .spatial_ml import fit_error, fit_lag

    panel, w = load_inputs(config)
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    results, failures = [], 0
    cells = _cells(config, panel)
    for sector, period in cells:
        name = cell_name(sector, period)
        entry = {"sector": sector, "period": list(period)}
        try:
            gv = build_growth_vectors(panel, sector, period)
            if args.command == "moran":
                res = permutation_test(gv.p, w, config.n_perm, cell_seed(config.seed, sector, period, _MORAN))
                write_atomic(out / f"moran_scatter_{name}.csv", scatter_csv(moran_scatter(gv.p, w)))
                write_atomic(out / f"moran_{name}.json", moran_summary(res))
                entry["moran"] = res.to_dict()
            elif args.command == "lisa":
                res = lisa(gv.p, w, config.n_perm, cell_seed(config.seed, sector, period, _LISA), config.alpha)
                write_atomic(out / f"lisa_{name}.csv", lisa_csv(res))
                write_atomic(out / f"lisa_{name}.json", lisa_json(res))
                entry["lisa"] = res.counts()
            elif args.command == "ols":
                rep = estimate_verdoorn_ols(gv, w, config.n_perm, cell_seed(config.seed, sector, period, _RESID))
                entry["ols"] = rep.to_dict()
                if rep.lm is not None:
                    entry["decision"] = decide(rep, config.alpha).to_dict()
            else:
                fitter = fit_lag if args.command == "lag" else fit_error
                entry["fit"] = fitter(gv.p, verdoorn_design(gv.q), w).to_dict()
        except VerdoornError as exc:
            failures += 1
            entry["error"] = f"{type(exc).__name__}: {exc}"
        results.append(entry)
    text = dumps(results)
    write_atomic(out / f"{args.command}.json", text)
    sys.stdout.write(text)
    return _status(failures, len(cells))


def _status(failures: int, total: int) -> int:
    if failures == 0:
        return EXIT_OK
    return EXIT_TOTAL if failures == total else EXIT_PARTIAL


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "fixture":
            paths = write_fixture(args.out, args.seed)
            for p in paths.values():
                print(p)
            return EXIT_OK
        if args.command == "render":
            data = json.loads(Path(args.report).read_text(encoding="utf-8"))
            ols_text, ml_text = render_tables(data)
            if args.out:
                out = Path(args.out)
                out.mkdir(parents=True, exist_ok=True)
                write_atomic(out / "tables_ols.txt", ols_text)
                write_atomic(out / "tables_ml.txt", ml_text)
            else:
                sys.stdout.write(ols_text + "\n" + ml_text)
            return EXIT_OK

        config = make_config(args)
        if args.command == "pipeline":
            report = run_pipeline(config)
            ols_text, _ = render_tables(report.to_dict())
            sys.stdout.write(ols_text)
            return _status(len(report.failed), len(report.cells))
        if args.command == "sweep":
            panel, _ = load_inputs(config)
            sectors = config.sectors or list(panel.sectors)
            rows = sweep_threshold(panel, args.thresholds, sectors, config.periods, config.n_perm, config.seed)
            out = Path(config.output_dir)
            out.mkdir(parents=True, exist_ok=True)
            text = sweep_csv(rows)
            write_atomic(out / "sweep.csv", text)
            sys.stdout.write(text)
            return EXIT_OK
        return _single(args, config)
    except (VerdoornError, OSError, json.JSONDecodeError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
