"""Command-line driver: ``msvekit {estimate,simulate,sweep,coverage,eigdist,diagnose}``.

Exit codes: 0 ok, 2 configuration/precondition error, 3 numeric error
(e.g. an estimate that is not positive definite), 4 I/O or parse error.
"""

import argparse
import json
import logging
import os
import sys


from . import __version__
from .autocov import autocov_range
from .chain_io import acf_ccf, load_chain, save_chain, summarize
from .errors import (
    ChainFormatError,
    ConfigError,
    DimensionError,
    InsufficientDataError,
    MsveError,
    NumericError,
    PreconditionError,
)
from .experiments import (
    ExperimentConfig,
    dumps,
    ensure_dir,
    provenance,
    run_coverage,
    run_eigdist,
    run_sweep,
    write_csv,
    write_json,
)
from .inference import confidence_report
from .msve import msve_from_autocov
from .numerics import RngStream
from .var1 import setting, simulate, spec_from_dict
from .windows import TruncationRule, parse_window, window_identity_check, condition_diagnostics

log = logging.getLogger("msvekit")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4


def _common():
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--seed", type=int, default=None, help="base seed (u64)")
    parent.add_argument("--threads", type=int, default=None, help="worker threads for replications")
    parent.add_argument("--out", default=None, help="output directory")
    parent.add_argument("--format", choices=("csv", "json"), default="json")
    return parent


def _experiment_args(p):
    p.add_argument("--config", help="JSON file mirroring ExperimentConfig")
    p.add_argument("--setting", type=int, help="VAR(1) setting 1..6")
    p.add_argument("--spec", help="JSON file with a VAR(1) spec {phi, w}")
    p.add_argument("--windows", help="';'-separated windows, e.g. 'bartlett;tukey-hanning;scaled-bartlett,eta=2'")
    p.add_argument("--nu", type=float)
    p.add_argument("--sample-sizes", help="comma-separated n values")
    p.add_argument("--replications", type=int)
    p.add_argument("--level", type=float)
    p.add_argument("--independent-samples", action="store_true", default=None,
                   help="fresh trajectory per sample size instead of nested prefixes")


def build_parser():
    common = _common()
    parser = argparse.ArgumentParser(prog="msvekit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"msvekit {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", parents=[common], help="MSVE, regions and ESS for a chain file")
    p.add_argument("chain")
    p.add_argument("--chain-format", choices=("csv", "raw-f64"))
    p.add_argument("--skip", type=int, default=0, help="drop the first k rows")
    p.add_argument("--window", default="bartlett")
    p.add_argument("--nu", type=float, default=1.0 / 3.0)
    p.add_argument("--bn", type=int, help="explicit truncation point (overrides --nu)")
    p.add_argument("--level", type=float, default=0.9)
    p.add_argument("--acf", metavar="I,J,MAXLAG", help="also emit ACF/CCF of coordinates I, J")
    p.add_argument("--lags", action="store_true", help="also write lag dump autocov.csv (lag,i,j,value)")

    p = sub.add_parser("simulate", parents=[common], help="simulate a VAR(1) chain")
    p.add_argument("--setting", type=int)
    p.add_argument("--spec", help="JSON VAR(1) spec file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--stream", type=int, default=0)
    p.add_argument("--chain-format", choices=("csv", "raw-f64"), default="csv")
    p.add_argument("-o", "--output", help="file path (default <out>/chain.csv or chain.f64)")

    for name, text in (("sweep", "estimation-error sweep"),
                       ("coverage", "coverage study"),
                       ("eigdist", "largest-eigenvalue samples")):
        p = sub.add_parser(name, parents=[common], help=text)
        _experiment_args(p)

    p = sub.add_parser("diagnose", parents=[common], help="window/truncation condition report")
    p.add_argument("--window", default="bartlett")
    p.add_argument("--nu", type=float, default=1.0 / 3.0)
    p.add_argument("--n-grid", default="1000,10000,100000")
    p.add_argument("--psi-lambda", type=float, help="evaluate psi(n)=n^(1/2-lambda) terms")
    return parser


def _emit(args, name, text):
    if args.out:
        ensure_dir(args.out)
        with open(os.path.join(args.out, name), "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_estimate(args):
    chain = load_chain(args.chain, args.chain_format, skip=args.skip)
    w = parse_window(args.window)
    b_n = args.bn if args.bn is not None else TruncationRule(args.nu)(chain.n)
    seq = autocov_range(chain, b_n)
    est = msve_from_autocov(seq, w)
    summ = summarize(chain)
    report = {
        "provenance": provenance(
            {"chain": os.path.basename(args.chain), "window": w.label, "b_n": b_n,
             "level": args.level, "skip": args.skip},
            "estimate"),
        "n": chain.n,
        "p": chain.p,
        "mean": summ.mean,
        "sample_cov": summ.sample_cov,
        "estimate": est.to_dict(),
    }
    code = EXIT_OK
    try:
        report["confidence"] = confidence_report(chain, est, args.level, summ).to_dict()
    except NumericError as err:
        report["confidence"] = {"error": str(err)}
        code = EXIT_NUMERIC
    if args.acf:
        i, j, m = (int(x) for x in args.acf.split(","))
        report["acf"] = {"i": i, "j": j, "values": acf_ccf(chain, i, j, m)}
    if args.lags:
        rows = [dict(zip(("lag", "i", "j", "value"), r)) for r in seq.to_rows()]
        ensure_dir(args.out or ".")
        write_csv(os.path.join(args.out or ".", "autocov.csv"), rows)

    if args.format == "csv":
        lines = [",".join(repr(float(v)) for v in row) for row in est.matrix]
        _emit(args, "estimate.csv", "\n".join(lines) + "\n")
    else:
        _emit(args, "estimate.json", dumps(report))
    return code


def _spec_from_args(args):
    if args.spec:
        with open(args.spec, "r", encoding="utf-8") as fh:
            return spec_from_dict(json.load(fh))
    if args.setting is not None:
        return setting(args.setting)
    raise ConfigError("give --setting or --spec")


def cmd_simulate(args):
    spec = _spec_from_args(args)
    chain = simulate(spec, args.n, RngStream(args.seed or 0, args.stream))
    ext = "csv" if args.chain_format == "csv" else "f64"
    path = args.output or os.path.join(ensure_dir(args.out or "."), f"chain.{ext}")
    save_chain(chain, path, args.chain_format)
    log.info("wrote %d x %d chain to %s", chain.n, chain.p, path)
    return EXIT_OK


def config_from_args(args):
    if args.config:
        cfg = ExperimentConfig.from_json(args.config)
        d = {k: getattr(cfg, k) for k in cfg.__dataclass_fields__}
    else:
        d = {}
    if args.spec:
        with open(args.spec, "r", encoding="utf-8") as fh:
            d["spec"] = json.load(fh)
    elif args.setting is not None:
        d["spec"] = {"setting": args.setting}
    if args.windows:
        d["windows"] = [w.strip() for w in args.windows.split(";") if w.strip()]
    if args.sample_sizes:
        d["sample_sizes"] = [int(float(x)) for x in args.sample_sizes.split(",")]
    for key in ("nu", "replications", "level", "seed", "threads", "independent_samples"):
        val = getattr(args, key, None)
        if val is not None:
            d[key] = val
    if args.out:
        d["outputs"] = args.out
    return ExperimentConfig(**d)


_SWEEP_COLS = ["window", "n", "replication", "b_n", "frobenius_rel_error",
               "lambda1", "lambda1_rel_error", "positive_definite"]


def cmd_sweep(args):
    cfg = config_from_args(args)
    report = run_sweep(cfg)
    out = ensure_dir(cfg.outputs)
    write_csv(os.path.join(out, "sweep_replications.csv"), report.rows, _SWEEP_COLS)
    write_csv(os.path.join(out, "sweep_summary.csv"), report.summary)
    write_json(os.path.join(out, "sweep.json"),
               {"provenance": report.provenance, "summary": report.summary})
    return EXIT_OK


def cmd_eigdist(args):
    cfg = config_from_args(args)
    report = run_eigdist(cfg)
    out = ensure_dir(cfg.outputs)
    rows = [{k: r[k] for k in ("window", "n", "replication", "b_n", "lambda1")} for r in report.rows]
    write_csv(os.path.join(out, "eigdist.csv"), rows)
    write_json(os.path.join(out, "eigdist.json"), {
        "provenance": report.provenance,
        "true_lambda1": report.true_lambda1,
        "summary": [{k: s[k] for k in ("window", "n", "b_n", "lambda1_mean", "lambda1_sd")}
                    for s in report.summary],
    })
    return EXIT_OK


def cmd_coverage(args):
    cfg = config_from_args(args)
    report = run_coverage(cfg)
    out = ensure_dir(cfg.outputs)
    write_csv(os.path.join(out, "coverage.csv"), report.rows)
    if args.format == "json":
        write_json(os.path.join(out, "coverage.json"),
                   {"provenance": report.provenance, "rows": report.rows})
    return EXIT_OK


def cmd_diagnose(args):
    w = parse_window(args.window)
    rule = TruncationRule(args.nu)
    grid = [int(float(x)) for x in args.n_grid.split(",")]
    report = condition_diagnostics(w, rule, grid, psi_lambda=args.psi_lambda)
    report["identities"] = {
        str(b): dict(zip(("delta1_tail_of_delta2", "tail_of_delta1_is_w", "delta1_sums_to_one"),
                         window_identity_check(w, b)))
        for b in sorted({rule(n) for n in grid})
    }
    report["provenance"] = provenance(
        {"window": w.label, "nu": args.nu, "n_grid": grid, "psi_lambda": args.psi_lambda}, "diagnose")
    _emit(args, "diagnose.json", dumps(report))
    return EXIT_OK


_COMMANDS = {
    "estimate": cmd_estimate,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "coverage": cmd_coverage,
    "eigdist": cmd_eigdist,
    "diagnose": cmd_diagnose,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _COMMANDS[args.command](args)
    except (ChainFormatError, DimensionError, OSError) as err:
        print(f"msvekit: error: {err}", file=sys.stderr)
        return EXIT_IO
    except NumericError as err:
        print(f"msvekit: numeric error: {err}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, PreconditionError, InsufficientDataError, MsveError) as err:
        print(f"msvekit: error: {err}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
