"""Command line entry point: ``dabradar simulate`` and ``dabradar calc``."""

import argparse
import csv
import logging
import sys

from .. import analysis
from .config import EXPERIMENTS, ConfigError, load_config
from .experiments import THREADS_ENV, run_experiment

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def build_parser():
    p = argparse.ArgumentParser(prog="dabradar", description="DAB+ passive radar CSI tracking")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a Monte Carlo experiment from a YAML config")
    sim.add_argument("--config", required=True)
    sim.add_argument("--experiment", choices=EXPERIMENTS)
    sim.add_argument("--out", help="output directory (overrides output_dir)")
    sim.add_argument("--threads", type=int,
                     help=f"worker processes; {THREADS_ENV} overrides this")
    sim.add_argument("--seed", type=int)
    sim.add_argument("--trials", type=int)

    calc = sub.add_parser("calc", help="transition SNR and slip bounds for one operating point")
    calc.add_argument("--h-pow", type=float, default=1.0, help="|H~|^2")
    level = calc.add_mutually_exclusive_group()
    level.add_argument("--noise-var", type=float, help="sigma_0^2")
    level.add_argument("--snr-db", type=float, help="|H~|^2 / sigma_0^2 in dB")
    calc.add_argument("--pred-var", type=float, default=0.0, help="sigma_p^2")
    calc.add_argument("--delta-h-var", type=float, default=0.0,
                      help="variance of the symbol-to-symbol channel change")
    calc.add_argument("--alpha", type=float, help="also report rho_alpha")
    calc.add_argument("--format", choices=("csv", "text"), default="text")
    return p


def _simulate(args):
    try:
        cfg = load_config(args.config, experiment_id=args.experiment, output_dir=args.out,
                          threads=args.threads, seed=args.seed, trials=args.trials)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        rows = run_experiment(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # any failure during the run is a runtime failure
        logging.getLogger(__name__).debug("run failed", exc_info=True)
        print(f"runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print(f"{cfg.experiment_id}: {len(rows)} rows -> {cfg.output_dir}/{cfg.experiment_id}.csv")
    return EXIT_OK


def _calc(args):
    if args.noise_var is None and args.snr_db is None:
        noise_var = 0.1
    elif args.noise_var is not None:
        noise_var = args.noise_var
    else:
        noise_var = args.h_pow / 10 ** (args.snr_db / 10)
    if args.h_pow < 0 or noise_var < 0 or args.pred_var < 0 or args.delta_h_var < 0:
        print("config error: powers and variances must be non-negative", file=sys.stderr)
        return EXIT_CONFIG
    if noise_var + args.pred_var == 0:
        print("config error: noise and prediction variance are both zero", file=sys.stderr)
        return EXIT_CONFIG
    rep = analysis.TransitionSnrReport.compute(args.h_pow, noise_var, args.pred_var,
                                               args.delta_h_var)
    rows = rep.rows()
    if args.alpha is not None:
        if not 0 <= args.alpha <= 1:
            print("config error: alpha must lie in [0, 1]", file=sys.stderr)
            return EXIT_CONFIG
        rows.append(("rho_alpha", float(analysis.rho_alpha(args.alpha))))
    if args.format == "csv":
        wr = csv.writer(sys.stdout, lineterminator="\n")
        wr.writerow(["quantity", "value"])
        wr.writerows((k, repr(v)) for k, v in rows)
    else:
        for k, v in rows:
            print(f"{k:22s} {v:.6g}")
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "simulate":
        return _simulate(args)
    return _calc(args)


if __name__ == "__main__":
    sys.exit(main())
