"""Command-line front end.

Subcommands: train, eval, spectrum, verify-t1, verify-t2, sample-triplets.
Options may come from a ``--config`` file of flat ``key=value`` lines
(``#`` starts a comment); explicit command-line flags win over the file.

Exit codes: 0 success, 1 configuration error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import harness as harness_mod
from .data import load_libsvm
from .evaluate import evaluate_metric
from .experiments import METHODS, RunConfig, run_method
from .metric import load_metric, save_metric
from .solver import trace_csv
from .triplets import sample_active_triplets, save_triplets


class ConfigError(ValueError):
    """Bad flags, bad config file, or bad option values."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); config problems are exit 1
        raise ConfigError(message)


def read_config_file(path):
    """Parse flat key=value lines; '#' comments and blank lines are ignored."""
    values = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"config line {lineno}: expected key=value, got {raw.strip()!r}")
        values[key.strip()] = value.strip()
    return values


_CONFIG_COERCERS = {
    "method": str,
    "m": int,
    "triplets": int,
    "epochs": int,
    "lambda": float,
    "loss": str,
    "gamma": float,
    "k": int,
    "seed": int,
    "trials": int,
    "train_file": str,
    "test_file": str,
    "out": str,
    "d": int,
    "r": int,
    "n": int,
    "delta": float,
    "eta": float,
    "m_sweep": str,
    "seeds": str,
    "save_metric": str,
    "trace_out": str,
    "metric_file": str,
}


def _merge_config(args, parser_defaults):
    """Fill argparse's None slots from the config file, then from defaults."""
    file_values = read_config_file(args.config) if getattr(args, "config", None) else {}
    for key, raw in file_values.items():
        if key not in _CONFIG_COERCERS:
            raise ConfigError(f"unknown config key {key!r}")
        dest = "lam" if key == "lambda" else ("n_triplets" if key == "triplets" else key)
        if not hasattr(args, dest):
            continue  # keys for other subcommands are tolerated
        if getattr(args, dest) is None:
            try:
                setattr(args, dest, _CONFIG_COERCERS[key](raw))
            except ValueError:
                raise ConfigError(f"config key {key!r}: bad value {raw!r}") from None
    for dest, default in parser_defaults.items():
        if getattr(args, dest, None) is None:
            setattr(args, dest, default)
    return args


def _int_list(text):
    try:
        return tuple(int(tok) for tok in text.replace(",", " ").split())
    except ValueError:
        raise ConfigError(f"expected a list of integers, got {text!r}") from None


def build_parser():
    parser = _Parser(prog="durp", description="Metric learning by dual random projection")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="key=value config file; flags override it")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=None, help="output path (default: stdout)")

    p_train = sub.add_parser("train", help="train a metric and evaluate it")
    add_common(p_train)
    p_train.add_argument("--method", choices=METHODS, default=None)
    p_train.add_argument("--m", type=int, default=None)
    p_train.add_argument("--triplets", dest="n_triplets", type=int, default=None)
    p_train.add_argument("--epochs", type=int, default=None)
    p_train.add_argument("--lambda", dest="lam", type=float, default=None)
    p_train.add_argument("--loss", choices=("hinge", "smoothed_hinge"), default=None)
    p_train.add_argument("--gamma", type=float, default=None)
    p_train.add_argument("--k", type=int, default=None)
    p_train.add_argument("--trials", type=int, default=None)
    p_train.add_argument("--train-file", dest="train_file", default=None)
    p_train.add_argument("--test-file", dest="test_file", default=None)
    p_train.add_argument("--save-metric", dest="save_metric", default=None,
                         help="write per-trial metric binaries to PATH[.trialT].bin")
    p_train.add_argument("--trace-out", dest="trace_out", default=None,
                         help="write per-trial solver trace CSVs")
    _TRAIN_DEFAULTS = {
        "method": "durp", "m": 10, "n_triplets": 100000, "epochs": 3, "lam": None,
        "loss": "hinge", "gamma": 1.0, "k": 5, "seed": 0, "trials": 5,
    }
    p_train.set_defaults(_defaults=_TRAIN_DEFAULTS, _run=cmd_train)

    p_eval = sub.add_parser("eval", help="evaluate a stored metric")
    add_common(p_eval)
    p_eval.add_argument("--metric-file", dest="metric_file", default=None)
    p_eval.add_argument("--train-file", dest="train_file", default=None)
    p_eval.add_argument("--test-file", dest="test_file", default=None)
    p_eval.add_argument("--k", type=int, default=None)
    p_eval.set_defaults(_defaults={"k": 5, "seed": 0}, _run=cmd_eval)

    p_spec = sub.add_parser("spectrum", help="normalized covariance spectrum CSV")
    add_common(p_spec)
    p_spec.add_argument("--train-file", dest="train_file", default=None)
    p_spec.set_defaults(_defaults={"seed": 0}, _run=cmd_spectrum)

    p_t1 = sub.add_parser("verify-t1", help="low-rank recovery trend harness")
    add_common(p_t1)
    p_t1.add_argument("--d", type=int, default=None)
    p_t1.add_argument("--r", type=int, default=None)
    p_t1.add_argument("--n", type=int, default=None)
    p_t1.add_argument("--triplets", dest="n_triplets", type=int, default=None)
    p_t1.add_argument("--m-sweep", dest="m_sweep", default=None,
                      help="comma-separated list of m values")
    p_t1.add_argument("--delta", type=float, default=None)
    p_t1.add_argument("--seeds", default=None, help="comma-separated seed list")
    p_t1.set_defaults(
        _defaults={"d": 400, "r": 3, "n": 300, "n_triplets": 500,
                   "m_sweep": "5,10,20,50,100,400", "delta": 0.1,
                   "seeds": "0,1,2,3,4,5,6,7,8,9", "seed": 0},
        _run=cmd_verify_t1,
    )

    p_t2 = sub.add_parser("verify-t2", help="smooth-loss dual recovery harness")
    add_common(p_t2)
    p_t2.add_argument("--d", type=int, default=None)
    p_t2.add_argument("--n", type=int, default=None)
    p_t2.add_argument("--triplets", dest="n_triplets", type=int, default=None)
    p_t2.add_argument("--m", type=int, default=None,
                      help="projection width (default: smallest m passing the sampling condition)")
    p_t2.add_argument("--delta", type=float, default=None)
    p_t2.add_argument("--eta", type=float, default=None)
    p_t2.add_argument("--gamma", type=float, default=None)
    p_t2.add_argument("--seeds", default=None, help="comma-separated seed list")
    p_t2.set_defaults(
        _defaults={"d": 500, "n": 250, "n_triplets": 200, "m": None, "delta": 0.1,
                   "eta": 1e-6, "gamma": 1.0, "seeds": "0,1,2,3,4,5,6,7,8,9", "seed": 0},
        _run=cmd_verify_t2,
    )

    p_samp = sub.add_parser("sample-triplets", help="sample active triplets to CSV")
    add_common(p_samp)
    p_samp.add_argument("--train-file", dest="train_file", default=None)
    p_samp.add_argument("--triplets", dest="n_triplets", type=int, default=None)
    p_samp.set_defaults(_defaults={"n_triplets": 100000, "seed": 0}, _run=cmd_sample)

    return parser


def _require(args, *names):
    for name in names:
        if getattr(args, name, None) in (None, ""):
            flag = "--" + name.replace("_", "-")
            raise ConfigError(f"{flag} is required (flag or config file)")


def _write_out(args, text):
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_train(args):
    _require(args, "train_file", "test_file", "method")
    config = RunConfig(
        method=args.method, train_file=args.train_file, test_file=args.test_file,
        m=args.m, n_triplets=args.n_triplets, epochs=args.epochs, lam=args.lam,
        loss=args.loss, gamma=args.gamma, k=args.k, seed=args.seed, trials=args.trials,
    )
    report, results = run_method(config)
    if getattr(args, "save_metric", None):
        for i, res in enumerate(results):
            path = args.save_metric if config.trials == 1 else f"{args.save_metric}.trial{i}"
            save_metric(path, res.metric)
    if getattr(args, "trace_out", None):
        for i, res in enumerate(results):
            path = args.trace_out if config.trials == 1 else f"{args.trace_out}.trial{i}"
            with open(path, "w", encoding="utf-8") as fh:
                fh.write("epoch,dual_objective,duality_gap,seconds\n")
                for epoch, obj, gap, sec in res.solver_trace:
                    fh.write("%d,%.17g,%.17g,%.6f\n" % (epoch, obj, gap, sec))
    _write_out(args, json.dumps(report, indent=2) + "\n")


def cmd_eval(args):
    _require(args, "metric_file", "train_file", "test_file")
    metric = load_metric(args.metric_file)
    train, _ = load_libsvm(args.train_file)
    test, _ = load_libsvm(args.test_file, d=train.d)
    report = evaluate_metric(metric, train, test, args.k)
    _write_out(args, report.to_json() + "\n")


def cmd_spectrum(args):
    _require(args, "train_file")
    _write_out(args, harness_mod.emit_spectrum(args.train_file))


def cmd_verify_t1(args):
    config = harness_mod.HarnessConfig(
        d=args.d, r=args.r, n=args.n, n_triplets=args.n_triplets,
        m_sweep=_int_list(args.m_sweep), delta=args.delta, seeds=_int_list(args.seeds),
    )
    result = harness_mod.verify_theorem1(config)
    _write_out(args, harness_mod.theorem1_csv(result))


def cmd_verify_t2(args):
    config = harness_mod.HarnessConfig(
        d=args.d, r=1, n=args.n, n_triplets=args.n_triplets,
        m_sweep=(1,), delta=args.delta, eta=args.eta, gamma=args.gamma,
        seeds=_int_list(args.seeds),
    )
    result = harness_mod.verify_theorem2(config, m=args.m)
    _write_out(args, harness_mod.theorem2_csv(result))


def cmd_sample(args):
    _require(args, "train_file")
    if not args.out:
        raise ConfigError("--out is required for sample-triplets")
    train, _ = load_libsvm(args.train_file)
    triplets = sample_active_triplets(train, args.n_triplets, args.seed)
    save_triplets(args.out, triplets)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _merge_config(args, args._defaults)
        # config values validated by the dataclasses / functions they feed
        try:
            args._run(args)
        except ConfigError:
            raise
        except (ValueError, OSError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
