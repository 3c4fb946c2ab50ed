"""Command-line entry point: ``psk-receiver {optimize,bounds,simulate,info}``."""

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from ._validation import DegenerateEvidenceError, DimensionCapError, FormatVersionError, InvalidParameterError
from .bounds import heterodyne_capacity, helstrom_mpsk, holevo_bound, qnl
from .config import load_config
from .ensemble import make_mpsk_ensemble
from .files import read_schedule, write_dataset, write_schedule
from .infotheory import mutual_information
from .montecarlo import simulate_trials
from .optimizer import N_CAP, optimize
from .receiver import HISTORY_TABLE_CAP, evaluate_strategy

logger = logging.getLogger("psk_receiver")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3
# sequential seeds from flat, historical from sequential
_ORDER = ("non-optimized", "flat", "sequential", "historical")
_SEED_FROM = {"sequential": "flat", "historical": "sequential"}


def _schedule_name(kind, mean_photon):
    return f"{kind}_n{mean_photon:.6g}.json"


def _optimize_point(config, mean_photon):
    ensemble = make_mpsk_ensemble(config.M, float(mean_photon))
    model = config.model
    wanted = set(config.strategies)
    needed = set(wanted)
    for kind in config.strategies:
        while kind in _SEED_FROM:
            kind = _SEED_FROM[kind]
            needed.add(kind)
    results = {}
    for kind in _ORDER:
        if kind not in needed:
            continue
        seed_from = results.get(_SEED_FROM.get(kind))
        results[kind] = optimize(
            kind, ensemble, model, config.r_max, config.seed,
            seed_strategy=seed_from.strategy if seed_from else None,
        )
        logger.info("<n>=%.4g %-13s P_e=%.8f", mean_photon, kind, results[kind].p_error)
    return [(kind, results[kind]) for kind in _ORDER if kind in wanted]


def _model_columns(model):
    return {"efficiency": model.efficiency, "visibility": model.visibility, "dark": model.dark_per_pulse}


def cmd_optimize(config, out, threads=1, emit_histories=False):
    if "historical" in config.strategies and config.N > N_CAP:
        raise DimensionCapError(f"historical optimization is capped at N={N_CAP}")
    if emit_histories and config.N > HISTORY_TABLE_CAP:
        raise InvalidParameterError(f"--emit-histories is limited to N <= {HISTORY_TABLE_CAP}")
    grid = [float(n) for n in config.grid]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            per_point = list(pool.map(_optimize_point, [config] * len(grid), grid))
    else:
        per_point = [_optimize_point(config, n) for n in grid]
    model = config.model
    rows = []
    for n, results in zip(grid, per_point):
        ensemble = make_mpsk_ensemble(config.M, n)
        refs = {
            "qnl": qnl(config.M, n, 1.0),
            "qnl_scaled": qnl(config.M, n, model.efficiency) if model.efficiency > 0 else 1.0 - 1.0 / config.M,
            "helstrom": helstrom_mpsk(config.M, n),
        }
        for kind, res in results:
            name = _schedule_name(kind, n)
            write_schedule(out / "schedules" / name, res.strategy, ensemble, model, res.p_error)
            if emit_histories:
                report = evaluate_strategy(res.strategy, ensemble, model)
                hist_path = out / "histories" / name
                hist_path.parent.mkdir(parents=True, exist_ok=True)
                hist_path.write_text(json.dumps(report.to_dict(include_histories=True)) + "\n", encoding="utf-8")
            rows.append({
                "strategy": kind, "M": config.M, "N": config.N, "mean_photon": n,
                **_model_columns(model), "p_error": res.p_error, **refs,
                "converged": res.converged, "schedule": name,
            })
    return write_dataset(out / "optimize.csv", "optimize", rows, config.to_record(), __version__)


def cmd_bounds(config, out):
    eta = config.efficiency
    rows = []
    for n in config.grid:
        n = float(n)
        rows.append({
            "mean_photon": n, "M": config.M, "efficiency": eta,
            "qnl": qnl(config.M, n, 1.0),
            "qnl_scaled": qnl(config.M, n, eta) if eta > 0 else 1.0 - 1.0 / config.M,
            "helstrom": helstrom_mpsk(config.M, n),
            "holevo": holevo_bound(n),
            "heterodyne_capacity": heterodyne_capacity(n),
        })
    return write_dataset(out / "bounds.csv", "bounds", rows, config.to_record(), __version__)


def _load_schedules(config, out, paths):
    if not paths:
        paths = sorted((out / "schedules").glob("*.json"))
    if not paths:
        raise InvalidParameterError("no schedule files given or found under <out>/schedules")
    loaded = []
    for path in paths:
        strategy, ensemble, model, p_error = read_schedule(path)
        if ensemble.n_states != config.M or model != config.model:
            raise InvalidParameterError(f"{path}: schedule was optimized for a different M or system model")
        loaded.append((Path(path), strategy, ensemble, model))
    return loaded


def cmd_simulate(config, out, schedules=(), threads=1):
    if config.trials is None:
        raise InvalidParameterError("config must set trials >= 1 to simulate")
    rows = []
    for path, strategy, ensemble, model in _load_schedules(config, out, schedules):
        batch = None
        for run in range(config.runs):
            result = simulate_trials(strategy, ensemble, model, config.trials, config.seed + run, threads)
            batch = result if batch is None else batch.merge(result)
        rows.append({
            "strategy": strategy.kind, "M": ensemble.n_states, "N": model.slices,
            "mean_photon": ensemble.mean_photon, **_model_columns(model),
            "trials": batch.trials, "runs": config.runs, "p_hat": batch.p_hat, "stderr": batch.stderr,
            "seed": config.seed, "p_exact": evaluate_strategy(strategy, ensemble, model).p_error,
        })
        logger.info("%s: p_hat=%.6f +- %.6f", path.name, batch.p_hat, batch.stderr)
    return write_dataset(out / "simulate.csv", "simulate", rows, config.to_record(), __version__)


def cmd_info(config, out, schedules=()):
    rows = []
    for path, strategy, ensemble, model in _load_schedules(config, out, schedules):
        channel = evaluate_strategy(strategy, ensemble, model).channel
        n = ensemble.mean_photon
        rows.append({
            "strategy": strategy.kind, "mean_photon": n,
            "bits": mutual_information(channel, ensemble.priors),
            "heterodyne_capacity": heterodyne_capacity(n), "holevo": holevo_bound(n),
        })
    return write_dataset(out / "info.csv", "info", rows, config.to_record(), __version__)


def build_parser():
    parser = argparse.ArgumentParser(prog="psk-receiver", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("optimize", "optimize displacement schedules over the mean-photon grid"),
        ("bounds", "tabulate QNL, Helstrom, Holevo and heterodyne-capacity curves"),
        ("simulate", "Monte Carlo trials of optimized schedules"),
        ("info", "mutual information of optimized schedules"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, type=Path, help="YAML or JSON sweep config")
        p.add_argument("--out", type=Path, help="output directory (overrides config.output)")
        p.add_argument("--seed", type=int, help="RNG seed (overrides config.seed)")
        p.add_argument("--threads", type=int, default=1, help="worker count")
        p.add_argument("-v", "--verbose", action="store_true")
        if name == "optimize":
            p.add_argument("--emit-histories", action="store_true",
                           help=f"also write per-history tables (N <= {HISTORY_TABLE_CAP})")
        if name in ("simulate", "info"):
            p.add_argument("schedules", nargs="*", type=Path,
                           help="schedule files (default: <out>/schedules/*.json)")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = load_config(args.config)
        if args.seed is not None:
            config.seed = args.seed
            config.__post_init__()
        if args.threads < 1:
            raise InvalidParameterError("--threads must be >= 1")
        out = Path(args.out or config.output)
        if args.command == "optimize":
            path = cmd_optimize(config, out, args.threads, args.emit_histories)
        elif args.command == "bounds":
            path = cmd_bounds(config, out)
        elif args.command == "simulate":
            path = cmd_simulate(config, out, args.schedules, args.threads)
        else:
            path = cmd_info(config, out, args.schedules)
    except (InvalidParameterError, FormatVersionError, DimensionCapError, OSError, ValueError) as exc:
        print(f"psk-receiver: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DegenerateEvidenceError, ArithmeticError, FloatingPointError) as exc:
        print(f"psk-receiver: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
