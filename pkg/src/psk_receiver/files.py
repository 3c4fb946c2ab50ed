"""Versioned schedule files and CSV datasets with JSON provenance sidecars."""

import csv
import hashlib
import io
import json
from pathlib import Path

from ._validation import FormatVersionError, InvalidParameterError
from .ensemble import SystemModel, make_mpsk_ensemble
from .receiver import Strategy

SCHEDULE_FORMAT = "psk-receiver/schedule"
SCHEDULE_VERSION = 1
DATASET_FORMAT = "psk-receiver/dataset"
DATASET_VERSION = 1

DATASET_COLUMNS = {
    "optimize": ("strategy", "M", "N", "mean_photon", "efficiency", "visibility", "dark",
                 "p_error", "qnl", "qnl_scaled", "helstrom", "converged", "schedule"),
    "bounds": ("mean_photon", "M", "efficiency", "qnl", "qnl_scaled", "helstrom", "holevo",
               "heterodyne_capacity"),
    "simulate": ("strategy", "M", "N", "mean_photon", "efficiency", "visibility", "dark",
                 "trials", "runs", "p_hat", "stderr", "seed", "p_exact"),
    "info": ("strategy", "mean_photon", "bits", "heterodyne_capacity", "holevo"),
}


def git_blob_hash(data):
    """Content hash computed the way ``git hash-object`` does for a blob."""
    header = f"blob {len(data)}\0".encode()
    return hashlib.sha1(header + data).hexdigest()


def schedule_record(strategy, ensemble, model, p_error):
    return {
        "format": SCHEDULE_FORMAT,
        "version": SCHEDULE_VERSION,
        "kind": strategy.kind,
        "M": ensemble.n_states,
        "N": model.slices,
        "mean_photon": ensemble.mean_photon,
        "priors": [float(p) for p in ensemble.priors],
        "model": {
            "efficiency": model.efficiency,
            "visibility": model.visibility,
            "dark_per_pulse": model.dark_per_pulse,
            "slices": model.slices,
        },
        "r_max": strategy.r_max,
        "ratios": [float(r) for r in strategy.ratios],
        "p_error": float(p_error),
    }


def write_schedule(path, strategy, ensemble, model, p_error, extra=None):
    record = schedule_record(strategy, ensemble, model, p_error)
    if extra:
        record.update(extra)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(record, indent=2) + "\n", encoding="utf-8")
    return path


def read_schedule(path):
    """Load a schedule file; returns ``(strategy, ensemble, model, p_error)``."""
    record = json.loads(Path(path).read_text(encoding="utf-8"))
    if record.get("format") != SCHEDULE_FORMAT or record.get("version") != SCHEDULE_VERSION:
        raise FormatVersionError(
            f"{path}: expected {SCHEDULE_FORMAT} v{SCHEDULE_VERSION}, "
            f"got {record.get('format')} v{record.get('version')}"
        )
    try:
        model = SystemModel(**record["model"])
        ensemble = make_mpsk_ensemble(record["M"], record["mean_photon"], record["priors"])
        strategy = Strategy(record["kind"], record["ratios"], record["r_max"])
        if model.slices != record["N"]:
            raise InvalidParameterError("N does not match model.slices")
        return strategy, ensemble, model, float(record["p_error"])
    except KeyError as exc:
        raise FormatVersionError(f"{path}: missing field {exc}") from None


def _format(value):
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_dataset(path, kind, rows, config=None, package_version=None):
    """Write ``rows`` (dicts) as UTF-8 CSV plus a ``.json`` sidecar."""
    columns = DATASET_COLUMNS[kind]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_format(row[c]) for c in columns])
    data = buf.getvalue().encode("utf-8")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(data)
    sidecar = {
        "format": DATASET_FORMAT,
        "version": DATASET_VERSION,
        "kind": kind,
        "columns": list(columns),
        "rows": len(rows),
        "config": config,
        "package_version": package_version,
        "content_hash": git_blob_hash(data),
    }
    path.with_suffix(".json").write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def read_dataset(path):
    """Read a dataset back; rejects unknown versions and content-hash mismatches."""
    path = Path(path)
    meta = json.loads(path.with_suffix(".json").read_text(encoding="utf-8"))
    if meta.get("format") != DATASET_FORMAT or meta.get("version") != DATASET_VERSION:
        raise FormatVersionError(f"{path}: unsupported dataset format {meta.get('format')} v{meta.get('version')}")
    data = path.read_bytes()
    if git_blob_hash(data) != meta["content_hash"]:
        raise FormatVersionError(f"{path}: content hash does not match sidecar")
    reader = csv.DictReader(io.StringIO(data.decode("utf-8")))
    if tuple(reader.fieldnames) != tuple(meta["columns"]):
        raise FormatVersionError(f"{path}: columns differ from sidecar")
    return list(reader), meta
