"""Configuration files, result persistence, and provenance hashing.

Run configurations are JSON documents with a schema_version field; they
round-trip losslessly through load/save.  Per-replication results go to
JSONL (one self-contained line each, times rendered to 12 significant
digits), ensemble summaries to CSV.  The output directory can be forced
with the ZFIRE_OUT environment variable.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
from pathlib import Path

from .distributions import DeltaSpec, DistSpec
from .engine import ModelConfig, RunSummary
from .errors import ConfigError

SCHEMA_VERSION = 1


def _num_out(x):
    if x is None:
        return None
    if math.isinf(x):
        return "inf"
    return x


def _num_in(x):
    if x == "inf":
        return math.inf
    return x


def model_config_to_dict(cfg: ModelConfig) -> dict:
    return {
        "theta": cfg.theta_spec.to_dict(),
        "delta": cfg.delta_spec.to_dict(),
        "t_max": _num_out(cfg.t_max),
        "seed": cfg.seed,
        "site_sentinel": cfg.site_sentinel,
        "max_fires": cfg.max_fires,
        "frontier_mode": cfg.frontier_mode,
        "stop_on_infinite": cfg.stop_on_infinite,
        "site_window": cfg.site_window,
        "site_cap": cfg.site_cap,
        "stop_when_site_burnt": cfg.stop_when_site_burnt,
        "record_attempts": cfg.record_attempts,
    }


def model_config_from_dict(d: dict) -> ModelConfig:
    try:
        return ModelConfig(
            theta_spec=DistSpec.from_dict(d["theta"]),
            delta_spec=DeltaSpec.from_dict(d["delta"]),
            t_max=_num_in(d["t_max"]),
            seed=d["seed"],
            site_sentinel=d.get("site_sentinel", 1000),
            max_fires=d.get("max_fires"),
            frontier_mode=d.get("frontier_mode", "heuristic"),
            stop_on_infinite=d.get("stop_on_infinite", True),
            site_window=d.get("site_window"),
            site_cap=d.get("site_cap", 2_000_000),
            stop_when_site_burnt=d.get("stop_when_site_burnt"),
            record_attempts=d.get("record_attempts", True),
        )
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed model config: {exc}") from exc


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def config_hash(cfg: ModelConfig) -> str:
    return hashlib.sha256(canonical_json(model_config_to_dict(cfg)).encode()).hexdigest()


def save_config(path, model: ModelConfig, ensemble=None) -> None:
    doc = {"schema_version": SCHEMA_VERSION, "model": model_config_to_dict(model)}
    if ensemble is not None:
        doc["ensemble"] = ensemble.to_dict()
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def load_config(path):
    """Returns (ModelConfig, EnsembleSpec | None)."""
    try:
        doc = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}")
    if not isinstance(doc, dict) or "model" not in doc:
        raise ConfigError("config file needs a top-level 'model' object")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version!r}")
    model = model_config_from_dict(doc["model"])
    ensemble = None
    if "ensemble" in doc:
        from .experiments import EnsembleSpec
        ensemble = EnsembleSpec.from_dict(doc["ensemble"], base=model)
    return model, ensemble


# ---------------------------------------------------------------------------
# result records
# ---------------------------------------------------------------------------

def _t12(x):
    """Times carry 12 significant digits in serialized records."""
    if x is None:
        return None
    if math.isinf(x):
        return None
    return float(f"{x:.12g}")


def fire_to_dict(f) -> dict:
    return {
        "k": f.index,
        "start": _t12(f.start_time),
        "rightmost": f.rightmost,
        "end": _t12(f.end_time),
        "classification": f.classification,
        "reason": f.truncated_reason,
        "jumps": f.jump_count,
    }


def maxima_to_dict(m) -> dict:
    return {
        "i": m.index,
        "m": m.site,
        "fire": m.fire_index,
        "f_first": _t12(m.f_first),
        "f_second": _t12(m.f_second),
        "stretches": list(m.stretch_lengths),
        "jumps": m.jumps,
        "completed": m.completed,
    }


def run_record(run: RunSummary) -> dict:
    """One JSONL line worth of replication output."""
    return {
        "seed": run.seed,
        "kappa": run.kappa,
        "T": _t12(run.T),
        "end_reason": run.end_reason,
        "global_max": run.global_max,
        "events": run.events,
        "fires": [fire_to_dict(f) for f in run.fires],
        "maxima": [maxima_to_dict(m) for m in run.maxima],
    }


def write_jsonl(records, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(canonical_json(rec))
            fh.write("\n")


def write_csv(rows, path, fieldnames=None) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = list(rows)
    if fieldnames is None:
        fieldnames = list(rows[0].keys()) if rows else []
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=fieldnames)
        w.writeheader()
        for r in rows:
            w.writerow(r)


def resolve_out_dir(cli_value) -> Path:
    """--out, overridden by ZFIRE_OUT when set."""
    env = os.environ.get("ZFIRE_OUT")
    out = Path(env) if env else Path(cli_value if cli_value else ".")
    out.mkdir(parents=True, exist_ok=True)
    return out
