"""Dataset files, scenario configs and result serialization."""

import csv
import io
import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np
import tomli

from .diagnostics import RegressionData
from .errors import ConfigError, ParseError, SerialCorrError
from .montecarlo import SimulationScenario

RESULT_COLUMNS = (
    "name", "n", "p", "f", "law", "ar", "ma", "test", "lag", "alpha", "nu4",
    "variance_mode", "robust", "fixed_design", "replications", "master_seed",
    "rejections", "errors", "rejection_rate", "mc_std_error", "reference", "status",
)

_SCENARIO_KEYS = {
    "name", "n", "p", "f", "law", "ar", "ma", "tau", "q", "alpha", "replications", "seed",
    "nu4", "variance_mode", "robust", "fixed_design", "beta", "check_ratio", "reference",
}


def _is_number(token):
    try:
        float(token)
    except ValueError:
        return False
    return True


def read_dataset(path):
    """Comma-separated file: y in the first column, X in the rest, optional header row."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if rows and not all(_is_number(c) for c in rows[0]):
        rows = rows[1:]
    if not rows:
        raise ParseError(f"{path}: no data rows")
    width = len(rows[0])
    if width < 2:
        raise ParseError(f"{path}: need a response column and at least one regressor")
    values = np.empty((len(rows), width))
    for i, row in enumerate(rows):
        if len(row) != width:
            raise ParseError(f"{path}: row {i + 1} has {len(row)} fields, expected {width}")
        for j, cell in enumerate(row):
            try:
                v = float(cell)
            except ValueError:
                raise ParseError(f"{path}: row {i + 1}, column {j + 1}: not a number: {cell!r}") from None
            if not math.isfinite(v):
                raise ParseError(f"{path}: row {i + 1}, column {j + 1}: non-finite value")
            values[i, j] = v
    n, p = values.shape[0], width - 1
    if n < p + 2:
        raise ParseError(f"{path}: n={n} rows is too few for p={p} regressors (need n >= p + 2)")
    return RegressionData(values[:, 0], values[:, 1:])


def write_dataset(path, y, x, header=True):
    """Write ``(y, X)`` so that :func:`read_dataset` recovers the exact floats."""
    x = np.asarray(x, dtype=np.float64)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        if header:
            w.writerow(["y"] + [f"x{j + 1}" for j in range(x.shape[1])])
        for yi, row in zip(y, x):
            w.writerow([repr(float(yi))] + [repr(float(v)) for v in row])


@dataclass
class ScenarioConfig:
    scenarios: list
    references: list
    seed: int = 0
    workers: int = 1
    out: str = None


def bundled_config(name):
    """Path-like handle to a config shipped with the package, or None."""
    if not name.endswith(".toml"):
        name += ".toml"
    res = resources.files("serialcorr").joinpath("configs", name)
    return res if res.is_file() else None


def load_config(path, seed=None, replications=None):
    """Parse and validate every scenario entry before anything runs."""
    p = Path(path)
    src = p if p.is_file() else bundled_config(p.name)
    if src is None:
        raise ConfigError(f"config {path} not found (also not a bundled config)")
    try:
        doc = tomli.loads(src.read_text(encoding="utf-8"))
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    run = doc.get("run", {})
    base_seed = int(seed if seed is not None else run.get("seed", 0))
    base_reps = replications if replications is not None else run.get("replications", 10_000)
    entries = doc.get("scenario", [])
    if not entries:
        raise ConfigError(f"{path}: no [[scenario]] entries")
    scenarios, refs = [], []
    for i, e in enumerate(entries):
        unknown = set(e) - _SCENARIO_KEYS
        if unknown:
            raise ConfigError(f"unknown keys {sorted(unknown)}", index=i)
        kw = {k: v for k, v in e.items() if k not in ("seed", "reference")}
        kw.setdefault("name", f"scenario{i}")
        kw["master_seed"] = int(e.get("seed", base_seed))
        kw["replications"] = int(replications if replications is not None
                                 else e.get("replications", base_reps))
        for key in ("ar", "ma"):
            kw[key] = tuple(kw.get(key, ()))
        try:
            scenarios.append(SimulationScenario(**kw))
        except (SerialCorrError, TypeError, ValueError) as exc:
            raise ConfigError(str(exc), index=i) from exc
        refs.append(e.get("reference"))
    return ScenarioConfig(scenarios=scenarios, references=refs, seed=base_seed,
                          workers=int(run.get("workers", 1)), out=run.get("out"))


def result_row(result, reference=None, status="ok"):
    s = result.scenario if hasattr(result, "scenario") else result
    row = {
        "name": s.name, "n": s.n, "p": s.p, "f": s.f, "law": s.law,
        "ar": list(s.ar), "ma": list(s.ma), "test": s.test, "lag": s.lag, "alpha": s.alpha,
        "nu4": "estimate" if s.nu4 is None else s.nu4, "variance_mode": s.variance_mode,
        "robust": s.robust, "fixed_design": s.fixed_design,
        "replications": s.replications, "master_seed": s.master_seed,
        "rejections": None, "errors": None, "rejection_rate": None, "mc_std_error": None,
        "reference": reference, "status": status,
    }
    if status == "ok":
        # no valid replications leaves the rate undefined
        ok = result.valid > 0
        row.update(rejections=result.rejections, errors=result.errors,
                   rejection_rate=result.rejection_rate if ok else None,
                   mc_std_error=result.mc_std_error if ok else None)
    return row


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, list):
        return ";".join(repr(float(c)) for c in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_results(path, rows):
    """CSV (fixed column order) unless ``path`` ends in ``.json``."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        path.write_text(json.dumps({"results": rows}, indent=2) + "\n", encoding="utf-8")
        return
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(RESULT_COLUMNS)
        for row in rows:
            w.writerow([_csv_cell(row[c]) for c in RESULT_COLUMNS])


def load_schema(name):
    """Bundled JSON schema by name: ``"report"`` or ``"simulation"``."""
    if not name.endswith(".json"):
        name = f"{name}.schema.json"
    return json.loads(resources.files("serialcorr").joinpath("schema", name).read_text(encoding="utf-8"))
