"""Deterministic text output: profile tables, orbit tables and summaries."""

from __future__ import annotations

import json
import math
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .equilibrium import SolutionProfile

PROFILE_COLUMNS = ("r", "delta", "eta", "m", "rho", "p_rad", "p_tan")
NUMBER_FORMAT = "{:.16e}"  # 17 significant digits


def _fmt(x) -> str:
    return NUMBER_FORMAT.format(float(x))


def profile_rows(profile: SolutionProfile) -> np.ndarray:
    return np.column_stack([profile.r, profile.delta, profile.eta, profile.m,
                            profile.rho, profile.p_rad, profile.p_tan])


def profile_csv(profiles: Sequence[SolutionProfile], with_body: bool = False) -> str:
    header = (("body",) if with_body else ()) + PROFILE_COLUMNS
    lines = [",".join(header)]
    for j, prof in enumerate(profiles):
        prefix = f"{j}," if with_body else ""
        for row in profile_rows(prof):
            lines.append(prefix + ",".join(_fmt(x) for x in row))
    return "\n".join(lines) + "\n"


def table_csv(columns: Sequence[str], rows: Iterable[Sequence[float]], int_columns: int = 0) -> str:
    """CSV with the first ``int_columns`` printed as integers."""
    lines = [",".join(columns)]
    for row in rows:
        cells = [str(int(x)) for x in row[:int_columns]] + [_fmt(x) for x in row[int_columns:]]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def orbit_csv(orbits: Sequence[np.ndarray]) -> str:
    rows = [(k, *row) for k, orb in enumerate(orbits) for row in orb]
    return table_csv(("orbit", "xi", "u", "y", "z"), rows, int_columns=1)


def to_jsonable(obj):
    """Plain Python structure with floats, for a stable JSON rendering."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def summary_json(summary: dict) -> str:
    return json.dumps(to_jsonable(summary), sort_keys=True, indent=2) + "\n"


def write_text(path: Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path
