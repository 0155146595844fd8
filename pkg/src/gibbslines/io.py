"""Deterministic CSV/JSON emission: 17-significant-digit floats, LF line
endings, and a config metadata block in every file."""

from __future__ import annotations

import json
import math
from pathlib import Path

__all__ = ["format_float", "write_csv", "write_json", "write_ecdf_csv"]


def format_float(x) -> str:
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return f"{x:.17g}"
    return str(x)


def _config_lines(config: dict) -> list[str]:
    return [f"# {key}={format_float(config[key])}" for key in sorted(config)]


def write_csv(path, header: list[str], rows, config: dict) -> None:
    """Comma-separated values under a '# key=value' metadata block."""
    lines = _config_lines(config)
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(format_float(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", newline="\n")


def write_json(path, payload: dict, config: dict) -> None:
    """JSON object with the effective config embedded under 'config'."""
    doc = {"config": {k: config[k] for k in sorted(config)}, **payload}
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", newline="\n")


def write_ecdf_csv(path, ecdf, config: dict) -> None:
    """Empirical-CDF dump: one sorted sample value per line."""
    write_csv(path, ["value"], ((float(v),) for v in ecdf.samples), config)
