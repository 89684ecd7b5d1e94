"""Schema-versioned CSV tables and binary PGM rasters.

Every CSV opens with `#schema=<name>/<version>`, then `#key=value` metadata
lines, then the column header and rows.  Floats are written with 12
significant digits, files are UTF-8 with LF line endings, and identical
inputs produce byte-identical files; downstream parsers key on the schema
line and must reject versions they do not know.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

SCHEMAS = {
    "sweep": 1,
    "walks": 1,
    "tail": 1,
    "drift": 1,
    "cone": 1,
    "couple": 1,
    "raster": 1,
}


def fmt_value(v) -> str:
    """Canonical CSV text for one cell."""
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".12g")
    return str(v)


def write_csv(path, schema: str, meta: dict, header: list[str], rows) -> None:
    """Emit one schema-versioned CSV file.

    `meta` entries become `#key=value` lines in insertion order; `rows`
    yields sequences matching `header`.
    """
    version = SCHEMAS[schema]
    lines = [f"#schema={schema}/{version}"]
    for k, v in meta.items():
        lines.append(f"#{k}={fmt_value(v)}")
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(fmt_value(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def read_csv(path) -> tuple[str, dict[str, str], list[str], list[list[str]]]:
    """Parse a schema-versioned CSV into (schema, meta, header, rows).

    The schema string keeps its `name/version` form; all values stay text.
    """
    text = Path(path).read_text(encoding="utf-8")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or not lines[0].startswith("#schema="):
        raise ValueError(f"{path}: missing #schema line")
    schema = lines[0][len("#schema="):]
    name = schema.split("/", 1)[0]
    if name not in SCHEMAS or schema != f"{name}/{SCHEMAS[name]}":
        raise ValueError(f"{path}: unsupported schema {schema!r}")
    meta: dict[str, str] = {}
    i = 1
    while i < len(lines) and lines[i].startswith("#"):
        k, _, v = lines[i][1:].partition("=")
        meta[k] = v
        i += 1
    if i >= len(lines):
        raise ValueError(f"{path}: missing column header")
    header = lines[i].split(",")
    rows = [line.split(",") for line in lines[i + 1:]]
    return schema, meta, header, rows


# ---------------------------------------------------------------------------
# PGM rasters
# ---------------------------------------------------------------------------


def state_to_gray(states: np.ndarray, n_states: int) -> np.ndarray:
    """Map alphabet states to gray levels: 0 is white, the top state black.

    State k maps to floor(255 * (1 - k/(n-1))), so for two states 0 -> 255
    and 1 -> 0.
    """
    if n_states < 2:
        raise ValueError("need at least 2 states")
    k = np.asarray(states, dtype=np.float64)
    return np.floor(255.0 * (1.0 - k / (n_states - 1))).astype(np.uint8)


def write_pgm(path, grid: np.ndarray, comments: list[str] | None = None) -> None:
    """Write a binary (P5, maxval 255) PGM; grid rows top to bottom."""
    g = np.ascontiguousarray(grid, dtype=np.uint8)
    if g.ndim != 2:
        raise ValueError(f"raster must be 2-d, got shape {g.shape}")
    head = ["P5"]
    for c in comments or []:
        if "\n" in c:
            raise ValueError("PGM comments cannot span lines")
        head.append(f"# {c}")
    head.append(f"{g.shape[1]} {g.shape[0]}")
    head.append("255")
    Path(path).write_bytes("\n".join(head).encode("ascii") + b"\n" + g.tobytes())


def read_pgm(path) -> tuple[np.ndarray, list[str]]:
    """Parse a binary PGM written by write_pgm into (grid, comments)."""
    data = Path(path).read_bytes()
    pos = 0
    tokens: list[bytes] = []
    comments: list[str] = []
    while len(tokens) < 4:
        if pos >= len(data):
            raise ValueError(f"{path}: truncated PGM header")
        if data[pos:pos + 1].isspace():
            pos += 1
            continue
        if data[pos:pos + 1] == b"#":
            end = data.index(b"\n", pos)
            comments.append(data[pos + 1:end].decode("ascii").strip())
            pos = end + 1
            continue
        end = pos
        while end < len(data) and not data[end:end + 1].isspace():
            end += 1
        tokens.append(data[pos:end])
        pos = end
    if tokens[0] != b"P5":
        raise ValueError(f"{path}: not a binary PGM")
    w, h, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    if maxval != 255:
        raise ValueError(f"{path}: unsupported maxval {maxval}")
    pos += 1
    body = data[pos:pos + w * h]
    if len(body) != w * h:
        raise ValueError(f"{path}: truncated PGM body")
    return np.frombuffer(body, dtype=np.uint8).reshape(h, w), comments


# ---------------------------------------------------------------------------
# JSON configs
# ---------------------------------------------------------------------------


def load_config(path) -> dict:
    """Read a flat JSON object mirroring CLI flags."""
    with open(path, encoding="utf-8") as f:
        cfg = json.load(f)
    if not isinstance(cfg, dict):
        raise ValueError(f"{path}: config must be a JSON object")
    return cfg
