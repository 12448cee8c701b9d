"""File formats: CSV at 12 significant digits, JSON, PGM heatmaps, traces.

Every writer is deterministic (no timestamps, sorted keys, fixed float
formatting), so identical inputs produce byte-identical files.  The
string "nan" in CSV and null in JSON mark pairs that were not computed;
zero is a meaningful distance and never doubles as a marker.
"""
from __future__ import annotations

import base64
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .infogeo import DistanceField, SweepCurve
from .qca import GateRecord, LayerRecord, QcaConfig, RunTrace, StateVector, UpdateRule


def fmt12(v: float) -> str:
    """12 significant digits; NaN -> "nan"; negative zero normalized."""
    if math.isnan(v):
        return "nan"
    if v == 0.0:
        v = 0.0
    return f"{v:.12g}"


def json_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def matrix_csv(col_labels: Sequence, row_labels: Sequence, values: np.ndarray,
               corner: str = "label") -> str:
    lines = [",".join([corner, *map(str, col_labels)])]
    for lab, row in zip(row_labels, values):
        lines.append(",".join([str(lab), *(fmt12(float(v)) for v in row)]))
    return "\n".join(lines) + "\n"


def parse_matrix_csv(text: str) -> tuple[list[str], list[str], np.ndarray]:
    lines = [ln for ln in text.splitlines() if ln]
    cols = lines[0].split(",")[1:]
    rows, data = [], []
    for ln in lines[1:]:
        parts = ln.split(",")
        rows.append(parts[0])
        data.append([float(p) for p in parts[1:]])
    return cols, rows, np.array(data)


def distance_field_csv(field: DistanceField) -> str:
    return matrix_csv(field.labels, field.labels, field.values)


def distance_field_json_obj(field: DistanceField) -> dict:
    values = [[None if math.isnan(v) else float(v) for v in row] for row in field.values]
    return {"time_step": field.time_step, "labels": list(field.labels), "values": values}


def sweep_csv(curve: SweepCurve, param: str = "z", value: str = "delta") -> str:
    lines = [f"{param},{value}"]
    for z, v in zip(curve.grid, curve.values):
        lines.append(f"{fmt12(z)},{fmt12(v)}")
    return "\n".join(lines) + "\n"


def series_csv(col_labels: Sequence, rows: Iterable[tuple[int, Sequence[float]]],
               corner: str = "step") -> str:
    """Time series of per-site values, one row per recorded step."""
    lines = [",".join([corner, *map(str, col_labels)])]
    for step, vals in rows:
        lines.append(",".join([str(step), *(fmt12(float(v)) for v in vals)]))
    return "\n".join(lines) + "\n"


def write_pgm(path: Path, matrix: np.ndarray) -> dict:
    """8-bit binary PGM with linear min->0, max->255 mapping.

    NaN entries render as 0.  Returns the scale record that callers
    should persist alongside the image.
    """
    m = np.asarray(matrix, dtype=float)
    finite = m[np.isfinite(m)]
    if finite.size == 0:
        lo, hi = 0.0, 0.0
    else:
        lo, hi = float(np.min(finite)), float(np.max(finite))
    if hi > lo:
        scaled = (m - lo) / (hi - lo) * 255.0
    else:
        scaled = np.zeros_like(m)
    pixels = np.where(np.isfinite(m), np.rint(scaled), 0.0).astype(np.uint8)
    header = f"P5\n{m.shape[1]} {m.shape[0]}\n255\n".encode("ascii")
    Path(path).write_bytes(header + pixels.tobytes())
    return {
        "min": lo,
        "max": hi,
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "mapping": "linear min->0, max->255; nan -> 0",
    }


def _complex_pairs(m: np.ndarray) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(m, dtype=complex).reshape(-1)]


def _matrix_from_pairs(pairs: Sequence[Sequence[float]], dim: int) -> np.ndarray:
    flat = np.array([complex(re, im) for re, im in pairs], dtype=complex)
    return flat.reshape(dim, dim)


def _amplitudes_b64(state: StateVector) -> str:
    return base64.b64encode(state.amplitudes.astype("<c16").tobytes()).decode("ascii")


def _amplitudes_from_b64(text: str, labels: Sequence[int]) -> StateVector:
    amps = np.frombuffer(base64.b64decode(text), dtype="<c16")
    return StateVector(amps.astype(complex), tuple(labels))


def trace_to_json_obj(trace: RunTrace, include_snapshots: bool = True) -> dict:
    cfg = trace.config
    obj = {
        "format": "qcageom-trace-v1",
        "config": {
            "n_sites": cfg.n_sites,
            "b_parity": cfg.b_parity,
            "rule": {
                "name": cfg.rule.name,
                "unitaries": [_complex_pairs(u) for u in cfg.rule.unitaries],
            },
        },
        "granularity": trace.granularity,
        "labels": list(cfg.labels),
        "layers": [
            {
                "index": layer.index,
                "species": layer.species,
                "gates": [
                    {"target": g.target, "controls": list(g.controls), "kind": g.kind}
                    for g in layer.gates
                ],
            }
            for layer in trace.layers
        ],
    }
    if include_snapshots:
        obj["snapshots"] = [
            {"layer": idx, "amplitudes_b64": _amplitudes_b64(state)}
            for idx, state in trace.snapshots
        ]
    return obj


def trace_from_json_obj(obj: dict) -> RunTrace:
    if obj.get("format") != "qcageom-trace-v1":
        raise ValueError("not a qcageom trace file")
    rcfg = obj["config"]
    unitaries = [_matrix_from_pairs(p, 2) for p in rcfg["rule"]["unitaries"]]
    rule = UpdateRule(*unitaries, name=rcfg["rule"]["name"])
    config = QcaConfig(n_sites=rcfg["n_sites"], rule=rule, b_parity=rcfg["b_parity"])
    layers = tuple(
        LayerRecord(
            index=l["index"],
            species=l["species"],
            gates=tuple(
                GateRecord(target=g["target"], controls=tuple(g["controls"]), kind=g["kind"])
                for g in l["gates"]
            ),
        )
        for l in obj["layers"]
    )
    snapshots = tuple(
        (s["layer"], _amplitudes_from_b64(s["amplitudes_b64"], config.labels))
        for s in obj.get("snapshots", [])
    )
    return RunTrace(config=config, granularity=obj["granularity"],
                    layers=layers, snapshots=snapshots)


def save_trace(path: Path, trace: RunTrace, include_snapshots: bool = True) -> None:
    Path(path).write_text(json_dumps(trace_to_json_obj(trace, include_snapshots)))


def load_trace(path: Path) -> RunTrace:
    return trace_from_json_obj(json.loads(Path(path).read_text()))
