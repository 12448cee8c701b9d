"""Command-line experiment runner and exporter.

Subcommands: run, sweep, distance-matrix, topology.  Exit codes: 0 on
success, 2 on a bad experiment spec, 3 when a numerical invariant fails
mid-run.  On failure every partially written output file is removed.
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import causal, exports, infogeo, qca, topo
from .statealg import InvariantError

GHZ_FIDELITY_TOL = 1e-9


class _Outputs:
    """Tracks written files so a failed run leaves nothing behind."""

    def __init__(self, out_dir: Path):
        self.dir = Path(out_dir)
        self.written: list[Path] = []
        self.dir.mkdir(parents=True, exist_ok=True)

    def write_text(self, name: str, text: str) -> Path:
        path = self.dir / name
        path.write_text(text)
        self.written.append(path)
        return path

    def write_json(self, name: str, obj) -> Path:
        return self.write_text(name, exports.json_dumps(obj))

    def write_pgm(self, name: str, matrix: np.ndarray) -> None:
        path = self.dir / name
        scale = exports.write_pgm(path, matrix)
        self.written.append(path)
        self.write_json(name.replace(".pgm", ".scale.json"), scale)

    def discard(self) -> None:
        for path in self.written:
            try:
                path.unlink()
            except OSError:
                pass
        try:
            self.dir.rmdir()
        except OSError:
            pass


def parse_qubit_literal(text: str) -> np.ndarray:
    """Two comma-separated complex literals in "re+imi" form, normalized."""
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError("qubit state needs two comma-separated amplitudes")
    amps = []
    for p in parts:
        p = p.strip().replace("i", "j") or "0"
        try:
            amps.append(complex(p))
        except ValueError:
            raise ValueError(f"bad complex literal {p!r}") from None
    v = np.array(amps, dtype=complex)
    norm = math.sqrt(float(np.vdot(v, v).real))
    if norm == 0.0:
        raise ValueError("qubit state must be nonzero")
    return v / norm


def _pair_columns(labels):
    return [f"{a}-{b}" for a, b in zip(labels, labels[1:])]


def _field_labels(config: qca.QcaConfig, include_boundary: bool):
    return config.labels if include_boundary else config.register_sites


def _write_distance_outputs(out: _Outputs, trace: qca.RunTrace, pairs: str,
                            include_boundary: bool, pgm: bool) -> None:
    config = trace.config
    labels = _field_labels(config, include_boundary)
    nn_rows = []
    for idx, state in trace.snapshots:
        field = infogeo.distance_field(
            state, pairs=pairs, include_boundary=include_boundary,
            boundary_labels=config.boundary_labels, time_step=idx,
        )
        out.write_text(f"distance_step_{idx:04d}.csv", exports.distance_field_csv(field))
        if pairs == "nearest_neighbor":
            nn_rows.append((idx, [field.value(a, b) for a, b in zip(labels, labels[1:])]))
    if nn_rows:
        text = exports.series_csv(_pair_columns(labels), nn_rows, corner="layer")
        out.write_text("nn_distance.csv", text)
        if pgm:
            out.write_pgm("nn_distance.pgm", np.array([r for _, r in nn_rows]))


def _write_occupation(out: _Outputs, trace: qca.RunTrace, pgm: bool) -> None:
    sites = trace.config.register_sites
    rows = []
    for idx, state in trace.snapshots:
        occ = qca.occupation_probabilities(state)
        rows.append((idx, [occ[s] for s in sites]))
    out.write_text("p1.csv", exports.series_csv(sites, rows, corner="layer"))
    if pgm:
        out.write_pgm("p1.pgm", np.array([r for _, r in rows]))


def _write_entropies(out: _Outputs, trace: qca.RunTrace, pgm: bool) -> None:
    sites = trace.config.register_sites
    rows = []
    for idx, state in trace.snapshots:
        ent = infogeo.site_entropies(state, sites)
        rows.append((idx, [ent[s] for s in sites]))
    out.write_text("entropy.csv", exports.series_csv(sites, rows, corner="layer"))
    if pgm:
        out.write_pgm("entropy.pgm", np.array([r for _, r in rows]))


def _write_block_reports(out: _Outputs, trace: qca.RunTrace, seed_site: int) -> None:
    reports = []
    for idx, state in trace.snapshots:
        field = infogeo.distance_field(
            state, pairs="all_pairs", include_boundary=False,
            boundary_labels=trace.config.boundary_labels, time_step=idx,
        )
        rep = infogeo.block_structure_report(field, seed_site=seed_site)
        reports.append({
            "layer": idx,
            "regions": [list(r) for r in rep.regions],
            "pattern_holds": rep.pattern_holds,
            "cross_min": rep.cross_min,
            "note": rep.note,
        })
    out.write_json("block_report.json", reports)


def _maybe_save_trace(out: _Outputs, trace: qca.RunTrace, args) -> None:
    if args.save_trace:
        obj = exports.trace_to_json_obj(trace, include_snapshots=not args.no_snapshots)
        out.write_json("trace.json", obj)


def _cmd_run(args, out: _Outputs) -> int:
    if args.experiment == "propagate":
        if args.n_sites is None:
            raise ValueError("propagate needs --n-sites")
        psi = parse_qubit_literal(args.psi)
        trace, fid = qca.propagate_experiment(args.n_sites, psi)
        _write_occupation(out, trace, args.pgm)
        _write_distance_outputs(out, trace, args.pairs, args.include_boundary, args.pgm)
        _maybe_save_trace(out, trace, args)
        if fid < 1.0 - GHZ_FIDELITY_TOL:
            raise InvariantError(f"propagation fidelity {fid!r} below 1 - 1e-9")
        print(f"fidelity={fid:.9f}")
        return 0
    if args.experiment == "ghz":
        if args.n_sites is None:
            raise ValueError("ghz needs --n-sites")
        trace, fid = qca.ghz_experiment(args.n_sites)
        seed = args.n_sites // 2 if args.n_sites % 4 == 0 else args.n_sites // 2 + 1
        _write_occupation(out, trace, args.pgm)
        _write_distance_outputs(out, trace, args.pairs, args.include_boundary, args.pgm)
        _write_block_reports(out, trace, seed)
        _maybe_save_trace(out, trace, args)
        if fid < 1.0 - GHZ_FIDELITY_TOL:
            raise InvariantError(f"GHZ fidelity {fid!r} below 1 - 1e-9")
        print(f"fidelity={fid:.9f}")
        return 0
    if args.experiment == "pi3":
        if args.n_sites is None or args.seed_site is None:
            raise ValueError("pi3 needs --n-sites and --seed-site")
        trace = qca.pi3_experiment(args.n_sites, args.seed_site, args.steps)
        _write_entropies(out, trace, args.pgm)
        _write_distance_outputs(out, trace, args.pairs, args.include_boundary, args.pgm)
        _maybe_save_trace(out, trace, args)
        return 0
    if args.experiment == "topology":
        if args.n_sites is None:
            raise ValueError("topology needs --n-sites")
        steps = args.steps if args.steps is not None else max(args.thickness, 4)
        config = qca.QcaConfig(n_sites=args.n_sites, rule=qca.PULSE_RULE)
        trace = qca.run(config, steps)
        _maybe_save_trace(out, trace, args)
        return _emit_topology(out, trace, slice_layer=0, i_max=args.thickness,
                              simplify=args.controlled_simplification)
    if args.experiment in ("werner", "pure_family"):
        return _emit_sweep(out, args.experiment, args.samples, args.pgm)
    raise ValueError(f"unknown experiment {args.experiment!r}")


def _emit_sweep(out: _Outputs, family: str, samples: int, pgm: bool) -> int:
    if samples < 2:
        raise ValueError("need at least 2 samples")
    grid = [i / (samples - 1) for i in range(samples)]
    if family == "werner":
        curve = infogeo.werner_sweep(grid)
        out.write_text("werner.csv", exports.sweep_csv(curve))
        z_star = infogeo.werner_null_crossing()
        out.write_json("werner_crossing.json", {
            "z_star": z_star,
            "bisection_tol": 1e-8,
            "sign_changes_on_grid": len(curve.sign_changes()),
        })
        print(f"z_star={z_star:.8f}")
    else:
        curve = infogeo.pure_family_sweep(grid)
        out.write_text("pure_family.csv", exports.sweep_csv(curve))
    if pgm:
        out.write_pgm(f"{family}.pgm", np.array([list(curve.values)]))
    return 0


def _emit_topology(out: _Outputs, trace: qca.RunTrace, slice_layer: int,
                   i_max: int, simplify: bool) -> int:
    poset = causal.build_poset(trace)
    base = causal.slice_antichain(poset, slice_layer)
    result = topo.stable_complex(poset, base, i_max, controlled_simplification=simplify)
    width = max((len(b) for _, b in result.filtration), default=1)
    rows = [["thickness", *[f"b{k}" for k in range(width)]]]
    for t, b in result.filtration:
        rows.append([str(t), *[str(x) for x in (*b, *([0] * (width - len(b))))]])
    out.write_text("betti_filtration.csv", "\n".join(",".join(r) for r in rows) + "\n")
    out.write_json("stable.json", {
        "t_star": result.t_star,
        "note": result.note,
        "controlled_simplification": simplify,
        "filtration": [{"thickness": t, "betti": list(b)} for t, b in result.filtration],
    })
    out.write_json("poset.json", causal.poset_json(poset))
    if result.complex is not None:
        out.write_json("complex.json", result.complex.to_json_obj())
        print(f"t_star={result.t_star}")
    else:
        print(f"t_star=none ({result.note})")
    return 0


def _cmd_sweep(args, out: _Outputs) -> int:
    return _emit_sweep(out, args.family, args.samples, args.pgm)


def _cmd_distance_matrix(args, out: _Outputs) -> int:
    trace = exports.load_trace(args.trace)
    if not trace.snapshots:
        raise ValueError("trace has no snapshots")
    try:
        idx, state = trace.snapshots[args.step]
    except IndexError:
        raise ValueError(
            f"step {args.step} out of range (trace has {len(trace.snapshots)} snapshots)"
        ) from None
    field = infogeo.distance_field(
        state, pairs="all_pairs", include_boundary=args.include_boundary,
        boundary_labels=trace.config.boundary_labels, time_step=idx,
    )
    out.write_text("distance_matrix.csv", exports.distance_field_csv(field))
    out.write_json("distance_matrix.json", exports.distance_field_json_obj(field))
    rep = infogeo.block_structure_report(field, seed_site=args.seed_site)
    out.write_json("block_report.json", {
        "layer": idx,
        "regions": [list(r) for r in rep.regions],
        "pattern_holds": rep.pattern_holds,
        "cross_min": rep.cross_min,
        "note": rep.note,
    })
    print(rep.note)
    return 0


def _cmd_topology(args, out: _Outputs) -> int:
    trace = exports.load_trace(args.trace)
    return _emit_topology(out, trace, args.slice, args.i_max,
                          simplify=args.controlled_simplification)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcageom",
        description="Block-partitioned QCA experiments, distance geometry, and slice topology.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a named experiment and export its data files")
    run.add_argument("--experiment", required=True,
                     choices=["propagate", "ghz", "pi3", "topology", "werner", "pure_family"])
    run.add_argument("--out", required=True, type=Path)
    run.add_argument("--n-sites", type=int)
    run.add_argument("--steps", type=int)
    run.add_argument("--psi", default="1,0", help='seed qubit "re+imi,re+imi" (propagate)')
    run.add_argument("--seed-site", type=int, help="seed site (pi3)")
    run.add_argument("--samples", type=int, default=101, help="grid size (werner/pure_family)")
    run.add_argument("--thickness", type=int, default=4, help="max thickness (topology)")
    run.add_argument("--pairs", choices=["nearest_neighbor", "all_pairs"],
                     default="nearest_neighbor")
    run.add_argument("--include-boundary", action="store_true")
    run.add_argument("--controlled-simplification", action=argparse.BooleanOptionalAction,
                     default=True)
    run.add_argument("--pgm", action="store_true", help="also write PGM heatmaps")
    run.add_argument("--save-trace", action=argparse.BooleanOptionalAction, default=True)
    run.add_argument("--no-snapshots", action="store_true",
                     help="omit state snapshots from trace.json")
    run.set_defaults(func=_cmd_run)

    sweep = sub.add_parser("sweep", help="parameter sweeps of the two-qubit families")
    sweep.add_argument("--family", required=True, choices=["werner", "pure_family"])
    sweep.add_argument("--samples", type=int, default=101)
    sweep.add_argument("--out", required=True, type=Path)
    sweep.add_argument("--pgm", action="store_true")
    sweep.set_defaults(func=_cmd_sweep)

    dm = sub.add_parser("distance-matrix", help="all-pairs distances at one trace snapshot")
    dm.add_argument("--trace", required=True, type=Path)
    dm.add_argument("--step", required=True, type=int, help="snapshot index (0 = initial)")
    dm.add_argument("--out", required=True, type=Path)
    dm.add_argument("--include-boundary", action="store_true")
    dm.add_argument("--seed-site", type=int)
    dm.set_defaults(func=_cmd_distance_matrix)

    tp = sub.add_parser("topology", help="stable slice topology from a saved trace")
    tp.add_argument("--trace", required=True, type=Path)
    tp.add_argument("--slice", type=int, default=0)
    tp.add_argument("--i-max", type=int, default=4)
    tp.add_argument("--out", required=True, type=Path)
    tp.add_argument("--controlled-simplification", action=argparse.BooleanOptionalAction,
                    default=True)
    tp.set_defaults(func=_cmd_topology)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = _Outputs(args.out)
    try:
        return args.func(args, out)
    except InvariantError as exc:
        out.discard()
        print(f"numerical invariant violated: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        out.discard()
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
