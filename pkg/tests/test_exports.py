"""File formats: round-trips, sentinel handling, PGM mapping, determinism."""
from __future__ import annotations

import json
import math

import numpy as np
import pytest

from qcageom import exports
from qcageom.infogeo import DistanceField, distance_field, werner_sweep
from qcageom.qca import KET_PLUS, PI3_RULE, QcaConfig, initial_state, run

RNG = np.random.default_rng(5)


class TestFormatting:
    def test_twelve_significant_digits(self):
        assert exports.fmt12(1 / 3) == "0.333333333333"
        assert exports.fmt12(2.0) == "2"
        assert exports.fmt12(-1.5487949406954) == "-1.5487949407"

    def test_nan_and_negative_zero(self):
        assert exports.fmt12(float("nan")) == "nan"
        assert exports.fmt12(-0.0) == "0"

    def test_matrix_csv_roundtrip(self):
        vals = RNG.normal(size=(3, 4))
        text = exports.matrix_csv(["a", "b", "c", "d"], [1, 2, 3], vals)
        cols, rows, back = exports.parse_matrix_csv(text)
        assert cols == ["a", "b", "c", "d"]
        assert rows == ["1", "2", "3"]
        assert np.max(np.abs(back - vals)) <= 1e-11 * np.max(np.abs(vals))


class TestDistanceFieldFiles:
    def _field(self):
        vals = np.array([[0.0, -2.0, math.nan], [-2.0, 0.0, 1.0], [math.nan, 1.0, 0.0]])
        return DistanceField(3, (1, 2, 3), vals)

    def test_csv_sentinel(self):
        text = exports.distance_field_csv(self._field())
        lines = text.splitlines()
        assert lines[0] == "label,1,2,3"
        assert lines[1].split(",") == ["1", "0", "-2", "nan"]

    def test_csv_roundtrip(self):
        field = self._field()
        _, _, back = exports.parse_matrix_csv(exports.distance_field_csv(field))
        assert np.array_equal(np.isnan(back), np.isnan(field.values))
        mask = ~np.isnan(back)
        assert np.array_equal(back[mask], field.values[mask])

    def test_json_null(self):
        obj = exports.distance_field_json_obj(self._field())
        assert obj["time_step"] == 3
        assert obj["values"][0][2] is None
        assert obj["values"][0][1] == -2.0
        json.dumps(obj)  # must be serializable


class TestSweepCsv:
    def test_endpoint_rows(self):
        curve = werner_sweep([0.0, 0.5, 1.0])
        lines = exports.sweep_csv(curve).splitlines()
        assert lines[0] == "z,delta"
        assert lines[1] == "0,2"
        assert lines[-1].startswith("1,-2")


class TestPgm:
    def test_linear_mapping(self, tmp_path):
        m = np.array([[0.0, 1.0], [2.0, 4.0]])
        scale = exports.write_pgm(tmp_path / "x.pgm", m)
        data = (tmp_path / "x.pgm").read_bytes()
        header, pixels = data.rsplit(b"\n", 1)
        assert header == b"P5\n2 2\n255"
        assert list(pixels) == [0, 64, 128, 255]
        assert scale["min"] == 0.0 and scale["max"] == 4.0

    def test_nan_renders_black(self, tmp_path):
        m = np.array([[math.nan, 5.0], [10.0, 5.0]])
        exports.write_pgm(tmp_path / "x.pgm", m)
        pixels = (tmp_path / "x.pgm").read_bytes().rsplit(b"\n", 1)[1]
        assert list(pixels) == [0, 0, 255, 0]

    def test_constant_field(self, tmp_path):
        scale = exports.write_pgm(tmp_path / "x.pgm", np.full((1, 3), 7.0))
        pixels = (tmp_path / "x.pgm").read_bytes().rsplit(b"\n", 1)[1]
        assert list(pixels) == [0, 0, 0]
        assert scale["min"] == scale["max"] == 7.0


class TestTraceRoundtrip:
    def test_bit_exact_amplitudes(self):
        config = QcaConfig(n_sites=4, rule=PI3_RULE)
        trace = run(config, 2, initial_state(config, {2: KET_PLUS}))
        obj = exports.trace_to_json_obj(trace)
        back = exports.trace_from_json_obj(json.loads(exports.json_dumps(obj)))
        assert back.config.n_sites == 4
        assert back.config.b_parity == "odd"
        assert back.granularity == trace.granularity
        assert len(back.layers) == len(trace.layers)
        for (l1, s1), (l2, s2) in zip(trace.snapshots, back.snapshots):
            assert l1 == l2
            assert np.array_equal(s1.amplitudes, s2.amplitudes)

    def test_rule_matrices_roundtrip(self):
        config = QcaConfig(n_sites=2, rule=PI3_RULE)
        trace = run(config, 1)
        back = exports.trace_from_json_obj(exports.trace_to_json_obj(trace))
        for u1, u2 in zip(trace.config.rule.unitaries, back.config.rule.unitaries):
            assert np.array_equal(u1, u2)

    def test_snapshots_optional(self):
        config = QcaConfig(n_sites=2, rule=PI3_RULE)
        trace = run(config, 1)
        obj = exports.trace_to_json_obj(trace, include_snapshots=False)
        assert "snapshots" not in obj
        back = exports.trace_from_json_obj(obj)
        assert back.snapshots == ()

    def test_wrong_format_rejected(self):
        with pytest.raises(ValueError):
            exports.trace_from_json_obj({"format": "something-else"})

    def test_save_load(self, tmp_path):
        config = QcaConfig(n_sites=3, rule=PI3_RULE)
        trace = run(config, 1, initial_state(config, {1: KET_PLUS}))
        exports.save_trace(tmp_path / "t.json", trace)
        back = exports.load_trace(tmp_path / "t.json")
        assert np.array_equal(back.snapshots[-1][1].amplitudes,
                              trace.snapshots[-1][1].amplitudes)


class TestDeterminism:
    def test_identical_json_bytes(self):
        config = QcaConfig(n_sites=4, rule=PI3_RULE)
        t1 = run(config, 3, initial_state(config, {2: KET_PLUS}))
        t2 = run(config, 3, initial_state(config, {2: KET_PLUS}))
        assert exports.json_dumps(exports.trace_to_json_obj(t1)) == \
            exports.json_dumps(exports.trace_to_json_obj(t2))

    def test_identical_field_csv(self):
        config = QcaConfig(n_sites=4, rule=PI3_RULE)
        runs = []
        for _ in range(2):
            trace = run(config, 3, initial_state(config, {2: KET_PLUS}))
            field = distance_field(
                trace.snapshots[-1][1], pairs="all_pairs",
                boundary_labels=config.boundary_labels,
            )
            runs.append(exports.distance_field_csv(field))
        assert runs[0] == runs[1]
