import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wakerom.errors import InvalidConfig, InvalidSeries, MalformedCSV
from wakerom.io import RunManifest, dumps, read_columns, read_forces, read_json, write_forces, write_json

from conftest import tone


def write(tmp_path, text, name="f.csv"):
    path = tmp_path / name
    path.write_text(text)
    return path


class TestReadForces:
    def test_round_trip(self, tmp_path):
        lift = tone(0.9, 1.2, 10.0, dt=0.01, duration=5.0, t0=3.0)
        drag = tone(0.1, 2.4, 70.0, dt=0.01, duration=5.0, t0=3.0, offset=1.4)
        path = write_forces(tmp_path / "forces.csv", lift, drag)
        got_lift, got_drag = read_forces(path)
        assert got_lift.t0 == pytest.approx(3.0) and got_lift.dt == pytest.approx(0.01)
        np.testing.assert_allclose(got_lift.values, lift.values, rtol=1e-11, atol=1e-12)
        np.testing.assert_allclose(got_drag.values, drag.values, rtol=1e-11)

    def test_comments_blank_lines_and_case(self, tmp_path):
        path = write(tmp_path, "# produced elsewhere\nT, CL, CD\n0,1,2\n\n# mid\n0.5,2,3\n1.0,3,4\n")
        lift, drag = read_forces(path)
        np.testing.assert_array_equal(lift.values, [1, 2, 3])
        np.testing.assert_array_equal(drag.values, [2, 3, 4])

    def test_lift_only(self, tmp_path):
        lift, drag = read_forces(write(tmp_path, "t,cl\n0,1\n1,2\n2,3\n"), require_drag=False)
        assert drag is None and len(lift) == 3

    def test_missing_column_is_named(self, tmp_path):
        with pytest.raises(MalformedCSV, match="'cd'"):
            read_forces(write(tmp_path, "t,cl\n0,1\n1,2\n"))

    def test_ragged_row(self, tmp_path):
        with pytest.raises(MalformedCSV, match="line|field"):
            read_columns(write(tmp_path, "t,cl,cd\n0,1,2\n1,2\n"), ("t", "cl", "cd"))

    def test_non_numeric(self, tmp_path):
        with pytest.raises(MalformedCSV):
            read_forces(write(tmp_path, "t,cl,cd\n0,1,2\n1,x,2\n"))

    def test_non_uniform_time(self, tmp_path):
        with pytest.raises(InvalidSeries):
            read_forces(write(tmp_path, "t,cl,cd\n0,1,2\n1,2,3\n2.5,3,4\n"))

    def test_unreadable(self, tmp_path):
        with pytest.raises(MalformedCSV):
            read_forces(tmp_path / "absent.csv")


class TestJson:
    def test_deterministic_and_rounded(self):
        body = {"b": 1 / 3, "a": np.float64(2.0), "n": np.int64(4), "v": np.array([0.1, math.inf])}
        text = dumps(body)
        assert text == dumps(body)
        parsed = json.loads(text)
        assert list(parsed) == ["b", "a", "n", "v"]
        assert parsed["b"] == 0.333333333333 and parsed["v"] == [0.1, None] and parsed["n"] == 4

    @settings(max_examples=100, deadline=None)
    @given(x=st.floats(allow_nan=False, allow_infinity=False))
    def test_twelve_significant_digits(self, x):
        back = json.loads(dumps({"x": x}))["x"]
        assert back == pytest.approx(x, rel=1e-11, abs=0.0) or back == x

    def test_read_errors(self, tmp_path):
        with pytest.raises(InvalidConfig):
            read_json(tmp_path / "absent.json")
        with pytest.raises(InvalidConfig, match="invalid JSON"):
            read_json(write(tmp_path, "{not json", "bad.json"))

    def test_manifest(self, tmp_path):
        write_json(tmp_path / "x.json", {"a": 1})
        path = RunManifest("identify", ["in.csv"], {"model": "five"}, ["x.json"]).write(tmp_path)
        body = read_json(path)
        assert body["command"] == "identify" and body["outputs"] == ["x.json"] and "version" in body
