import numpy as np
import pytest

from escapelab import csvio
from escapelab.coalescent import LineagePartition
from escapelab.stages import StageTimes


def test_round_trip_and_determinism(tmp_path):
    path = str(tmp_path / "traj.csv")
    times = np.array([0.0, 0.1, 0.2])
    states = np.array([[0.5, 1e-6, 0.5], [0.49, 2e-6, 0.5], [0.48, 4e-6, 0.51]])
    csvio.write_trajectory(path, times, states)
    first = open(path, "rb").read()
    csvio.write_trajectory(path, times, states)
    assert open(path, "rb").read() == first
    header, rows = csvio.read_rows(path)
    assert header == ["t", "v", "vstar", "p"]
    assert float(rows[2][1]) == 0.48


def test_float_fidelity(tmp_path):
    path = str(tmp_path / "x.csv")
    x = 0.1 + 0.2  # not representable prettily
    csvio.write_rows(path, ["a"], [[x]])
    _, rows = csvio.read_rows(path)
    assert float(rows[0][0]) == x


def test_stage_times_schema(tmp_path):
    path = str(tmp_path / "stages.csv")
    csvio.write_stage_times(path, [StageTimes(1, 1.0, 2.0, 3.0, 4.0, 5.0, 1e-8)])
    header, rows = csvio.read_rows(path)
    assert header == csvio.SCHEMAS["stage_times"]
    assert rows[0][0] == "1"


def test_partitions_schema(tmp_path):
    path = str(tmp_path / "parts.csv")
    part = LineagePartition.from_sizes([5, 3, 1, 1])
    csvio.write_partitions(path, [(0, "coexistence", part)])
    header, rows = csvio.read_rows(path)
    assert header == csvio.SCHEMAS["partitions"]
    assert rows[0][4] == "5;3;1;1"
