import json

import numpy as np
import pytest
from hypothesis import given

from conftest import matrices
from lambdamean.linalg import InvalidMatrix
from lambdamean.matrix_io import dump_matrix, load_matrix, matrix_from_json, matrix_to_json


@given(matrices())
def test_round_trip_is_exact(t):
    back = matrix_from_json(json.loads(json.dumps(matrix_to_json(t))))
    assert np.array_equal(back, t)


def test_file_round_trip(tmp_path):
    t = np.array([[1 + 2j, 0], [3, -1j]])
    path = tmp_path / "m.json"
    dump_matrix(t, path)
    assert np.array_equal(load_matrix(path), t)
    assert json.loads(path.read_text())["entries"][0] == [1.0, 2.0]


@pytest.mark.parametrize("obj", [
    {"n": 2, "entries": [[0, 0]] * 3},
    {"n": 0, "entries": []},
    {"n": 1.5, "entries": [[0, 0]]},
    {"n": 1, "entries": [[0]]},
    {"n": 1, "entries": [[float("inf"), 0]]},
    {"entries": []},
    [],
])
def test_rejects_malformed(obj):
    with pytest.raises(InvalidMatrix):
        matrix_from_json(obj)
