"""Shared fixtures: the two worked examples in both API and JSON-file
form, plus small helpers used across the suite."""

from __future__ import annotations

import json

import numpy as np
import pytest

from delaymat import fixtures


@pytest.fixture
def ex1_system():
    return fixtures.example1_system()


@pytest.fixture
def ex1_history():
    return fixtures.example1_history()


@pytest.fixture
def ex1_forcing():
    return fixtures.example1_forcing()


@pytest.fixture
def ex2_system():
    return fixtures.example2_system()


@pytest.fixture
def ex2_history():
    return fixtures.example2_history()


@pytest.fixture
def ex2_forcing():
    return fixtures.example2_forcing()


def _write_json(path, node):
    path.write_text(json.dumps(node))
    return str(path)


@pytest.fixture
def ex1_files(tmp_path):
    """Example 1 as (system, history, forcing) JSON file paths."""
    sys_path = _write_json(
        tmp_path / "sys1.json",
        {
            "d": 2,
            "A0": [[0, 1], [0, 0]],
            "A1": [[1, 0], [0, 2]],
            "kind": "continuous",
            "delay": 1.0,
        },
    )
    hist_path = _write_json(
        tmp_path / "hist1.json",
        {
            "kind": "ppoly",
            "breakpoints": [-1.0, 0.0],
            "pieces": [[[[0, 0], [0, 0]], [[1, 0], [0, 1]]]],
            "left_value": [[-1, 0], [0, -1]],
        },
    )
    force_path = _write_json(
        tmp_path / "g1.json",
        {
            "kind": "ppoly",
            "breakpoints": [0.0, 3.0],
            "pieces": [[[[1, 0], [0, 1]]]],
            "right_extension": True,
        },
    )
    return sys_path, hist_path, force_path


@pytest.fixture
def ex2_files(tmp_path):
    """Example 2 as (system, history, forcing) JSON file paths."""
    sys_path = _write_json(
        tmp_path / "sys2.json",
        {
            "d": 2,
            "A0": [[0, 1], [0, 0]],
            "A1": [[1, 0], [0, 2]],
            "kind": "discrete",
            "delay": 1,
        },
    )
    hist_path = _write_json(
        tmp_path / "hist2.json",
        {"kind": "table", "values": [[[-1, 0], [0, -1]], [[0, 0], [0, 0]]]},
    )
    force_path = _write_json(
        tmp_path / "g2.json",
        {"kind": "table", "values": [[[1, 0], [0, 1]]] * 8},
    )
    return sys_path, hist_path, force_path


def assert_close(actual, expected, tol, label=""):
    actual = np.asarray(actual, dtype=float)
    expected = np.asarray(expected, dtype=float)
    err = 0.0 if actual.size == 0 else float(np.max(np.abs(actual - expected)))
    assert err <= tol, f"{label or 'value'}: max |diff| = {err:.3e} > {tol:g}"
