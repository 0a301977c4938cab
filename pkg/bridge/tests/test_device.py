"""Device-path plumbing that runs without the vendor SDK installed."""

import importlib.util
import json

import pytest

from qa_bridge.device import classify_error, timing_table
from qa_bridge.service import BridgeConfig, serve_once

HAVE_SDK = importlib.util.find_spec("dwave") is not None

REQUEST = json.dumps(
    {
        "n": 2,
        "sense": "min",
        "coeffs": [[0, 0, -1.0], [0, 1, 0.5]],
        "num_reads": 5,
        "annealing_time_us": 20.0,
        "ferromagnetic_coupling": 3.0,
    }
)


def test_timing_names_map_and_pass_through():
    info = {
        "qpu_programming_time": 15831.34,
        "qpu_anneal_time_per_sample": 20.0,
        "qpu_readout_time_per_sample": 198.0,
        "qpu_delay_time_per_sample": 20.54,
        "total_post_processing_time": 409.0,
        "chip_runtime": 5.0,
        "problem_label": "job-1",
    }
    table = timing_table(info)
    assert table["Programming time"] == 15831.34
    assert table["Anneal time"] == 20.0
    assert table["Readout time"] == 198.0
    assert table["Readout delay"] == 20.54
    assert table["Post processing"] == 409.0
    assert table["chip_runtime"] == 5.0
    assert "problem_label" not in table


def test_error_classification():
    class SolverAuthenticationError(Exception):
        pass

    class RequestTimeout(Exception):
        pass

    assert classify_error(SolverAuthenticationError("bad token")) == "auth"
    assert classify_error(RequestTimeout("polling gave up")) == "timeout"
    assert classify_error(ValueError("no embedding found after 1000 tries")) == "embedding"
    assert classify_error(RuntimeError("something else")) == "unavailable"


def test_missing_credential_reports_auth(monkeypatch):
    monkeypatch.delenv("QA_BRIDGE_TEST_TOKEN", raising=False)
    doc = json.loads(serve_once(REQUEST, BridgeConfig(auth_env="QA_BRIDGE_TEST_TOKEN")))
    assert doc["error"] == "auth"
    assert "QA_BRIDGE_TEST_TOKEN" in doc["detail"]


@pytest.mark.skipif(HAVE_SDK, reason="vendor SDK installed; its import cannot fail")
def test_missing_sdk_reports_unavailable(monkeypatch):
    # the auth check passed, so the next failure is the lazy import itself
    monkeypatch.setenv("QA_BRIDGE_TEST_TOKEN", "fake-token")
    doc = json.loads(serve_once(REQUEST, BridgeConfig(auth_env="QA_BRIDGE_TEST_TOKEN")))
    assert doc["error"] == "unavailable"
    assert "SDK" in doc["detail"]
