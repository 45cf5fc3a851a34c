import json
import os
from pathlib import Path

import pytest

import cpid

FIX = Path(os.environ.get("CPID_FIXTURE_DIR", Path(__file__).resolve().parents[2] / "fixtures"))


def read(rel):
    return (FIX / rel).read_text()


def test_version():
    assert cpid.version() == "0.1.0"


def test_m_separation_on_unrolled_template():
    g = "vertex A\nvertex B\nvertex C\nedge A -> B\nedge B -> C\n"
    assert not cpid.m_separated(g, ["A"], ["C"])
    assert cpid.m_separated(g, ["A"], ["C"], ["B"])
    t = read("graphs/fig2b.graph")
    assert isinstance(cpid.m_separated(t, ["R[2]"], ["R[3]"], horizon=3), bool)


def test_identify_verdicts():
    r = cpid.identify(read("graphs/fig2b.graph"), read("process/fig2b.json"))
    assert r["overall"] is True
    bad = cpid.identify(read("graphs/fig2a.graph"), read("process/fig2a.json"))
    assert bad["overall"] is False


def test_find_states_fig2a_has_none():
    r = cpid.find_states(read("graphs/fig2a.graph"), ["R"])
    assert r["proposals"] == []


def test_simulation_is_deterministic():
    spec = read("sim/fig2a.yaml")
    a = cpid.simulate(spec, 20, 30, seed=5, threads=1)
    b = cpid.simulate(spec, 20, 30, seed=5, threads=4)
    assert a == b
    assert len(a.splitlines()) > 20 * 30


def test_learn_and_evaluate_pricing():
    spec = read("pricing/retro_2.json")
    pol = cpid.learn(spec, "A1@1,Dhat@1,B1,Dhat,A2@1", episodes=200, horizon=60, seed=3)
    rep = cpid.evaluate(spec, pol, episodes=100, horizon=60, seed=4)
    assert rep["episodes"] == 100
    null = cpid.evaluate(spec, None, episodes=50, horizon=30)
    assert null["regret_percent"] == 0


def test_errors_are_value_errors():
    with pytest.raises(ValueError):
        cpid.identify("vertex A\nedge A -> B\n", "{}")
    with pytest.raises(cpid.CpidError):
        cpid.learn(read("sim/fig2a.yaml"), "A@1")  # actions required for YAML


def test_report_is_json_serialisable():
    r = cpid.reproduce_table1(str(FIX), ["retro_1"], episodes=50, horizon=40)
    json.dumps(r)
    assert r["rows"][0]["scenario"] == "retro_1"
