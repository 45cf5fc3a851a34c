"""Every --json output validates against schemas/ and reruns are byte-identical apart from timing."""
import json
import os
import re
import subprocess
from pathlib import Path

import pytest

jsonschema = pytest.importorskip("jsonschema")
referencing = pytest.importorskip("referencing")

ROOT = Path(__file__).resolve().parents[2]
SCHEMAS = ROOT / "schemas"
FIX = ROOT / "fixtures"
CPID = str(Path(os.environ.get("CPID_BIN", ROOT / "build" / "cpid")).resolve())


def registry():
    resources = []
    for p in SCHEMAS.glob("*.schema.json"):
        doc = json.loads(p.read_text())
        res = referencing.Resource.from_contents(doc)
        resources += [(doc["$id"], res), (p.name, res)]
    return referencing.Registry().with_resources(resources)


REGISTRY = registry()


def validate(doc, schema_name):
    schema = json.loads((SCHEMAS / schema_name).read_text())
    jsonschema.Draft202012Validator(schema, registry=REGISTRY).validate(doc)


def run(args, cwd, ok=(0, 1)):
    p = subprocess.run([CPID, *args], cwd=cwd, capture_output=True, text=True)
    assert p.returncode in ok, p.stderr
    return p.stdout


def f(rel):
    return str(FIX / rel)


SEM = ["sem_confounded.graph", "sem_confounded.json", "sem_confounded.dist.csv", "sem_confounded.policy.csv"]
CASES = {
    "msep": (["msep", f("graphs/fig5.graph"), "--left", "A1", "--right", "R3", "--witness"], "msep.schema.json"),
    "swig": (["swig", f("graphs/fig2b.graph"), f("process/fig2b.json"), "--intervene", "1,2"], "swig.schema.json"),
    "identify_pass": (["identify", f("graphs/fig2b.graph"), f("process/fig2b.json")], "identify.schema.json"),
    "identify_fail": (["identify", f("graphs/fig2a.graph"), f("process/fig2a.json")], "identify.schema.json"),
    "find_states": (["find-states", f("graphs/fig2b.graph"), f("process/fig2b.json")], "find-states.schema.json"),
    "gformula": (
        ["gformula", f("graphs/" + SEM[0]), f("process/" + SEM[1]), f("gformula/" + SEM[2]), f("gformula/" + SEM[3]),
         "--utility", "discounted:0.9", "--emit-joint"],
        "gformula.schema.json",
    ),
    "simulate": (["simulate", f("sim/fig2a.yaml"), "--episodes", "3", "--horizon", "8", "--out", "ep.csv"],
                 "simulate.schema.json"),
    "learn_stdout": (["learn", f("pricing/basic.json"), "--state", "A1@1,Dhat@1,B1,Dhat", "--episodes", "40",
                      "--horizon", "30"], "learn.schema.json"),
    "learn_file": (["learn", f("pricing/basic.json"), "--state", "A1@1,Dhat@1,B1,Dhat", "--episodes", "40",
                    "--horizon", "30", "--out", "pol.json"], "learn.schema.json"),
    "evaluate_null": (["evaluate", f("pricing/basic.json"), "null", "--episodes", "20", "--horizon", "20"],
                      "evaluate.schema.json"),
    "reproduce": (["reproduce", "table1", "--scale", "desk", "--scenarios", "basic,retro_1,trend_0.1",
                   "--episodes", "30", "--horizon", "30", "--eval-episodes", "20"], "reproduce-table1.schema.json"),
}


def strip_timing(text):
    return re.sub(r'"seconds": [0-9.eE+-]+', '"seconds": 0', text)


@pytest.mark.parametrize("name", sorted(CASES))
def test_output_validates_and_is_reproducible(name, tmp_path):
    args, schema = CASES[name]
    first = run([*args, "--json", "--threads", "3"], tmp_path)
    validate(json.loads(first), schema)
    again = run([*args, "--json", "--threads", "3"], tmp_path)
    assert strip_timing(first) == strip_timing(again)
    # thread count changes the recorded command and nothing else
    single = run([*args, "--json", "--threads", "1"], tmp_path)
    assert strip_timing(first).replace("--threads 3", "--threads 1") == strip_timing(single)


def test_policy_file_validates(tmp_path):
    run(CASES["learn_file"][0] + ["--json"], tmp_path)
    validate(json.loads((tmp_path / "pol.json").read_text()), "policy.schema.json")
    rep = run(["evaluate", f("pricing/basic.json"), "pol.json", "--episodes", "20", "--horizon", "30", "--json"],
              tmp_path)
    validate(json.loads(rep), "evaluate.schema.json")


def test_seed_from_environment(tmp_path):
    args = ["simulate", f("sim/fig2a.yaml"), "--episodes", "2", "--horizon", "5"]
    env = dict(os.environ, CPID_SEED="77")
    a = subprocess.run([CPID, *args], cwd=tmp_path, capture_output=True, text=True, env=env).stdout
    b = run([*args, "--seed", "77"], tmp_path)
    c = run([*args, "--seed", "78"], tmp_path)
    assert a == b != c
