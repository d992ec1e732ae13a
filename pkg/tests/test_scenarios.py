import json

import pytest
import yaml

from surfacelattice.builtins import builtin_documents, builtin_names, get_builtin
from surfacelattice.certificate import Verdict
from surfacelattice.engine import replay_premise, replay_steps
from surfacelattice.errors import SchemaError, UnexpectedVerdict
from surfacelattice.scenario import AXIOMS, load_scenario

REPLAYABLE = [n for n in builtin_names() if get_builtin(n).checks]


@pytest.mark.parametrize("name", REPLAYABLE)
def test_builtin_meets_every_expected_verdict(name):
    result = replay_steps(get_builtin(name))
    assert result.ok


@pytest.mark.parametrize("name", REPLAYABLE)
def test_every_computed_premise_recomputes(name):
    for step in replay_steps(get_builtin(name)).steps:
        for p in step.certificate.premises:
            if p.replay:
                assert replay_premise(step.space, p) == p.value, (step.label, p.description)


@pytest.mark.parametrize("name", REPLAYABLE)
def test_cited_axioms_are_registered(name):
    for c in replay_steps(get_builtin(name)).certificates:
        for a in c.axioms_cited:
            assert a in AXIOMS


def test_json_and_yaml_documents_load_identically():
    doc = builtin_documents()["k9-rational"]
    a = load_scenario(json.dumps(doc))
    b = load_scenario(yaml.safe_dump(doc))
    assert a.space == b.space
    assert a.checks == b.checks


def _doc(**changes):
    doc = json.loads(json.dumps(builtin_documents()["k9-rational"]))
    doc.update(changes)
    return doc


@pytest.mark.parametrize("mutation, path", [
    ({"symbols": ["K", "K"]}, "$.symbols"),
    ({"surprise": 1}, "$"),
    ({"gram": {"K.Q": 1}}, "$.gram.K.Q"),
    ({"checks": [{"rule": "no-such-rule"}]}, "$.checks[0]"),
    ({"checks": [{"rule": "fibre", "expect": "MAYBE"}]}, "$.checks[0]"),
    ({"axioms": ["NOT_AN_AXIOM"]}, "$.axioms"),
    ({"k": "nine"}, "$.k"),
])
def test_schema_errors_name_the_offending_path(mutation, path):
    with pytest.raises(SchemaError) as err:
        load_scenario(_doc(**mutation))
    assert err.value.path == path


def test_missing_required_key():
    doc = _doc()
    del doc["gram"]
    with pytest.raises(SchemaError, match="missing keys"):
        load_scenario(doc)


def test_wrong_expectation_raises_with_partial_result():
    doc = _doc()
    doc["checks"] = [dict(doc["checks"][0], expect="VIOLATION")]
    with pytest.raises(UnexpectedVerdict) as err:
        replay_steps(load_scenario(doc))
    assert err.value.result.steps[0].certificate.verdict is Verdict.SATISFIED


def test_unknown_builtin():
    with pytest.raises(SchemaError):
        get_builtin("k13-rational")


def test_fibration_relations_are_forced():
    state = replay_steps(get_builtin("k9-rational")).state
    assert state.unknown_value == 8
    assert state.relation("B0").rhs.render(["K", "F", "G", "N0"]) == "-6K+2F+2G+N0"
    state = replay_steps(get_builtin("k11-rational")).state
    assert state.unknown_value == 4
    assert state.relation("B0").rhs.render(["K", "F", "G", "N0"]) == "-4K+3F+2G+N0"


def test_vertical_component_is_excluded():
    for name in ("k9-rational", "k11-rational"):
        last = replay_steps(get_builtin(name)).certificates[-1]
        assert last.rule == "vertical_component"
        assert last.verdict is Verdict.VIOLATION


@pytest.mark.parametrize("name, verdict", [
    ("k9-minus-one-dc0", Verdict.VIOLATION),
    ("k9-minus-one-dc1", Verdict.VIOLATION),
    ("k9-minus-one-dc2", Verdict.VIOLATION),
    ("k9-minus-one-dc3", Verdict.SATISFIED),
    ("k9-minus-one-dc3-two-nodes", Verdict.VIOLATION),
])
def test_minus_one_curve_branches(name, verdict):
    assert replay_steps(get_builtin(name)).certificates[-1].verdict is verdict
