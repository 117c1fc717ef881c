import json

import pytest

from trivine.errors import UnknownScenario
from trivine.families import Family
from trivine.scenarios import gallery_json, get, list_entries
from trivine.vine import VineSpec3D


def test_get_scenario1_composition():
    spec = get("S1").spec
    assert spec.c12.family is Family.GAUSSIAN and spec.c12.params == (0.6,)
    assert spec.c23.family is Family.GAUSSIAN and spec.c23.params == (0.7,)
    cond = spec.c13_2.as_copula()
    assert cond.family is Family.GAUSSIAN and cond.params == (0.5,)


def test_get_scenario4_composition():
    spec = get("S4").spec
    assert spec.c12.family is Family.TAWN1 and spec.c12.params == (3.0, 0.3)
    assert spec.c23.family is Family.JOE and spec.c23.rotation == 270
    assert spec.c23.params == (2.0,)
    cond = spec.c13_2.as_copula()
    assert cond.family is Family.BB1 and cond.params == (2.0, 1.5)


def test_get_simulation_study_composition():
    spec = get("SIM5.1").spec
    assert spec.c12.family is Family.GUMBEL and spec.c12.params == (1.5,)
    assert spec.c23.family is Family.STUDENT_T and spec.c23.params == (0.0, 2.5)
    assert spec.c13_2.family is Family.FRANK
    fn = spec.c13_2.param_fns[0]
    assert fn.form.value == "arctan" and fn.coeffs == (3.0, 10.0, 0.5)


def test_unknown_scenario():
    with pytest.raises(UnknownScenario):
        get("S99")


def test_list_is_stable_and_complete():
    entries = list_entries()
    assert [e.id for e in entries] == ["S1", "S2", "S3", "S4", "S5", "S6", "S7", "S8", "SIM5.1"]
    assert list_entries()[0] is entries[0]  # registry entries are shared, immutable


def test_every_spec_validates_and_round_trips():
    for e in list_entries():
        blob = json.dumps(e.spec.to_json(), sort_keys=True)
        spec2 = VineSpec3D.from_json(json.loads(blob))
        assert json.dumps(spec2.to_json(), sort_keys=True) == blob


def test_registry_constants_have_sources():
    for e in list_entries():
        assert e.expected, e.id
        for key, ev in e.expected.items():
            assert ev.source, (e.id, key)
            assert (ev.value is not None and ev.tol is not None) or (
                ev.lo is not None or ev.hi is not None
            ), (e.id, key)


@pytest.mark.parametrize("entry", list_entries(), ids=lambda e: e.id)
def test_unconditional_taus_match_reference(entry):
    exp = entry.expected
    assert exp["tau_12"].check(entry.spec.c12.tau())
    assert exp["tau_23"].check(entry.spec.c23.tau())


def test_scenario2_conditional_parameter():
    entry = get("S2")
    cond = entry.spec.c13_2.as_copula()
    assert entry.expected["cond_param"].check(cond.params[0])
    assert cond.params[0] == pytest.approx(2.0 / 3.0)


def test_gallery_json_shape():
    bundle = gallery_json()
    assert len(bundle) == 9
    for item in bundle:
        assert set(item) == {"id", "description", "spec"}
        VineSpec3D.from_json(item["spec"])
