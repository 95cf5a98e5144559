import json

import pytest

from nilbal import catalog
from nilbal.errors import InputError


def test_names_load():
    for name in catalog.NAMES:
        e = catalog.load(name)
        assert e.name == name
        assert e.claims


def test_parametric_names():
    assert catalog.load("FREE(2, 3)").name == "FREE(2,3)"
    assert catalog.load("TORSION4(5)").is_group
    for bad in ["NOPE", "FREE(4,2)", "FREE(2,5)", "TORSION4(4)"]:
        with pytest.raises(InputError):
            catalog.load(bad)


def test_claim_sources_are_labelled():
    for name in catalog.NAMES:
        for c in catalog.load(name).claims:
            assert c.source in {"reference", "derived", "trivial"}


def test_entries_serialise():
    for name in catalog.NAMES:
        data = catalog.load(name).to_json()
        assert json.loads(json.dumps(data, sort_keys=True))["name"] == name


@pytest.mark.parametrize("name", catalog.NAMES)
def test_verify_entry(name):
    rep = catalog.verify(name)
    assert rep.passed, [r.to_json() for r in rep.failures()]


def test_verify_all_keeps_order_in_parallel():
    names = ["HEIS3", "L4", "FREE(2,2)", "N4"]
    reps = catalog.verify_all(names, jobs=3)
    assert [r.name for r in reps] == names
    assert [r.to_json() for r in reps] == [r.to_json() for r in catalog.verify_all(names)]


def test_report_lookup():
    rep = catalog.verify("N4")
    assert rep["hirsch"].actual == 4
    with pytest.raises(KeyError):
        rep["missing"]
