"""Catalog construction, JSON round-trips, steinberg labeling."""

import json

import pytest

from treelab.catalog import (
    builtin_catalog,
    catalog_document,
    emit_catalog,
    get_module,
    load_catalog,
    steinberg,
)
from treelab.exactalg import RingSpec
from treelab.grouprep import build_group, invariants, is_irreducible


def test_catalog_names_p3():
    names = [m.name for m in builtin_catalog(3, 1)]
    assert names == ["trivial", "steinberg", "jbar", "ps:0", "ps:1"]


def test_catalog_p2_single_principal_series():
    names = [m.name for m in builtin_catalog(2, 1)]
    assert names == ["trivial", "steinberg", "jbar", "ps:0"]
    assert get_module(2, 1, "ps:0").rank == 3


def test_catalog_higher_e_has_carriers_only():
    names = [m.name for m in builtin_catalog(3, 2)]
    assert names == ["trivial", "jbar"]


@pytest.mark.parametrize("p", [2, 3, 5])
def test_steinberg_is_irreducible_of_dimension_p(p):
    st = steinberg(build_group("sl2", p), RingSpec(p, 1))
    assert st.rank == p
    assert is_irreducible(st)
    grp = build_group("sl2", p)
    assert invariants(st, [grp.upper_gen]).nrows == 1


def test_roundtrip_is_bit_exact(tmp_path):
    path = tmp_path / "catalog.json"
    emit_catalog(3, 1, str(path))
    mods = load_catalog(str(path))
    assert [m.name for m in mods] == ["trivial", "steinberg", "jbar", "ps:0", "ps:1"]
    doc = json.loads(path.read_text())
    again = catalog_document(3, 1)
    assert json.dumps(doc, sort_keys=True) == json.dumps(again, sort_keys=True)


def test_loader_accepts_decimal_strings():
    doc = catalog_document(2, 1)
    entry = doc["modules"][0]
    entry["generators"][0]["matrix"] = [str(x) for x in entry["generators"][0]["matrix"]]
    mods = load_catalog(doc)
    assert mods[0].name == "trivial"


def test_loader_rejects_unknown_schema():
    doc = catalog_document(2, 1)
    doc["schema"] = "bogus"
    with pytest.raises(ValueError):
        load_catalog(doc)


def test_unknown_module_name():
    with pytest.raises(ValueError, match="unknown module"):
        get_module(3, 1, "nope")
