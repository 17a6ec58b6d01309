"""The built-in module catalog and its JSON interchange format.

A catalog document lists named modules by their generator action
matrices (row-major integer entries), the ring (p, e) and the group
kind.  Integer entries may be emitted as decimal strings should they
ever exceed 2^53; at the supported sizes they do not, and the loader
accepts both forms.
"""

from __future__ import annotations

import json
from typing import Optional

import numpy as np

from .exactalg import RingSpec, VerificationBug
from .grouprep import (
    GModule,
    GroupData,
    build_group,
    decompose_jbar,
    generated_submodule,
    is_irreducible,
    jbar,
    quotient_gmodule,
    trivial_module,
)

CATALOG_SCHEMA = "treelab.catalog.v1"


def steinberg(group: GroupData, ring: RingSpec) -> GModule:
    """The length-1 quotient of the trivial-character summand of jbar.

    The constant functions form a line inside that summand; the quotient
    has dimension p and is checked to be irreducible at build time.
    """
    summands = decompose_jbar(group, ring)
    ps0 = summands[0]
    J = jbar(group, ring)
    ones = np.ones(J.rank, dtype=np.int64)
    coords = ps0.eigenbasis.coords(ones)  # type: ignore[attr-defined]
    if coords is None:
        raise VerificationBug("constants must lie in the trivial-character summand")
    const_line = generated_submodule(ps0, coords)
    st = quotient_gmodule(ps0, const_line, name="steinberg")
    if st.rank != group.p or not is_irreducible(st):
        raise VerificationBug("steinberg quotient is not irreducible of dimension p")
    return st


def builtin_catalog(p: int, e: int, kind: str = "sl2") -> list[GModule]:
    """Named modules shipped with the tool.

    For e = 1: trivial, steinberg, jbar and the principal-series
    summands ps:i.  For e > 1 only trivial and jbar are available (the
    summand constructions use field coordinates).
    """
    group = build_group(kind, p)
    ring = RingSpec(p, e)
    mods = [trivial_module(group, ring), jbar(group, ring)]
    if e == 1 and kind == "sl2":
        mods.insert(1, steinberg(group, ring))
        mods.extend(decompose_jbar(group, ring))
    return mods


def get_module(p: int, e: int, name: str, kind: str = "sl2") -> GModule:
    for m in builtin_catalog(p, e, kind):
        if m.name == name:
            return m
    known = [m.name for m in builtin_catalog(p, e, kind)]
    raise ValueError(f"unknown module {name!r}; catalog has {known}")


def catalog_document(p: int, e: int, kind: str = "sl2") -> dict:
    ring = RingSpec(p, e)
    entries = []
    for m in builtin_catalog(p, e, kind):
        gens = []
        for g in m.group.gens:
            gens.append(
                {
                    "element": [int(x) for x in g],
                    "matrix": [int(x) for x in m.action(g).reshape(-1)],
                }
            )
        entries.append({"name": m.name, "kind": kind, "rank": m.rank, "generators": gens})
    return {"schema": CATALOG_SCHEMA, "ring": {"p": p, "e": e}, "modules": entries}


def emit_catalog(p: int, e: int, path: Optional[str] = None, kind: str = "sl2") -> dict:
    doc = catalog_document(p, e, kind)
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, sort_keys=True, indent=2)
            fh.write("\n")
    return doc


def _as_int(x) -> int:
    if isinstance(x, str):
        return int(x, 10)
    return int(x)


def load_catalog(doc_or_path) -> list[GModule]:
    """Parse a catalog document back into verified modules.

    Re-serializing the result reproduces the document bit-exactly.
    """
    if isinstance(doc_or_path, (str, bytes)):
        with open(doc_or_path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    else:
        doc = doc_or_path
    if doc.get("schema") != CATALOG_SCHEMA:
        raise ValueError(f"unknown catalog schema {doc.get('schema')!r}")
    p = _as_int(doc["ring"]["p"])
    e = _as_int(doc["ring"]["e"])
    ring = RingSpec(p, e)
    out = []
    for entry in doc["modules"]:
        kind = entry["kind"]
        group = build_group(kind, p)
        rank = _as_int(entry["rank"])
        mats = {}
        for gen in entry["generators"]:
            elem = tuple(_as_int(x) for x in gen["element"])
            flat = np.array([_as_int(x) for x in gen["matrix"]], dtype=np.int64)
            mats[elem] = flat.reshape(rank, rank)
        mod = GModule(group, ring, mats, name=entry["name"])
        mod.verify_action(samples=20, seed=0)
        out.append(mod)
    return out
