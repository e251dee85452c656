"""JSON schemas for every object the command line touches.

Scalars are strings ("a/b", "c/d*i", "a/b+c/d*i"), series are a coeff
list plus an order, matrices carry one order for all entries.  Dumps
are deterministic: sorted keys, two-space indent, trailing newline.
Every *_to_obj / *_from_obj pair round-trips exactly.
"""
from __future__ import annotations

import json
from typing import Any

from . import picard_fuchs, vshs
from .amodel import InstantonTable
from .linalg import Matrix
from .scalars import Scalar, format_scalar, parse_scalar
from .series import Series, SeriesMatrix


def scalar_to_str(x: Scalar) -> str:
    return format_scalar(x)


def scalar_from_str(s: str) -> Scalar:
    return parse_scalar(s)


def series_to_obj(s: Series) -> dict[str, Any]:
    coeffs = [format_scalar(c) for c in s.coeffs]
    while coeffs and coeffs[-1] == "0":
        coeffs.pop()
    return {"order": s.order, "coeffs": coeffs}


def series_from_obj(obj: dict[str, Any]) -> Series:
    order = int(obj["order"])
    return Series([parse_scalar(c) for c in obj["coeffs"]], order)


def matrix_to_obj(m: SeriesMatrix) -> dict[str, Any]:
    entries = []
    for i in range(m.rows):
        row = []
        for j in range(m.cols):
            coeffs = [format_scalar(c) for c in m.entry(i, j).coeffs]
            while coeffs and coeffs[-1] == "0":
                coeffs.pop()
            row.append(coeffs)
        entries.append(row)
    return {"rows": m.rows, "cols": m.cols, "order": m.order,
            "entries": entries}


def matrix_from_obj(obj: dict[str, Any]) -> SeriesMatrix:
    order = int(obj["order"])
    entries = [[Series([parse_scalar(c) for c in cell], order)
                for cell in row] for row in obj["entries"]]
    return SeriesMatrix(entries)


def scalar_matrix_to_obj(m: Matrix) -> list[list[str]]:
    return [[format_scalar(x) for x in row] for row in m]


def scalar_matrix_from_obj(obj: list[list[str]]) -> Matrix:
    return [[parse_scalar(x) for x in row] for row in obj]


def dn_to_obj(d: vshs.DnObject) -> dict[str, Any]:
    return {
        "kind": "dn_object",
        "n": d.n,
        "graded_dims": {str(k): v for k, v in sorted(d.graded_dims.items())},
        "pairing0": scalar_matrix_to_obj(d.pairing0_matrix()),
        "a_series": matrix_to_obj(d.a_series),
    }


def dn_from_obj(obj: dict[str, Any]) -> vshs.DnObject:
    dims = {int(k): int(v) for k, v in obj["graded_dims"].items()}
    return vshs.DnObject(
        n=int(obj["n"]), graded_dims=dims,
        pairing0=scalar_matrix_from_obj(obj["pairing0"]),
        a_series=matrix_from_obj(obj["a_series"]))


def rees_to_obj(r: vshs.ReesModule) -> dict[str, Any]:
    return {
        "kind": "rees_module",
        "degrees": list(r.degrees),
        "parity": r.parity,
        "order": r.order,
        "conn_u": {str(p): matrix_to_obj(m)
                   for p, m in sorted(r.conn_u.items())},
        "pairing_u": {str(p): matrix_to_obj(m)
                      for p, m in sorted(r.pairing_u.items())},
    }


def rees_from_obj(obj: dict[str, Any]) -> vshs.ReesModule:
    return vshs.ReesModule(
        degrees=[int(k) for k in obj["degrees"]],
        conn_u={int(p): matrix_from_obj(m)
                for p, m in obj["conn_u"].items()},
        pairing_u={int(p): matrix_from_obj(m)
                   for p, m in obj["pairing_u"].items()},
        parity=int(obj["parity"]),
        order=int(obj["order"]))


def geometric_to_obj(g: vshs.GeometricVHS) -> dict[str, Any]:
    return {
        "kind": "geometric_vhs",
        "levels2": list(g.levels2),
        "parity": g.parity,
        "conn": matrix_to_obj(g.conn),
        "pairing": None if g.pairing is None else matrix_to_obj(g.pairing),
    }


def geometric_from_obj(obj: dict[str, Any]) -> vshs.GeometricVHS:
    pairing = obj.get("pairing")
    return vshs.GeometricVHS(
        conn=matrix_from_obj(obj["conn"]),
        levels2=[int(l) for l in obj["levels2"]],
        pairing=None if pairing is None else matrix_from_obj(pairing),
        parity=int(obj["parity"]))


def pf_to_obj(op: picard_fuchs.PFOperator) -> dict[str, Any]:
    return {
        "kind": "pf_operator",
        "order": op.order_theta,
        "coeffs": [[format_scalar(x) for x in c] for c in op.coeffs],
    }


def table_to_obj(t: InstantonTable) -> dict[str, Any]:
    return {
        "kind": "instanton_table",
        "max_degree": t.max_degree,
        "entries": {str(d): format_scalar(v)
                    for d, v in sorted(t.entries.items())},
        "suspect": list(t.suspect),
    }


def table_from_obj(obj: dict[str, Any]) -> InstantonTable:
    return InstantonTable(
        max_degree=int(obj["max_degree"]),
        entries={int(d): parse_scalar(v)
                 for d, v in obj["entries"].items()})


def report_to_obj(r: vshs.NormalFormReport) -> dict[str, Any]:
    return {
        "kind": "normal_form_report",
        "mirror_coordinate": series_to_obj(r.mirror_coordinate),
        "gauge": matrix_to_obj(r.gauge),
        "volume_index": r.volume_index,
        "dn": dn_to_obj(r.dn),
    }


def report_from_obj(obj: dict[str, Any]) -> vshs.NormalFormReport:
    return vshs.NormalFormReport(
        mirror_coordinate=series_from_obj(obj["mirror_coordinate"]),
        gauge=matrix_from_obj(obj["gauge"]),
        dn=dn_from_obj(obj["dn"]),
        volume_index=int(obj["volume_index"]))


def dumps(obj: dict[str, Any]) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


_LOADERS = {
    "dn_object": dn_from_obj,
    "rees_module": rees_from_obj,
    "geometric_vhs": geometric_from_obj,
    "instanton_table": table_from_obj,
    "normal_form_report": report_from_obj,
}


def load_text(text: str):
    """Load any known kind from its JSON text; PF operator text (JSON
    or the expression language) is handed to its own parser."""
    stripped = text.strip()
    if stripped.startswith("{"):
        data = json.loads(stripped)
        kind = data.get("kind")
        if kind in _LOADERS:
            return _LOADERS[kind](data)
        if kind == "pf_operator" or "coeffs" in data:
            return picard_fuchs.parse_pf(stripped)
        raise ValueError(f"unknown object kind {kind!r}")
    return picard_fuchs.parse_pf(stripped)
