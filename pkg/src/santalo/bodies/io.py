"""JSON body files.

Format: {"kind": "polytope_h" | "polytope_v" | "polygon" | "revolution", "n": int,
"data": ..., "meridian": {"t": [...], "r": [...]}}. For ``polytope_h`` the data is
{"A": [[...]], "b": [...]}; for ``polytope_v``/``polygon`` it is the vertex list; for
``revolution`` it is {"axis": [...]} and the meridian carries the profile.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..errors import InvalidBody
from .polytope import Polygon, PolytopeH, PolytopeV
from .revolution import Profile, RevolutionBody

KINDS = ("polytope_h", "polytope_v", "polygon", "revolution")


def body_to_dict(body) -> dict:
    if isinstance(body, RevolutionBody):
        return {"kind": "revolution", "n": body.n, "data": {"axis": body.axis.tolist()},
                "meridian": body.meridian.to_dict()}
    if isinstance(body, PolytopeH):
        return {"kind": "polytope_h", "n": body.n, "data": {"A": body.A.tolist(), "b": body.b.tolist()}}
    if isinstance(body, Polygon):
        return {"kind": "polygon", "n": 2, "data": body.vertices.tolist()}
    if isinstance(body, PolytopeV):
        return {"kind": "polytope_v", "n": body.n, "data": body.vertices.tolist()}
    raise InvalidBody("kind", f"cannot serialize {type(body).__name__}")


def body_from_dict(d: dict):
    if not isinstance(d, dict):
        raise InvalidBody("file structure", "top level must be an object")
    kind = d.get("kind")
    if kind not in KINDS:
        raise InvalidBody("kind", f"unknown kind {kind!r}")
    if "n" not in d:
        raise InvalidBody("dimension", "missing field 'n'")
    n = d["n"]
    if not isinstance(n, int) or isinstance(n, bool):
        raise InvalidBody("dimension", "'n' must be an integer")
    data = d.get("data")
    try:
        if kind == "revolution":
            mer = d.get("meridian")
            if not isinstance(mer, dict) or "t" not in mer or "r" not in mer:
                raise InvalidBody("meridian", "missing meridian {t, r}")
            axis = (data or {}).get("axis") if isinstance(data, dict) else None
            if axis is None:
                axis = np.eye(n)[0] if n in (2, 3, 4) else [1.0]
            body = RevolutionBody(np.asarray(axis, float), Profile(mer["t"], mer["r"], positive_interior=False), n)
        elif kind == "polytope_h":
            if not isinstance(data, dict) or "A" not in data or "b" not in data:
                raise InvalidBody("halfspace array", "data must hold 'A' and 'b'")
            body = PolytopeH(data["A"], data["b"])
        elif kind == "polygon":
            body = Polygon(data)
        else:
            body = PolytopeV(data)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InvalidBody):
            raise
        raise InvalidBody("file structure", str(exc)) from exc
    if body.n != n:
        raise InvalidBody("dimension", f"declared n={n} but data has dimension {body.n}")
    return body


def load_body(path):
    try:
        d = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InvalidBody("file structure", f"malformed JSON: {exc}") from exc
    return body_from_dict(d)


def save_body(body, path):
    Path(path).write_text(json.dumps(body_to_dict(body)))
