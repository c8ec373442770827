"""JSON encoding of points, space models and windows.

Points serialize to objects tagged by model, e.g.
``{"model": "h2", "u": 0.0, "a": 1.0}``; spaces and windows to small
tagged dicts.  All encodings round-trip exactly (integers stay integers,
floats go through repr-exact JSON floats).
"""

from __future__ import annotations

from .errors import SchemaError
from .spaces import (
    BallWindow,
    BoxWindow,
    EuclideanModel,
    FreeGroupModel,
    H2Window,
    HeisenbergModel,
    HyperbolicPlaneModel,
    SpaceModel,
    ZdModel,
)


def space_to_json(space: SpaceModel) -> dict:
    if isinstance(space, ZdModel):
        return {"model": "zd", "d": space.d}
    if isinstance(space, FreeGroupModel):
        return {"model": "free_group", "k": space.k}
    if isinstance(space, HeisenbergModel):
        return {"model": "heisenberg"}
    if isinstance(space, EuclideanModel):
        return {"model": "euclidean", "d": space.d,
                "additive_group": space.additive_group}
    if isinstance(space, HyperbolicPlaneModel):
        return {"model": "h2"}
    raise SchemaError(f"unknown space model {space!r}")


def space_from_json(obj: dict) -> SpaceModel:
    try:
        tag = obj["model"]
    except (TypeError, KeyError):
        raise SchemaError(f"space object needs a 'model' tag: {obj!r}")
    if tag == "zd":
        return ZdModel(int(obj["d"]))
    if tag == "free_group":
        return FreeGroupModel(int(obj["k"]))
    if tag == "heisenberg":
        return HeisenbergModel()
    if tag == "euclidean":
        return EuclideanModel(int(obj["d"]), bool(obj.get("additive_group", False)))
    if tag == "h2":
        return HyperbolicPlaneModel()
    raise SchemaError(f"unknown space model tag {tag!r}")


def point_to_json(space: SpaceModel, p) -> dict:
    if isinstance(space, ZdModel):
        return {"model": "zd", "x": list(p)}
    if isinstance(space, FreeGroupModel):
        return {"model": "free_group", "w": list(p)}
    if isinstance(space, HeisenbergModel):
        return {"model": "heisenberg", "x": list(p)}
    if isinstance(space, EuclideanModel):
        return {"model": "euclidean", "x": [float(v) for v in p]}
    if isinstance(space, HyperbolicPlaneModel):
        return {"model": "h2", "u": float(p[0]), "a": float(p[1])}
    raise SchemaError(f"unknown space model {space!r}")


def point_from_json(space: SpaceModel, obj: dict):
    try:
        tag = obj["model"]
    except (TypeError, KeyError):
        raise SchemaError(f"point object needs a 'model' tag: {obj!r}")
    if isinstance(space, (ZdModel, HeisenbergModel)):
        p = tuple(int(v) for v in obj["x"])
    elif isinstance(space, FreeGroupModel):
        p = tuple(int(v) for v in obj["w"])
    elif isinstance(space, EuclideanModel):
        p = tuple(float(v) for v in obj["x"])
    elif isinstance(space, HyperbolicPlaneModel):
        p = (float(obj["u"]), float(obj["a"]))
    else:
        raise SchemaError(f"unknown space model {space!r}")
    expected = space_to_json(space)["model"]
    if tag != expected:
        raise SchemaError(f"point tagged {tag!r} does not match model {expected!r}")
    space.check_point(p)
    return p


def window_to_json(window) -> dict:
    if isinstance(window, BallWindow):
        return {"kind": "ball", "radius": window.radius}
    if isinstance(window, BoxWindow):
        return {"kind": "box", "lo": list(window.lo), "hi": list(window.hi),
                "pitch": window.pitch}
    if isinstance(window, H2Window):
        return {"kind": "h2box", "u": [window.u_min, window.u_max],
                "log_a": [window.la_min, window.la_max], "pitch": window.pitch}
    raise SchemaError(f"unknown window {window!r}")


def window_from_json(obj: dict):
    try:
        kind = obj["kind"]
    except (TypeError, KeyError):
        raise SchemaError(f"window object needs a 'kind' tag: {obj!r}")
    if kind == "ball":
        return BallWindow(int(obj["radius"]))
    if kind == "box":
        return BoxWindow(tuple(obj["lo"]), tuple(obj["hi"]), float(obj["pitch"]))
    if kind == "h2box":
        u = obj["u"]
        la = obj["log_a"]
        return H2Window(float(u[0]), float(u[1]), float(la[0]), float(la[1]),
                        float(obj.get("pitch") or 0.25))
    raise SchemaError(f"unknown window kind {kind!r}")
