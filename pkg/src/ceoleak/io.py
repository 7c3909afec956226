"""Model files (JSON, ``"schema": 1``) and CSV/JSON report writers."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from .info import AuxiliarySystem, DiscreteCeoModel

SCHEMA_VERSION = 1


class InputError(ValueError):
    """Malformed input file; the message names the file and the offending field."""


def load_schema() -> dict:
    return json.loads(resources.files("ceoleak").joinpath("data/model.schema.json").read_text())


@dataclass(frozen=True)
class ModelFile:
    model: DiscreteCeoModel
    aux: AuxiliarySystem
    distortion: np.ndarray | None = None


def parse_model_document(doc: dict, source: str = "<document>") -> ModelFile:
    try:
        jsonschema.validate(doc, load_schema())
    except jsonschema.ValidationError as e:
        where = "/".join(str(p) for p in e.absolute_path) or "(top level)"
        raise InputError(f"{source}: field {where}: {e.message}") from None

    def arr(key):
        return None if key not in doc else np.asarray(doc[key], dtype=float)

    try:
        model = DiscreteCeoModel(arr("px"), arr("py1_given_x"), arr("py2_given_x"),
                                 arr("pz_given_x"))
        aux = AuxiliarySystem(arr("pq"), arr("pu1_given_y1_q"), arr("pu2_given_y2_q"),
                              arr("pv1_given_u1_q"), arr("pv2_given_u2_q"))
    except ValueError as e:
        # ragged nested lists also end up here via numpy
        raise InputError(f"{source}: {e}") from None
    dist = arr("distortion")
    if dist is not None and dist.shape[0] != model.nx:
        raise InputError(f"{source}: distortion has {dist.shape[0]} rows, expected |X|={model.nx}")
    for k, ny in ((1, model.ny1), (2, model.ny2)):
        name = f"pu{k}_given_y{k}_q"
        if getattr(aux, name).shape[0] != ny:
            raise InputError(f"{source}: {name} has {getattr(aux, name).shape[0]} input rows, "
                             f"expected |Y{k}|={ny}")
    return ModelFile(model, aux, dist)


def load_model_file(path) -> ModelFile:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise InputError(f"{path}: cannot read ({e.strerror})") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: line {e.lineno}, column {e.colno}: {e.msg}") from None
    if not isinstance(doc, dict):
        raise InputError(f"{path}: top level must be a JSON object")
    return parse_model_document(doc, str(path))


def model_document(model: DiscreteCeoModel, aux: AuxiliarySystem, distortion=None) -> dict:
    doc = {"schema": SCHEMA_VERSION}
    doc.update(model.to_dict())
    doc.update(aux.to_dict())
    if distortion is not None:
        doc["distortion"] = np.asarray(distortion).tolist()
    return doc


def _num(x) -> str:
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([v if isinstance(v, str) else _num(v) for v in r])
    return buf.getvalue()


def curve_csv(rows) -> str:
    return csv_text(("L1", "minD", "r1_witness", "r2_witness"),
                    ((r.L1, r.min_D, r.r1, r.r2) for r in rows))


def extreme_points_csv(points) -> str:
    return csv_text(("label", "R1", "R2", "L1", "L2", "D"),
                    ((p.label, p.R1, p.R2, p.L1, p.L2, p.D) for p in points))


def _jsonable(o):
    if isinstance(o, dict):
        return {str(k): _jsonable(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_jsonable(v) for v in o]
    if isinstance(o, (np.floating, float)):
        o = float(o)
        return o if math.isfinite(o) else ("inf" if o > 0 else "-inf" if o < 0 else "nan")
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.bool_):
        return bool(o)
    return o


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=False) + "\n"


def constraint_table(cs) -> str:
    lines = [f"{cs.name}:"]
    width = max(len(c.label) for c in cs)
    for c in cs:
        lines.append(f"  {c.label:<{width}}  {c.describe()}")
    return "\n".join(lines)
