"""JSON summaries and CSV tables. Complex numbers become [re, im] pairs,
non-finite floats become null, keys are sorted."""
import csv
import dataclasses
import json
import math
import os

import numpy as np

from typing import Any, Iterable, Sequence


def jsonable(obj: Any) -> Any:
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(x) for x in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        return jsonable(obj.item())
    if isinstance(obj, complex):
        return [jsonable(obj.real), jsonable(obj.imag)]
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    return obj


def write_json(path: str, payload: Any):
    os.makedirs(os.path.dirname(path) or '.', exist_ok=True)
    with open(path, 'w') as fp:
        json.dump(jsonable(payload), fp, indent=2, sort_keys=True)
        fp.write('\n')


def _cell(value: Any) -> Any:
    value = jsonable(value)
    if value is None:
        return ''
    if isinstance(value, list):
        return json.dumps(value)
    return value


def write_csv(path: str, columns: Sequence[str], rows: Iterable[Sequence[Any]]):
    os.makedirs(os.path.dirname(path) or '.', exist_ok=True)
    with open(path, 'w', newline='') as fp:
        writer = csv.writer(fp, lineterminator='\n')
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
