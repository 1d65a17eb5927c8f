"""JSON documents for periodic complexes, crowned diagrams and graded modules.

Every document carries ``kind`` and ``format_version``. Matrices are stored
row-major; ``diff[n]`` is the differential out of slot n, with shape
``ranks[n-1] x ranks[n]``. Crowned diagrams key vertices by "b0", "z1", ...
and edges by "(b0,z1)", each edge holding one row-major block per slot.
"""

from __future__ import annotations

import json
import warnings
from typing import Any

from .diagramkit import ShapeMismatch
from .exactlin import FgAbelianGroup, IntMatrix
from .franke import CrownedDiagram
from .percomplex import ChainMap, DifferentialNotSquareZero, GradedModule, NotAChainMap, PeriodicComplex
from .posetkit import b, crown, label_str, z

FORMAT_VERSION = 1


class FormatError(ValueError):
    """Schema violation; ``path`` locates the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class FormatVersionWarning(UserWarning):
    pass


# low-level field readers


def _field(data: Any, key: str, path: str) -> Any:
    if not isinstance(data, dict):
        raise FormatError(path, f"expected an object, got {type(data).__name__}")
    if key not in data:
        raise FormatError(path, f"missing field '{key}'")
    return data[key]


def _int(v: Any, path: str, minimum: int | None = None) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise FormatError(path, f"expected an integer, got {v!r}")
    if minimum is not None and v < minimum:
        raise FormatError(path, f"must be >= {minimum}, got {v}")
    return v


def _list(v: Any, path: str, length: int | None = None) -> list:
    if not isinstance(v, list):
        raise FormatError(path, f"expected a list, got {type(v).__name__}")
    if length is not None and len(v) != length:
        raise FormatError(path, f"expected {length} entries, got {len(v)}")
    return v


def _period(data: dict, path: str) -> int:
    return _int(_field(data, "period", path), f"{path}.period", minimum=2)


def _matrix(v: Any, rows: int, cols: int, path: str) -> IntMatrix:
    flat = _list(v, path, rows * cols)
    return IntMatrix.from_entries(rows, cols, [_int(x, f"{path}[{k}]") for k, x in enumerate(flat)])


def _flat(m: IntMatrix) -> list[int]:
    return list(m.entries)


def _header(data: Any, kind: str, path: str = "$") -> None:
    got = _field(data, "kind", path)
    if got != kind:
        raise FormatError(f"{path}.kind", f"expected '{kind}', got {got!r}")
    version = _field(data, "format_version", path)
    _int(version, f"{path}.format_version")
    if version != FORMAT_VERSION:
        warnings.warn(f"format_version {version} differs from supported version {FORMAT_VERSION}",
                      FormatVersionWarning, stacklevel=3)


# periodic complexes


def _complex_body(x: PeriodicComplex) -> dict:
    return {"ranks": [x.rank(n) for n in range(x.period)],
            "diff": [_flat(x.d(n)) for n in range(x.period)]}


def _complex_from_body(data: Any, period: int, path: str) -> PeriodicComplex:
    ranks = [_int(r, f"{path}.ranks[{n}]", 0)
             for n, r in enumerate(_list(_field(data, "ranks", path), f"{path}.ranks", period))]
    diff = _list(_field(data, "diff", path), f"{path}.diff", period)
    mats = [_matrix(diff[n], ranks[(n - 1) % period], ranks[n], f"{path}.diff[{n}]") for n in range(period)]
    try:
        return PeriodicComplex(period, ranks, mats)
    except DifferentialNotSquareZero as exc:
        raise FormatError(f"{path}.diff", str(exc)) from exc


def complex_to_dict(x: PeriodicComplex) -> dict:
    return {"kind": "periodic_complex", "format_version": FORMAT_VERSION, "period": x.period,
            **_complex_body(x)}


def complex_from_dict(data: Any, path: str = "$") -> PeriodicComplex:
    _header(data, "periodic_complex", path)
    return _complex_from_body(data, _period(data, path), path)


# graded modules


def module_to_dict(m: GradedModule) -> dict:
    return {"kind": "graded_module", "format_version": FORMAT_VERSION, "period": m.period,
            "slots": [{"free_rank": grp.free_rank, "torsion": list(grp.torsion)} for grp in m.slots]}


def module_from_dict(data: Any, path: str = "$") -> GradedModule:
    _header(data, "graded_module", path)
    period = _period(data, path)
    slots = []
    for n, s in enumerate(_list(_field(data, "slots", path), f"{path}.slots", period)):
        p = f"{path}.slots[{n}]"
        free = _int(_field(s, "free_rank", p), f"{p}.free_rank", 0)
        tors = [_int(t, f"{p}.torsion[{k}]", 2) for k, t in enumerate(_list(_field(s, "torsion", p), f"{p}.torsion"))]
        try:
            slots.append(FgAbelianGroup(free, tuple(tors)))
        except ValueError as exc:
            raise FormatError(f"{p}.torsion", str(exc)) from exc
    return GradedModule(period, tuple(slots))


# crowned diagrams


def crowned_to_dict(x: CrownedDiagram) -> dict:
    d = x.diagram
    return {
        "kind": "crowned_diagram",
        "format_version": FORMAT_VERSION,
        "period": x.period,
        "vertices": {label_str(v): _complex_body(d[v]) for v in d.shape},
        "edges": {label_str(e): [_flat(f.block(n)) for n in range(x.period)]
                  for e, f in sorted(d.edge.items(), key=lambda kv: label_str(kv[0]))},
    }


def crowned_from_dict(data: Any, path: str = "$") -> CrownedDiagram:
    _header(data, "crowned_diagram", path)
    n_ = _period(data, path)
    verts_raw = _field(data, "vertices", path)
    edges_raw = _field(data, "edges", path)
    if not isinstance(verts_raw, dict) or not isinstance(edges_raw, dict):
        raise FormatError(path, "vertices and edges must be objects")
    shape = crown(n_)
    expected_v = {label_str(v): v for v in shape}
    expected_e = {label_str(e): e for e in shape.covers}
    for key in verts_raw:
        if key not in expected_v:
            raise FormatError(f"{path}.vertices", f"unknown vertex '{key}'")
    for key in edges_raw:
        if key not in expected_e:
            raise FormatError(f"{path}.edges", f"unknown edge '{key}'")
    verts = {}
    for key, v in expected_v.items():
        if key not in verts_raw:
            raise FormatError(f"{path}.vertices", f"missing vertex '{key}'")
        verts[v] = _complex_from_body(verts_raw[key], n_, f"{path}.vertices.{key}")
    edges = {}
    for key, (src, tgt) in expected_e.items():
        if key not in edges_raw:
            raise FormatError(f"{path}.edges", f"missing edge '{key}'")
        p = f"{path}.edges.{key}"
        blocks = _list(edges_raw[key], p, n_)
        mats = [_matrix(blocks[n], verts[tgt].rank(n), verts[src].rank(n), f"{p}[{n}]") for n in range(n_)]
        try:
            edges[(src, tgt)] = ChainMap(verts[src], verts[tgt], mats)
        except NotAChainMap as exc:
            raise FormatError(p, str(exc)) from exc
    try:
        return CrownedDiagram.build(n_, [verts[b(i, n_)] for i in range(n_)], [verts[z(i, n_)] for i in range(n_)],
                                    [edges[(b(i, n_), z(i, n_))] for i in range(n_)],
                                    [edges[(b(i - 1, n_), z(i, n_))] for i in range(n_)])
    except ShapeMismatch as exc:
        raise FormatError(path, str(exc)) from exc


# dispatch

_WRITERS = {PeriodicComplex: complex_to_dict, GradedModule: module_to_dict, CrownedDiagram: crowned_to_dict}
READERS = {"periodic_complex": complex_from_dict, "graded_module": module_from_dict,
           "crowned_diagram": crowned_from_dict}


def to_dict(obj: PeriodicComplex | GradedModule | CrownedDiagram) -> dict:
    try:
        return _WRITERS[type(obj)](obj)
    except KeyError:
        raise TypeError(f"cannot serialize {type(obj).__name__}") from None


def from_dict(data: Any, path: str = "$"):
    kind = _field(data, "kind", path)
    if kind not in READERS:
        raise FormatError(f"{path}.kind", f"unknown kind {kind!r}")
    return READERS[kind](data, path)


def dumps(obj) -> str:
    return json.dumps(to_dict(obj), sort_keys=True, ensure_ascii=False)


def parse_json(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"line {exc.lineno} column {exc.colno}", exc.msg) from exc


def loads(text: str):
    return from_dict(parse_json(text))
