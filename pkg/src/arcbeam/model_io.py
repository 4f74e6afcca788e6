"""JSON model files: validation, round-trip serialization and model building.

Two file kinds exist.  A *frame* file describes nodes, supports, curved
elements, a reference load pattern and the path-following analysis.  A
*cantilever* file drives one element directly with a history of end
moments, which also covers closed shapes whose end joints coincide.

Parsing produces plain frozen dataclasses with every derived value
resolved (for example circle lengths taken from the joint distance), so
``parse(serialize(parse(doc)))`` equals ``parse(doc)`` field by field.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any

from . import geometry as geo
from .element import BeamElement
from .section import SectionModel, straightening_moment
from .solver import (
    ArcLength,
    DisplacementControl,
    IndirectControl,
    LoadControl,
    StructureModel,
    steps_to,
)

__all__ = [
    "SchemaError",
    "DofRef",
    "ShapeSpec",
    "SectionSpec",
    "NodeSpec",
    "ElementSpec",
    "SupportSpec",
    "LoadSpec",
    "AnalysisSpec",
    "MetricSpec",
    "OutputSpec",
    "FrameSpec",
    "CantileverSpec",
    "parse_model",
    "load_model",
    "dump_model",
    "to_document",
    "build_structure",
    "build_control",
    "build_shape",
    "build_section",
    "moment_unit",
]

DOF_NAMES = ("u", "w", "phi")
CONTROLS = ("initial_stiffness", "load", "displacement", "indirect", "arc_length")
METRICS = ("dof", "ratio", "max_load", "critical_load", "normal_force")


class SchemaError(ValueError):
    """Invalid model file; ``path`` locates the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


# -- small validators -------------------------------------------------------


def _obj(doc, path) -> dict:
    if not isinstance(doc, dict):
        raise SchemaError(path, "expected an object")
    return doc


def _check_keys(doc: dict, path: str, allowed) -> None:
    extra = sorted(set(doc) - set(allowed))
    if extra:
        raise SchemaError(f"{path}.{extra[0]}", "unknown field")


def _req(doc: dict, key: str, path: str):
    if key not in doc:
        raise SchemaError(f"{path}.{key}", "required field is missing")
    return doc[key]


def _num(value, path, *, positive=False, nonneg=False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(path, "expected a number")
    v = float(value)
    if not math.isfinite(v):
        raise SchemaError(path, "must be finite")
    if positive and v <= 0:
        raise SchemaError(path, "must be positive")
    if nonneg and v < 0:
        raise SchemaError(path, "must be non-negative")
    return v


def _int(value, path, *, minimum=1) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(path, "expected an integer")
    if value < minimum:
        raise SchemaError(path, f"must be at least {minimum}")
    return value


def _str(value, path, choices=None) -> str:
    if not isinstance(value, str) or not value:
        raise SchemaError(path, "expected a non-empty string")
    if choices is not None and value not in choices:
        raise SchemaError(path, f"must be one of {', '.join(choices)}")
    return value


def _bool(value, path) -> bool:
    if not isinstance(value, bool):
        raise SchemaError(path, "expected true or false")
    return value


def _list(value, path) -> list:
    if not isinstance(value, list):
        raise SchemaError(path, "expected a list")
    return value


# -- spec types -------------------------------------------------------------


@dataclass(frozen=True)
class DofRef:
    node: str
    dof: str

    @property
    def label(self) -> str:
        return f"{self.node}:{self.dof}"


@dataclass(frozen=True)
class ShapeSpec:
    kind: str
    params: tuple[tuple[str, Any], ...]

    def get(self, key, default=None):
        return dict(self.params).get(key, default)


@dataclass(frozen=True)
class SectionSpec:
    E: float | None = None
    b: float | None = None
    h: float | None = None
    EA: float | None = None
    EI: float | None = None
    law: str = "consistent"
    inertia: str = "exact"


@dataclass(frozen=True)
class NodeSpec:
    id: str
    x: float
    z: float


@dataclass(frozen=True)
class ElementSpec:
    id: str
    a: str
    b: str
    section: str
    nis: int
    shape: ShapeSpec
    spacing: str = "arc"


@dataclass(frozen=True)
class SupportSpec:
    node: str
    fix: tuple[str, ...]


@dataclass(frozen=True)
class LoadSpec:
    node: str
    dof: str
    value: float


@dataclass(frozen=True)
class AnalysisSpec:
    control: str
    dof: DofRef | None = None
    target: float | None = None
    steps: int | None = None
    ds: float | None = None
    psi: float = 0.0
    stop: DofRef | None = None
    stop_value: float | None = None
    stop_load: float | None = None
    max_ds_factor: float = 1.0
    max_load: bool = False
    critical: bool = False
    total_load: float | None = None


@dataclass(frozen=True)
class MetricSpec:
    kind: str = "dof"
    node: str | None = None
    dof: str | None = None
    element: str | None = None
    end: str = "b"


@dataclass(frozen=True)
class OutputSpec:
    track: tuple[DofRef, ...] = ()
    shapes: str = "last"  # "none", "last" or "all"
    metric: MetricSpec | None = None


@dataclass(frozen=True)
class FrameSpec:
    title: str
    sections: tuple[tuple[str, SectionSpec], ...]
    nodes: tuple[NodeSpec, ...]
    elements: tuple[ElementSpec, ...]
    supports: tuple[SupportSpec, ...]
    loads: tuple[LoadSpec, ...]
    analysis: AnalysisSpec
    output: OutputSpec

    kind = "frame"

    def section(self, name: str) -> SectionSpec:
        return dict(self.sections)[name]

    def node(self, node_id: str) -> NodeSpec:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise KeyError(node_id)

    def with_nis(self, nis: int) -> FrameSpec:
        return replace(self, elements=tuple(replace(e, nis=int(nis)) for e in self.elements))

    def with_law(self, law: str) -> FrameSpec:
        return replace(self, sections=tuple((k, replace(s, law=law)) for k, s in self.sections))


@dataclass(frozen=True)
class CantileverSpec:
    title: str
    shape: ShapeSpec
    section: SectionSpec
    nis: int
    moments: tuple[float, ...]
    unit: str = "absolute"  # "absolute", "straightening" or "EI_over_length"
    length: float | None = None
    compare_laws: bool = False
    scale: float | None = None
    probe: float | None = None
    spacing: str = "arc"

    kind = "cantilever"

    def with_nis(self, nis: int) -> CantileverSpec:
        return replace(self, nis=int(nis))

    def with_law(self, law: str) -> CantileverSpec:
        return replace(self, section=replace(self.section, law=law))


# -- parsing ----------------------------------------------------------------


def _parse_dofref(doc, path) -> DofRef:
    d = _obj(doc, path)
    _check_keys(d, path, ("node", "dof"))
    return DofRef(_str(_req(d, "node", path), f"{path}.node"), _str(_req(d, "dof", path), f"{path}.dof", DOF_NAMES))


def _parse_section(doc, path) -> SectionSpec:
    d = _obj(doc, path)
    _check_keys(d, path, ("E", "b", "h", "EA", "EI", "law", "inertia"))
    law = _str(d.get("law", None) or ("simplified" if "EA" in d else "consistent"), f"{path}.law", ("consistent", "simplified"))
    inertia = _str(d.get("inertia", "exact"), f"{path}.inertia", ("exact", "two_term"))
    if "EA" in d or "EI" in d:
        if any(k in d for k in ("E", "b", "h")):
            raise SchemaError(path, "give either E, b, h or EA, EI, not both")
        return SectionSpec(
            EA=_num(_req(d, "EA", path), f"{path}.EA", positive=True),
            EI=_num(_req(d, "EI", path), f"{path}.EI", positive=True),
            law=law,
            inertia=inertia,
        )
    return SectionSpec(
        E=_num(_req(d, "E", path), f"{path}.E", positive=True),
        b=_num(_req(d, "b", path), f"{path}.b", positive=True),
        h=_num(_req(d, "h", path), f"{path}.h", positive=True),
        law=law,
        inertia=inertia,
    )


def _minor_arc(kappa: float, chord: float, path: str) -> float:
    k = abs(kappa)
    if chord * k > 2.0:
        raise SchemaError(path, f"chord {chord:.6g} exceeds the circle diameter")
    return 2.0 * math.asin(0.5 * chord * k) / k


def _parse_shape(doc, path, chord: float | None) -> ShapeSpec:
    d = _obj(doc, path)
    kind = _str(_req(d, "kind", path), f"{path}.kind", ("straight", "circle", "parabola", "logspiral", "zigzag"))
    p = f"{path}"

    def length_or_chord():
        if "L" in d:
            return _num(d["L"], f"{p}.L", positive=True)
        if chord is None:
            raise SchemaError(f"{p}.L", "required field is missing")
        return chord

    if kind == "straight":
        _check_keys(d, p, ("kind", "L"))
        return ShapeSpec(kind, (("L", length_or_chord()),))
    if kind == "circle":
        _check_keys(d, p, ("kind", "kappa0", "L"))
        k = _num(_req(d, "kappa0", p), f"{p}.kappa0")
        if k == 0:
            raise SchemaError(f"{p}.kappa0", "must be nonzero; use a straight shape")
        if "L" in d:
            L = _num(d["L"], f"{p}.L", positive=True)
        elif chord is None:
            raise SchemaError(f"{p}.L", "required field is missing")
        else:
            L = _minor_arc(k, chord, p)
        return ShapeSpec(kind, (("kappa0", k), ("L", L)))
    if kind == "parabola":
        _check_keys(d, p, ("kind", "a", "L", "x0", "x1"))
        a = _num(_req(d, "a", p), f"{p}.a", positive=True)
        x0 = _num(d.get("x0", 0.0), f"{p}.x0", nonneg=True)
        if "x1" in d:
            if "L" in d:
                raise SchemaError(p, "give either L or x1, not both")
            x1 = _num(d["x1"], f"{p}.x1")
            if x1 <= x0:
                raise SchemaError(f"{p}.x1", "must exceed x0")
            L = float(geo.Parabola(L=1.0, a=a).arc_length(x1) - geo.Parabola(L=1.0, a=a).arc_length(x0))
        else:
            L = _num(_req(d, "L", p), f"{p}.L", positive=True)
        return ShapeSpec(kind, (("a", a), ("L", L), ("x0", x0)))
    if kind == "logspiral":
        _check_keys(d, p, ("kind", "a", "b", "theta_max"))
        return ShapeSpec(
            kind,
            (
                ("a", _num(_req(d, "a", p), f"{p}.a", positive=True)),
                ("b", _num(_req(d, "b", p), f"{p}.b", positive=True)),
                ("theta_max", _num(_req(d, "theta_max", p), f"{p}.theta_max", positive=True)),
            ),
        )
    _check_keys(d, p, ("kind", "segments"))
    segs = []
    for i, s in enumerate(_list(_req(d, "segments", p), f"{p}.segments")):
        sp = f"{p}.segments[{i}]"
        if not isinstance(s, list) or len(s) != 2:
            raise SchemaError(sp, "expected [length, angle]")
        segs.append((_num(s[0], f"{sp}[0]", positive=True), _num(s[1], f"{sp}[1]")))
    if not segs:
        raise SchemaError(f"{p}.segments", "must not be empty")
    if segs[0][1] != 0.0:
        raise SchemaError(f"{p}.segments[0][1]", "the first segment angle must be 0")
    return ShapeSpec(kind, (("segments", tuple(segs)),))


def _parse_analysis(doc, path) -> AnalysisSpec:
    d = _obj(doc, path)
    _check_keys(
        d, path,
        ("control", "dof", "target", "steps", "ds", "psi", "stop", "stop_load", "max_ds_factor", "max_load", "critical",
         "total_load"),
    )
    control = _str(_req(d, "control", path), f"{path}.control", CONTROLS)
    kw: dict[str, Any] = {"control": control}
    if control in ("initial_stiffness", "displacement", "indirect"):
        kw["dof"] = _parse_dofref(_req(d, "dof", path), f"{path}.dof")
    if control in ("load", "displacement", "indirect"):
        kw["target"] = _num(_req(d, "target", path), f"{path}.target")
        kw["steps"] = _int(_req(d, "steps", path), f"{path}.steps")
    if control == "arc_length":
        kw["ds"] = _num(_req(d, "ds", path), f"{path}.ds", positive=True)
        kw["steps"] = _int(_req(d, "steps", path), f"{path}.steps")
        kw["psi"] = _num(d.get("psi", 0.0), f"{path}.psi", nonneg=True)
        kw["max_ds_factor"] = _num(d.get("max_ds_factor", 1.0), f"{path}.max_ds_factor", positive=True)
        if "stop" in d:
            sp = f"{path}.stop"
            s = _obj(d["stop"], sp)
            _check_keys(s, sp, ("node", "dof", "value"))
            kw["stop"] = DofRef(_str(_req(s, "node", sp), f"{sp}.node"), _str(_req(s, "dof", sp), f"{sp}.dof", DOF_NAMES))
            kw["stop_value"] = _num(_req(s, "value", sp), f"{sp}.value", positive=True)
        if "stop_load" in d:
            kw["stop_load"] = _num(d["stop_load"], f"{path}.stop_load", positive=True)
    else:
        for key in ("ds", "psi", "stop", "stop_load", "max_ds_factor"):
            if key in d:
                raise SchemaError(f"{path}.{key}", "only valid for arc_length control")
    if control == "initial_stiffness" and "total_load" in d:
        kw["total_load"] = _num(d["total_load"], f"{path}.total_load", positive=True)
    elif "total_load" in d:
        raise SchemaError(f"{path}.total_load", "only valid for initial_stiffness control")
    if control != "initial_stiffness":
        kw["max_load"] = _bool(d.get("max_load", False), f"{path}.max_load")
        kw["critical"] = _bool(d.get("critical", False), f"{path}.critical")
    for key in ("dof", "target", "steps"):
        if key in d and key not in kw:
            raise SchemaError(f"{path}.{key}", f"not used by {control} control")
    return AnalysisSpec(**kw)


def _parse_metric(doc, path) -> MetricSpec:
    d = _obj(doc, path)
    _check_keys(d, path, ("kind", "node", "dof", "element", "end"))
    kind = _str(_req(d, "kind", path), f"{path}.kind", METRICS)
    if kind == "dof":
        return MetricSpec(kind, node=_str(_req(d, "node", path), f"{path}.node"),
                          dof=_str(_req(d, "dof", path), f"{path}.dof", DOF_NAMES))
    if kind == "normal_force":
        return MetricSpec(kind, element=_str(_req(d, "element", path), f"{path}.element"),
                          end=_str(d.get("end", "b"), f"{path}.end", ("a", "b")))
    for key in ("node", "dof", "element", "end"):
        if key in d:
            raise SchemaError(f"{path}.{key}", f"not used by the {kind} metric")
    return MetricSpec(kind)


def _parse_output(doc, path) -> OutputSpec:
    d = _obj(doc, path)
    _check_keys(d, path, ("track", "shapes", "metric"))
    track = tuple(_parse_dofref(t, f"{path}.track[{i}]") for i, t in enumerate(_list(d.get("track", []), f"{path}.track")))
    shapes = _str(d.get("shapes", "last"), f"{path}.shapes", ("none", "last", "all"))
    metric = _parse_metric(d["metric"], f"{path}.metric") if "metric" in d else None
    return OutputSpec(track, shapes, metric)


def _parse_frame(d: dict) -> FrameSpec:
    _check_keys(d, "$", ("format", "title", "sections", "nodes", "elements", "supports", "loads", "analysis", "output"))
    title = d.get("title", "")
    if not isinstance(title, str):
        raise SchemaError("$.title", "expected a string")

    sec_doc = _obj(_req(d, "sections", "$"), "$.sections")
    if not sec_doc:
        raise SchemaError("$.sections", "at least one section is required")
    sections = tuple((name, _parse_section(s, f"$.sections.{name}")) for name, s in sec_doc.items())

    nodes = []
    seen = set()
    for i, n in enumerate(_list(_req(d, "nodes", "$"), "$.nodes")):
        p = f"$.nodes[{i}]"
        n = _obj(n, p)
        _check_keys(n, p, ("id", "x", "z"))
        nid = _str(_req(n, "id", p), f"{p}.id")
        if nid in seen:
            raise SchemaError(f"{p}.id", f"duplicate node id {nid!r}")
        seen.add(nid)
        nodes.append(NodeSpec(nid, _num(_req(n, "x", p), f"{p}.x"), _num(_req(n, "z", p), f"{p}.z")))
    coords = {n.id: (n.x, n.z) for n in nodes}

    def node_ref(value, p):
        nid = _str(value, p)
        if nid not in coords:
            raise SchemaError(p, f"unknown node {nid!r}")
        return nid

    elements = []
    eids = set()
    for i, e in enumerate(_list(_req(d, "elements", "$"), "$.elements")):
        p = f"$.elements[{i}]"
        e = _obj(e, p)
        _check_keys(e, p, ("id", "a", "b", "section", "nis", "shape", "spacing"))
        eid = _str(_req(e, "id", p), f"{p}.id")
        if eid in eids:
            raise SchemaError(f"{p}.id", f"duplicate element id {eid!r}")
        eids.add(eid)
        a = node_ref(_req(e, "a", p), f"{p}.a")
        b = node_ref(_req(e, "b", p), f"{p}.b")
        sec = _str(_req(e, "section", p), f"{p}.section")
        if sec not in sec_doc:
            raise SchemaError(f"{p}.section", f"unknown section {sec!r}")
        chord = math.dist(coords[a], coords[b])
        shape = _parse_shape(_req(e, "shape", p), f"{p}.shape", chord)
        spacing = _str(e.get("spacing", "arc"), f"{p}.spacing", ("arc", "projection"))
        elements.append(ElementSpec(eid, a, b, sec, _int(_req(e, "nis", p), f"{p}.nis"), shape, spacing))
    if not elements:
        raise SchemaError("$.elements", "at least one element is required")

    supports = []
    for i, s in enumerate(_list(_req(d, "supports", "$"), "$.supports")):
        p = f"$.supports[{i}]"
        s = _obj(s, p)
        _check_keys(s, p, ("node", "fix"))
        fix = tuple(_str(c, f"{p}.fix[{j}]", DOF_NAMES) for j, c in enumerate(_list(_req(s, "fix", p), f"{p}.fix")))
        supports.append(SupportSpec(node_ref(_req(s, "node", p), f"{p}.node"), fix))
    if not supports:
        raise SchemaError("$.supports", "at least one support is required")

    loads = []
    for i, ld in enumerate(_list(d.get("loads", []), "$.loads")):
        p = f"$.loads[{i}]"
        ld = _obj(ld, p)
        _check_keys(ld, p, ("node", "dof", "value"))
        loads.append(
            LoadSpec(node_ref(_req(ld, "node", p), f"{p}.node"), _str(_req(ld, "dof", p), f"{p}.dof", DOF_NAMES),
                     _num(_req(ld, "value", p), f"{p}.value"))
        )

    analysis = _parse_analysis(_req(d, "analysis", "$"), "$.analysis")
    output = _parse_output(d.get("output", {}), "$.output")

    for p, ref in (("$.analysis.dof", analysis.dof), ("$.analysis.stop", analysis.stop)):
        if ref is not None and ref.node not in coords:
            raise SchemaError(f"{p}.node", f"unknown node {ref.node!r}")
    for i, t in enumerate(output.track):
        if t.node not in coords:
            raise SchemaError(f"$.output.track[{i}].node", f"unknown node {t.node!r}")
    m = output.metric
    if m is not None:
        if m.kind == "dof" and m.node not in coords:
            raise SchemaError("$.output.metric.node", f"unknown node {m.node!r}")
        if m.kind == "normal_force" and m.element not in eids:
            raise SchemaError("$.output.metric.element", f"unknown element {m.element!r}")
        if m.kind == "ratio" and analysis.control != "initial_stiffness":
            raise SchemaError("$.output.metric.kind", "ratio needs initial_stiffness control")

    return FrameSpec(title, sections, tuple(nodes), tuple(elements), tuple(supports), tuple(loads), analysis, output)


def _parse_cantilever(d: dict) -> CantileverSpec:
    _check_keys(
        d, "$",
        ("format", "title", "shape", "section", "nis", "spacing", "moments", "unit", "length", "compare_laws", "scale", "probe"),
    )
    title = d.get("title", "")
    if not isinstance(title, str):
        raise SchemaError("$.title", "expected a string")
    shape = _parse_shape(_req(d, "shape", "$"), "$.shape", None)
    section = _parse_section(_req(d, "section", "$"), "$.section")
    moments = tuple(_num(m, f"$.moments[{i}]") for i, m in enumerate(_list(_req(d, "moments", "$"), "$.moments")))
    if not moments:
        raise SchemaError("$.moments", "must not be empty")
    unit = _str(d.get("unit", "absolute"), "$.unit", ("absolute", "straightening", "EI_over_length"))
    length = None
    if unit == "EI_over_length":
        length = _num(_req(d, "length", "$"), "$.length", positive=True)
    elif "length" in d:
        raise SchemaError("$.length", "only used with unit EI_over_length")
    scale = _num(d["scale"], "$.scale", positive=True) if "scale" in d else None
    probe = None
    if "probe" in d:
        probe = _num(d["probe"], "$.probe")
        if not 0.0 <= probe <= 1.0:
            raise SchemaError("$.probe", "must lie in [0, 1] (fraction of the length)")
    return CantileverSpec(
        title=title,
        shape=shape,
        section=section,
        nis=_int(_req(d, "nis", "$"), "$.nis"),
        moments=moments,
        unit=unit,
        length=length,
        compare_laws=_bool(d.get("compare_laws", False), "$.compare_laws"),
        scale=scale,
        probe=probe,
        spacing=_str(d.get("spacing", "arc"), "$.spacing", ("arc", "projection")),
    )


def parse_model(doc) -> FrameSpec | CantileverSpec:
    """Validate a decoded JSON document."""
    d = _obj(doc, "$")
    fmt = d.get("format", "frame")
    if fmt == "frame":
        return _parse_frame(d)
    if fmt == "cantilever":
        return _parse_cantilever(d)
    raise SchemaError("$.format", "must be frame or cantilever")


def load_model(path) -> FrameSpec | CantileverSpec:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return parse_model(doc)


# -- serialization ----------------------------------------------------------


def _shape_doc(s: ShapeSpec) -> dict:
    d: dict[str, Any] = {"kind": s.kind}
    for k, v in s.params:
        d[k] = [list(seg) for seg in v] if k == "segments" else v
    return d


def _section_doc(s: SectionSpec) -> dict:
    if s.EA is not None:
        d = {"EA": s.EA, "EI": s.EI}
    else:
        d = {"E": s.E, "b": s.b, "h": s.h}
    d["law"] = s.law
    if s.inertia != "exact":
        d["inertia"] = s.inertia
    return d


def _dofref_doc(r: DofRef) -> dict:
    return {"node": r.node, "dof": r.dof}


def to_document(spec: FrameSpec | CantileverSpec) -> dict:
    """Inverse of :func:`parse_model`, with all derived values written out."""
    if isinstance(spec, CantileverSpec):
        d: dict[str, Any] = {"format": "cantilever", "title": spec.title, "shape": _shape_doc(spec.shape),
                             "section": _section_doc(spec.section), "nis": spec.nis, "spacing": spec.spacing,
                             "moments": list(spec.moments), "unit": spec.unit, "compare_laws": spec.compare_laws}
        if spec.length is not None:
            d["length"] = spec.length
        if spec.scale is not None:
            d["scale"] = spec.scale
        if spec.probe is not None:
            d["probe"] = spec.probe
        return d
    a = spec.analysis
    ad: dict[str, Any] = {"control": a.control}
    if a.dof is not None:
        ad["dof"] = _dofref_doc(a.dof)
    if a.target is not None:
        ad["target"] = a.target
    if a.steps is not None:
        ad["steps"] = a.steps
    if a.control == "arc_length":
        ad.update(ds=a.ds, psi=a.psi, max_ds_factor=a.max_ds_factor)
        if a.stop is not None:
            ad["stop"] = {**_dofref_doc(a.stop), "value": a.stop_value}
        if a.stop_load is not None:
            ad["stop_load"] = a.stop_load
    if a.total_load is not None:
        ad["total_load"] = a.total_load
    if a.control != "initial_stiffness":
        ad.update(max_load=a.max_load, critical=a.critical)
    out: dict[str, Any] = {"track": [_dofref_doc(t) for t in spec.output.track], "shapes": spec.output.shapes}
    m = spec.output.metric
    if m is not None:
        md: dict[str, Any] = {"kind": m.kind}
        if m.kind == "dof":
            md.update(node=m.node, dof=m.dof)
        elif m.kind == "normal_force":
            md.update(element=m.element, end=m.end)
        out["metric"] = md
    return {
        "format": "frame",
        "title": spec.title,
        "sections": {k: _section_doc(s) for k, s in spec.sections},
        "nodes": [{"id": n.id, "x": n.x, "z": n.z} for n in spec.nodes],
        "elements": [
            {"id": e.id, "a": e.a, "b": e.b, "section": e.section, "nis": e.nis, "spacing": e.spacing,
             "shape": _shape_doc(e.shape)}
            for e in spec.elements
        ],
        "supports": [{"node": s.node, "fix": list(s.fix)} for s in spec.supports],
        "loads": [{"node": ld.node, "dof": ld.dof, "value": ld.value} for ld in spec.loads],
        "analysis": ad,
        "output": out,
    }


def dump_model(spec, path=None) -> str:
    text = json.dumps(to_document(spec), indent=2) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


# -- building ---------------------------------------------------------------


def build_section(s: SectionSpec) -> SectionModel:
    if s.EA is not None:
        return SectionModel.stiffness(s.EA, s.EI, law=s.law, inertia=s.inertia)
    return SectionModel.rectangle(s.E, s.b, s.h, law=s.law, inertia=s.inertia)


def build_shape(s: ShapeSpec) -> geo.InitialShape:
    p = dict(s.params)
    if s.kind == "straight":
        return geo.shape_straight(p["L"])
    if s.kind == "circle":
        return geo.shape_circle(p["kappa0"], p["L"])
    if s.kind == "parabola":
        return geo.shape_parabola(p["a"], p["L"], p.get("x0", 0.0))
    if s.kind == "logspiral":
        return geo.shape_logspiral(p["a"], p["b"], p["theta_max"])
    return geo.shape_zigzag(p["segments"])


def build_structure(spec: FrameSpec) -> StructureModel:
    """Assemble the solver model; geometry problems surface as :class:`SchemaError`."""
    m = StructureModel()
    for n in spec.nodes:
        m.add_node(n.id, n.x, n.z)
    sections = {k: build_section(s) for k, s in spec.sections}
    for i, e in enumerate(spec.elements):
        p = f"$.elements[{i}]"
        try:
            el = BeamElement(build_shape(e.shape), sections[e.section], e.nis, e.spacing)
            m.add_element(e.id, el, e.a, e.b)
        except ValueError as exc:
            raise SchemaError(p, str(exc)) from exc
    for s in spec.supports:
        m.fix(s.node, s.fix)
    for ld in spec.loads:
        m.add_load(ld.node, ld.dof, ld.value)
    return m


def build_control(spec: FrameSpec, model: StructureModel):
    a = spec.analysis
    if a.control == "load":
        return LoadControl(steps_to(a.target, a.steps))
    if a.control == "displacement":
        return DisplacementControl(model.dof(a.dof.node, a.dof.dof), steps_to(a.target, a.steps))
    if a.control == "indirect":
        return IndirectControl(model.dof(a.dof.node, a.dof.dof), steps_to(a.target, a.steps))
    if a.control == "arc_length":
        stop = model.dof(a.stop.node, a.stop.dof) if a.stop is not None else None
        return ArcLength(ds=a.ds, n_steps=a.steps, psi=a.psi, stop_dof=stop, stop_value=a.stop_value,
                         stop_load=a.stop_load, max_ds_factor=a.max_ds_factor)
    return None


def moment_unit(spec: CantileverSpec) -> float:
    """Value of one moment unit of a cantilever scenario."""
    if spec.unit == "absolute":
        return 1.0
    section = build_section(spec.section)
    if spec.unit == "EI_over_length":
        return section.EI / spec.length
    k0 = float(build_shape(spec.shape).kappa0(0.0))
    if k0 == 0.0:
        raise SchemaError("$.unit", "straightening moments need a curved start")
    return straightening_moment(section, k0)
