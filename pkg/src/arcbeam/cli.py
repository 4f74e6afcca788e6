"""Command-line front end: ``arcbeam solve | convergence | cantilever``.

Models are JSON files (see :mod:`arcbeam.model_io`); a bare name such as
``arch_sym`` refers to a scenario shipped with the package.  Results are
written as CSV with a header row, LF line endings and 9 significant digits.

Exit codes: 0 success, 2 invalid input, 3 solver failure (partial results
are still written).
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

import numpy as np

from . import model_io as mio
from .element import BeamElement, ElementError
from .frame import deformed_global, end_normal_forces, global_forces_from_local, local_target_from_global
from .solver import PathFailure, PathResult, SolverError, initial_stiffness_ratio, solve_path

EXIT_OK, EXIT_SCHEMA, EXIT_SOLVER = 0, 2, 3
RATIO_BAND = (3.5, 4.5)


# -- csv helpers ------------------------------------------------------------


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "" if math.isnan(v) else f"{float(v):.9g}"
    return str(v)


def write_csv(path: Path, header, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(v) for v in r])


# -- model lookup -----------------------------------------------------------


def scenario_names() -> list[str]:
    root = resources.files("arcbeam") / "scenarios"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def resolve_model(ref: str) -> Path:
    """A file path, or the name of a bundled scenario."""
    p = Path(ref)
    if p.is_file():
        return p
    name = ref[:-5] if ref.endswith(".json") else ref
    cand = resources.files("arcbeam") / "scenarios" / f"{name}.json"
    if cand.is_file():
        return Path(str(cand))
    raise mio.SchemaError("$", f"no model file or bundled scenario named {ref!r} (bundled: {', '.join(scenario_names())})")


def load_spec(ref: str, nis: int | None = None, law: str | None = None):
    spec = mio.load_model(resolve_model(ref))
    if nis is not None:
        spec = spec.with_nis(nis)
    if law is not None:
        spec = spec.with_law(law)
    return spec


# -- frame analyses ---------------------------------------------------------


@dataclass
class FrameRun:
    spec: mio.FrameSpec
    model: object
    result: PathResult | None = None
    ratio: float | None = None
    error: str | None = None


def run_frame(spec: mio.FrameSpec) -> FrameRun:
    """Run the model's analysis; failures are recorded, not raised."""
    model = mio.build_structure(spec)
    run = FrameRun(spec, model)
    a = spec.analysis
    try:
        if a.control == "initial_stiffness":
            run.ratio = initial_stiffness_ratio(model, model.dof(a.dof.node, a.dof.dof), a.total_load)
        else:
            run.result = solve_path(model, mio.build_control(spec, model),
                                    detect_critical=a.critical, refine_max_load=a.max_load)
    except PathFailure as exc:
        run.result = PathResult(list(exc.steps or []))
        run.error = str(exc)
    except (SolverError, ElementError) as exc:
        run.error = str(exc)
    return run


def _first_peak(loads) -> float:
    for k in range(1, len(loads) - 1):
        if loads[k] >= loads[k - 1] and loads[k] > loads[k + 1]:
            return float(loads[k])
    return float(max(loads)) if len(loads) else math.nan


def frame_metric(run: FrameRun, metric: mio.MetricSpec | None = None) -> float:
    metric = metric or run.spec.output.metric
    if metric is None:
        raise mio.SchemaError("$.output.metric", "no metric defined for this model")
    if metric.kind == "ratio":
        return math.nan if run.ratio is None else run.ratio
    steps = run.result.steps if run.result else []
    if not steps:
        return math.nan
    if metric.kind == "dof":
        return float(steps[-1].u[run.model.dof(metric.node, metric.dof)])
    if metric.kind == "max_load":
        if run.result.max_load is not None:
            return run.result.max_load.load
        return _first_peak([s.load for s in steps])
    if metric.kind == "critical_load":
        c = run.result.critical
        return math.nan if c is None else c.load
    names = [e.name for e in run.model.entries]
    entry = run.model.entries[names.index(metric.element)]
    Na, Nb = end_normal_forces(entry.element, steps[-1].f_local[names.index(metric.element)])
    return Nb if metric.end == "b" else Na


def _element_rows(model, k, step):
    for e, f in zip(model.entries, step.f_local):
        ua = step.u[3 * e.a : 3 * e.a + 3]
        ub = step.u[3 * e.b : 3 * e.b + 3]
        target = local_target_from_global(e.placement, ua, ub)
        f = np.asarray(f, dtype=float)
        trace = e.element.trace(f)
        uloc = np.array([trace.du[-1], trace.dw[-1], trace.dphi[-1]])
        M_ba = e.element.end_moment_right(f, uloc)
        fG = global_forces_from_local(e.placement, ua[2], f)
        p = e.placement
        dx = p.xb - p.xa + ub[0] - ua[0]
        dz = p.zb - p.za + ub[1] - ua[1]
        MG_ba = -fG[2] + fG[0] * dz - fG[1] * dx
        Na, Nb = end_normal_forces(e.element, f)
        gap = float(np.linalg.norm(uloc - target))
        yield [k, e.name, f[0], f[1], f[2], M_ba, fG[0], fG[1], fG[2], -fG[0], -fG[1], MG_ba, Na, Nb, gap]


def write_frame_outputs(run: FrameRun, out: Path) -> None:
    spec, model = run.spec, run.model
    out.mkdir(parents=True, exist_ok=True)
    track = spec.output.track
    steps = run.result.steps if run.result else []
    write_csv(
        out / "curve.csv",
        ["step", "control", "lambda", "load", "iterations", "residual", "det_sign"] + [t.label for t in track],
        [[k, s.control, s.lam, s.load, s.iterations, s.residual, s.det_sign]
         + [s.u[model.dof(t.node, t.dof)] for t in track] for k, s in enumerate(steps)],
    )
    write_csv(
        out / "elements.csv",
        ["step", "element", "X_ab", "Z_ab", "M_ab", "M_ba", "XG_ab", "ZG_ab", "MG_ab", "XG_ba", "ZG_ba", "MG_ba",
         "N_a", "N_b", "closure"],
        [row for k, s in enumerate(steps) for row in _element_rows(model, k, s)],
    )
    mode = spec.output.shapes
    indexed = list(enumerate(steps))
    chosen = indexed if mode == "all" else indexed[-1:] if mode == "last" else []
    for k, s in chosen:
        rows = []
        for e, f in zip(model.entries, s.f_local):
            pts = deformed_global(e.element, e.placement, s.u[3 * e.a : 3 * e.a + 3], f)
            rows += [[e.name, i, x, z] for i, (x, z) in enumerate(pts)]
        write_csv(out / "shapes" / f"step_{k}.csv", ["element", "node", "x", "z"], rows)

    summary = [("title", spec.title), ("control", spec.analysis.control), ("steps", len(steps))]
    if run.ratio is not None:
        summary.append(("ratio", run.ratio))
    if steps:
        summary += [("final_lambda", steps[-1].lam), ("final_load", steps[-1].load)]
    if run.result is not None:
        if run.result.max_load is not None:
            summary += [("max_load", run.result.max_load.load), ("max_load_control", run.result.max_load.control)]
        if run.result.critical is not None:
            summary += [("critical_load", run.result.critical.load), ("critical_control", run.result.critical.control)]
    if spec.output.metric is not None:
        summary.append((f"metric_{spec.output.metric.kind}", frame_metric(run)))
    summary.append(("status", "failed: " + run.error if run.error else "ok"))
    write_csv(out / "summary.csv", ["key", "value"], summary)


# -- cantilever -------------------------------------------------------------


@dataclass
class CantileverRun:
    spec: mio.CantileverSpec
    unit: float
    scale: float
    rows: list
    shapes: dict  # (law, k) -> points
    error: str | None = None


def fit_circle(points) -> tuple[float, float, float]:
    """Least-squares circle ``(xc, zc, radius)`` through 2D points."""
    p = np.asarray(points, dtype=float)
    x, z = p[:, 0], p[:, 1]
    A = np.column_stack([2 * x, 2 * z, np.ones_like(x)])
    (xc, zc, c), *_ = np.linalg.lstsq(A, x * x + z * z, rcond=None)
    return float(xc), float(zc), float(math.sqrt(c + xc * xc + zc * zc))


def run_cantilever(spec: mio.CantileverSpec) -> CantileverRun:
    """Drive one element through the moment history by direct marching.

    The clamp sits at the element's left end; an applied end moment ``M``
    corresponds to left-end forces ``(0, 0, -M)``.
    """
    shape = mio.build_shape(spec.shape)
    base = mio.build_section(spec.section)
    laws = [base.law.value]
    if spec.compare_laws:
        laws = ["consistent", "simplified"]
    elements = {law: BeamElement(shape, base.with_law(law), spec.nis, spec.spacing) for law in laws}
    unit = mio.moment_unit(spec)
    k0 = abs(float(shape.kappa0(0.0)))
    scale = spec.scale or (1.0 / k0 if k0 > 0 else shape.L)
    probe = None if spec.probe is None else int(round(spec.probe * spec.nis))
    run = CantileverRun(spec, unit, scale, [], {})
    for k, m in enumerate(spec.moments):
        row = [k, m * unit, m]
        ends = {}
        try:
            for law, el in elements.items():
                tr = el.trace(np.array([0.0, 0.0, -m * unit]))
                run.shapes[(law, k)] = el.deformed_shape(tr)
                ends[law] = run.shapes[(law, k)][-1]
                row += [tr.du[-1], tr.dw[-1], tr.dphi[-1]]
                if probe is not None:
                    row += [tr.du[probe], tr.dw[probe]]
        except ElementError as exc:
            run.error = f"moment {m:g}: {exc}"
            break
        if spec.compare_laws:
            row.append(float(np.linalg.norm(ends["consistent"] - ends["simplified"])) / scale)
        run.rows.append(row)
    return run


def cantilever_header(spec: mio.CantileverSpec) -> list[str]:
    laws = ["consistent", "simplified"] if spec.compare_laws else [spec.section.law]
    cols = ["state", "moment", "moment_units"]
    for law in laws:
        sfx = f"_{law}" if spec.compare_laws else ""
        cols += [f"u_end{sfx}", f"w_end{sfx}", f"phi_end{sfx}"]
        if spec.probe is not None:
            cols += [f"u_probe{sfx}", f"w_probe{sfx}"]
    if spec.compare_laws:
        cols.append("end_distance_over_scale")
    return cols


def write_cantilever_outputs(run: CantileverRun, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "cantilever.csv", cantilever_header(run.spec), run.rows)
    by_state: dict[int, list] = {}
    for (law, k), pts in run.shapes.items():
        by_state.setdefault(k, []).extend([law, i, x, z] for i, (x, z) in enumerate(pts))
    for k, rows in sorted(by_state.items()):
        write_csv(out / "shapes" / f"state_{k}.csv", ["law", "node", "x", "z"], rows)
    summary = [("title", run.spec.title), ("moment_unit", run.unit), ("scale", run.scale), ("states", len(run.rows))]
    if run.rows:
        law = "consistent" if run.spec.compare_laws else run.spec.section.law
        summary.append(("final_fit_radius_over_scale", fit_circle(run.shapes[(law, len(run.rows) - 1)])[2] / run.scale))
    summary.append(("status", "failed: " + run.error if run.error else "ok"))
    write_csv(out / "summary.csv", ["key", "value"], summary)


# -- convergence ------------------------------------------------------------


def richardson(n_coarse: int, v_coarse: float, n_fine: int, v_fine: float, order: float = 2.0) -> float:
    r = (n_fine / n_coarse) ** order
    return v_fine + (v_fine - v_coarse) / (r - 1.0)


def _metric_for(spec, name: str) -> mio.MetricSpec | None:
    if name == "model":
        return spec.output.metric
    if name == "maxload":
        return mio.MetricSpec("max_load")
    if name == "critical":
        return mio.MetricSpec("critical_load")
    if name == "ratio":
        return mio.MetricSpec("ratio")
    if name == "normal":
        m = spec.output.metric
        if m is None or m.kind != "normal_force":
            raise mio.SchemaError("$.output.metric", "normal metric needs a normal_force metric in the model")
        return m
    m = spec.output.metric
    if m is not None and m.kind == "dof":
        return m
    ref = spec.analysis.dof or (spec.output.track[0] if spec.output.track else None)
    if ref is None:
        raise mio.SchemaError("$.output", "dof metric needs a dof metric, an analysis dof or a tracked dof")
    return mio.MetricSpec("dof", node=ref.node, dof=ref.dof)


def metric_value(spec, metric_name: str = "model") -> float:
    """Scalar result used by the convergence study; NaN on solver failure."""
    if isinstance(spec, mio.CantileverSpec):
        run = run_cantilever(spec)
        if run.error or not run.rows:
            return math.nan
        col = "w_probe" if spec.probe is not None else "w_end"
        if spec.compare_laws:
            col += "_consistent"
        i = cantilever_header(spec).index(col)
        return run.rows[-1][i] / run.scale
    metric = _metric_for(spec, metric_name)
    if metric.kind == "max_load" and spec.analysis.control != "arc_length":
        spec = replace(spec, analysis=replace(spec.analysis, max_load=True))
    if metric.kind == "critical_load":
        spec = replace(spec, analysis=replace(spec.analysis, critical=True))
    run = run_frame(spec)
    return frame_metric(run, metric)


def convergence_table(spec, nis_list, metric_name: str = "model", reference: float | None = None):
    """Rows ``(nis, value, reference, error, rel_error_pct, ratio, ratio_near_4)``."""
    nis_list = sorted(int(n) for n in nis_list)
    values = [metric_value(spec.with_nis(n), metric_name) for n in nis_list]
    if reference is None:
        if len(nis_list) >= 2:
            reference = richardson(nis_list[-2], values[-2], nis_list[-1], values[-1])
        else:
            reference = values[-1]
    rows = []
    prev = None
    for n, v in zip(nis_list, values):
        err = v - reference
        ratio = prev / err if prev is not None and err != 0 else None
        near = None if ratio is None else RATIO_BAND[0] <= ratio <= RATIO_BAND[1]
        rows.append([n, v, reference, err, 100.0 * err / reference if reference else math.nan, ratio, near])
        prev = err
    return rows


# -- entry point ------------------------------------------------------------


def _parse_nis_list(text: str) -> list[int]:
    try:
        vals = [int(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError("expected a comma-separated list of integers") from None
    if not vals or min(vals) < 1:
        raise argparse.ArgumentTypeError("NIS values must be positive integers")
    return vals


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="arcbeam", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="run the analysis defined in a model file")
    s.add_argument("model")
    s.add_argument("--nis", type=int, help="override NIS of every element")
    s.add_argument("--law", choices=("consistent", "simplified"))
    s.add_argument("--out", type=Path)

    c = sub.add_parser("convergence", help="rerun a model over several NIS values")
    c.add_argument("model")
    c.add_argument("--nis", type=_parse_nis_list, required=True)
    c.add_argument("--metric", default="model", choices=("model", "dof", "maxload", "critical", "ratio", "normal"))
    c.add_argument("--law", choices=("consistent", "simplified"))
    c.add_argument("--reference", type=float, help="exact value (default: extrapolation from the two finest grids)")
    c.add_argument("--out", type=Path)

    k = sub.add_parser("cantilever", help="drive one element by a history of end moments")
    k.add_argument("scenario")
    k.add_argument("--nis", type=int)
    k.add_argument("--out", type=Path)

    sub.add_parser("list", help="list bundled scenarios")
    return p


def _out_dir(args, ref: str) -> Path:
    return args.out if args.out is not None else Path("out") / Path(ref).stem


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "list":
            for n in scenario_names():
                print(n)
            return EXIT_OK
        if args.command == "solve":
            if args.nis is not None and args.nis < 1:
                raise mio.SchemaError("--nis", "must be positive")
            spec = load_spec(args.model, args.nis, args.law)
            out = _out_dir(args, args.model)
            if isinstance(spec, mio.CantileverSpec):
                crun = run_cantilever(spec)
                write_cantilever_outputs(crun, out)
                err = crun.error
            else:
                run = run_frame(spec)
                write_frame_outputs(run, out)
                err = run.error
                if not err and spec.output.metric is not None:
                    print(f"{spec.output.metric.kind} = {fmt(frame_metric(run))}")
        elif args.command == "cantilever":
            spec = load_spec(args.scenario, args.nis)
            if not isinstance(spec, mio.CantileverSpec):
                raise mio.SchemaError("$.format", "the cantilever command needs a cantilever file")
            crun = run_cantilever(spec)
            out = _out_dir(args, args.scenario)
            write_cantilever_outputs(crun, out)
            err = crun.error
            if crun.rows and spec.compare_laws:
                for r in crun.rows:
                    print(f"{fmt(r[2])}: {fmt(r[-1])}")
        else:
            spec = load_spec(args.model, None, args.law)
            rows = convergence_table(spec, args.nis, args.metric, args.reference)
            out = _out_dir(args, args.model)
            write_csv(out / "table.csv", ["nis", "value", "reference", "error", "rel_error_pct", "ratio", "ratio_near_4"], rows)
            for r in rows:
                print(",".join(fmt(v) for v in r))
            bad = [r[0] for r in rows if math.isnan(r[1])]
            err = f"solver failed for NIS {bad}" if bad else None
    except mio.SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    if err:
        print(f"solver failure: {err}", file=sys.stderr)
        return EXIT_SOLVER
    print(f"results written to {out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
