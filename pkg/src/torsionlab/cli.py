"""Configuration-driven experiment runner emitting machine-readable CSV.

Exit codes: 0 on success, 1 on a configuration problem, 2 on a violated
internal guarantee (a character sum off its predicted integer by more than
1e-12, a torsion count bound breach, and so on).  Given a config, output is
deterministic and independent of the parallelism degree; the only column
exempt from byte-identity is the wall-clock timing column.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import equidist as eq
from . import goodred as gr
from .config import ExperimentConfig, SubvarietySpec, parse_config
from .errors import ConfigError, InvariantViolation
from .uniformization import skeleton_classes, torsion_points
from .tropical import corner_hit_count

JOBS_ENV_VAR = "TORSIONLAB_JOBS"
WEYL_TOLERANCE = 1e-12
SCHEMA_COMMENT = "# schema=1"


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _parallel_map(fn, items, jobs: int):
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=1))


def _write_csv(path: Path, header: list[str], rows: list[list[str]],
               trailer: list[str] | None = None) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as handle:
        handle.write(SCHEMA_COMMENT + "\n")
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)
        for line in trailer or []:
            handle.write(line + "\n")


# ---------------------------------------------------------------------------
# torsion

def _torsion_row(args) -> list[str]:
    data, m = args
    count = 0
    for _ in torsion_points(data, m):
        count += 1
    expected = m ** (2 * data.r)
    if count != expected:
        raise InvariantViolation(f"enumerated {count} representatives, expected {expected}")
    classes = {sp.beta for _, sp in skeleton_classes(data, m)}
    if len(classes) != m ** data.r:
        raise InvariantViolation(
            f"found {len(classes)} valuation classes, expected {m ** data.r}")
    weighted = count * m ** (2 * data.s)
    return [str(m), str(count), str(m ** (2 * data.s)), str(weighted), str(len(classes))]


def cmd_torsion(cfg: ExperimentConfig, outdir: Path, jobs: int) -> None:
    rows = _parallel_map(_torsion_row, [(cfg.data, m) for m in cfg.m_list], jobs)
    _write_csv(outdir / "torsion.csv",
               ["m", "representatives", "multiplicity", "weighted_total",
                "valuation_classes"], rows)


# ---------------------------------------------------------------------------
# weyl

def _dual_index_box(rank: int, k_max: int):
    for z in itertools.product(range(-k_max, k_max + 1), repeat=rank):
        yield z


def _weyl_row(args) -> list[str]:
    data, m, z = args
    k = data.dual.vec(z)  # ambient dual vector with coordinates z
    value = eq.weyl_sum(data, m, k)
    predicted = 1 if all(zi % m == 0 for zi in z) else 0
    deviation = abs(value - predicted)
    if deviation > WEYL_TOLERANCE:
        raise InvariantViolation(
            f"character sum at m={m}, z={z} deviates from {predicted} by {deviation}")
    return [str(m), ";".join(str(zi) for zi in z), _fmt(value.real), _fmt(value.imag),
            str(predicted), _fmt(deviation)]


def cmd_weyl(cfg: ExperimentConfig, outdir: Path, jobs: int) -> None:
    items = [(cfg.data, m, z)
             for m in cfg.m_list
             for z in _dual_index_box(cfg.data.r, cfg.k_max)]
    rows = _parallel_map(_weyl_row, items, jobs)
    _write_csv(outdir / "weyl.csv",
               ["m", "k", "weyl_re", "weyl_im", "predicted", "abs_dev"], rows)


# ---------------------------------------------------------------------------
# corner

def _corner_row(args) -> list[str]:
    data, name, poly, m = args
    hits, total = corner_hit_count(poly, data, m)
    return [str(m), name, str(hits), str(total), _fmt(hits / total)]


def cmd_corner(cfg: ExperimentConfig, outdir: Path, jobs: int) -> None:
    items = [(cfg.data, name, poly, m)
             for name, poly in cfg.polynomials
             for m in cfg.m_list]
    rows = _parallel_map(_corner_row, items, jobs)
    _write_csv(outdir / "corner.csv", ["m", "poly_id", "hits", "total", "ratio"], rows)


# ---------------------------------------------------------------------------
# equidist

def _equidist_row(args) -> list[str]:
    data, fn_id, fn, m, reference = args
    t0 = time.perf_counter()
    empirical = eq.empirical_mean(data, m, fn)
    wall_ms = (time.perf_counter() - t0) * 1000.0
    error = abs(empirical - reference)
    return [str(m), fn_id, _fmt(float(empirical)), _fmt(float(reference)),
            _fmt(float(error)), _fmt(wall_ms)]


def cmd_equidist(cfg: ExperimentConfig, outdir: Path, jobs: int) -> None:
    items = []
    for fn_id, fn in cfg.test_functions:
        reference = eq.canonical_integral(fn, cfg.data.lattice, cfg.grid)
        for m in cfg.m_list:
            items.append((cfg.data, fn_id, fn, m, reference))
    rows = _parallel_map(_equidist_row, items, jobs)
    trailer = []
    for fn_id, _ in cfg.test_functions:
        fn_rows = [eq.ConvergenceRow(int(r[0]), r[1], float(r[2]), float(r[3]),
                                     float(r[4]), float(r[5]))
                   for r in rows if r[1] == fn_id]
        slope = eq.decay_exponent(fn_rows)
        trailer.append(f"# decay_exponent,{fn_id},"
                       + ("nan" if slope is None else _fmt(slope)))
    _write_csv(outdir / "equidist.csv",
               ["m", "fn_id", "empirical", "reference", "abs_error", "wall_ms"],
               rows, trailer)


# ---------------------------------------------------------------------------
# goodred

def _realize_subvariety(spec: SubvarietySpec, curve: gr.EllipticCurve) -> gr.SubvarietyModel:
    if spec.kind == "diagonal":
        return gr.Diagonal()
    if spec.kind == "graph":
        return gr.GraphOfMultiplication(spec.n)
    point = (curve.field.from_int(spec.point[0]), curve.field.from_int(spec.point[1]))
    if not curve.contains(point):
        raise ConfigError("bad-value",
                          f"fiber point {spec.point} is not on the configured curve")
    if spec.kind == "hfiber":
        return gr.HorizontalFiber(point)
    return gr.VerticalFiber(point)


def cmd_goodred(cfg: ExperimentConfig, outdir: Path, jobs: int) -> None:
    rows: list[list[str]] = []
    section = cfg.good_reduction
    if section is not None:
        field = gr.FiniteField.create(section.p, section.k)
        curve = gr.EllipticCurve.create(field, section.a, section.b)
        for m in section.m_list:
            for spec in section.subvarieties:
                model = _realize_subvariety(spec, curve)
                count, bound = gr.subvariety_torsion_count(curve, curve, model, m)
                label = spec.kind if spec.kind != "graph" else f"graph{spec.n}"
                rows.append([label, str(m), str(count), str(bound),
                             str(int(count <= bound))])
            fraction = gr.vanishing_fraction(curve, section.h, m)
            on_locus, _, locus_size = gr.vanishing_count(curve, section.h, m)
            rows.append(["vanishing", str(m), str(on_locus), str(locus_size),
                         _fmt(float(fraction))])
    ss = cfg.supersingular
    if ss is not None:
        base = gr.FiniteField.create(ss.p, 1)
        curve = gr.EllipticCurve.create(base, ss.a, ss.b)
        clean = gr.supersingular_p_torsion_check(curve, ss.k_max)
        for k in range(1, ss.k_max + 1):
            ext = curve.extend(k) if k > 1 else curve
            points = gr.curve_points(ext)
            order_p = sum(1 for pt in points
                          if pt is not None and gr.scalar_mult(ext, ss.p, pt) is None)
            rows.append(["supersingular", str(k), str(len(points)), str(order_p),
                         str(int(order_p == 0))])
        rows.append(["supersingular_all", str(ss.k_max), "", "", str(int(clean))])
    if not rows:
        raise ConfigError("missing-key",
                          "goodred needs a [good_reduction] or [supersingular] section")
    _write_csv(outdir / "goodred.csv", ["check", "param", "count", "bound", "ok"], rows)


# ---------------------------------------------------------------------------
# driver

_COMMANDS = {
    "torsion": cmd_torsion,
    "weyl": cmd_weyl,
    "corner": cmd_corner,
    "equidist": cmd_equidist,
    "goodred": cmd_goodred,
}


def run(subcommand: str, config_path: str, out: str | None = None,
        jobs: int | None = None) -> int:
    """Execute one subcommand against a config file; returns the exit code."""
    try:
        text = Path(config_path).read_text()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 1
    try:
        cfg = parse_config(text)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    if jobs is None:
        env = os.environ.get(JOBS_ENV_VAR, "")
        jobs = max(1, int(env)) if env.isdigit() else cfg.jobs
    outdir = Path(out if out is not None else cfg.out)
    names = list(_COMMANDS) if subcommand == "all" else [subcommand]
    try:
        for name in names:
            if name == "goodred" and subcommand == "all" \
                    and cfg.good_reduction is None and cfg.supersingular is None:
                continue
            _COMMANDS[name](cfg, outdir, jobs)
            print(f"wrote {outdir / (name + '.csv')}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 2
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="torsionlab",
        description="Exact uniformization experiments with CSV reports.")
    parser.add_argument("subcommand", choices=list(_COMMANDS) + ["all"])
    parser.add_argument("--config", required=True, help="path to the experiment config")
    parser.add_argument("--out", default=None, help="output directory (default from config)")
    parser.add_argument("--jobs", type=int, default=None,
                        help=f"worker processes (default from ${JOBS_ENV_VAR} or config)")
    args = parser.parse_args(argv)
    return run(args.subcommand, args.config, args.out, args.jobs)


if __name__ == "__main__":
    sys.exit(main())
