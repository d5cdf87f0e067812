"""Command-line front end: reproducible runs from schedule files to figures.

Commands compose through files: ``roots`` and ``levels`` write what
``verify`` and ``plot`` read, with no hidden state.  Every command writes a
manifest with the effective parameters and content hashes of its inputs.

Exit codes: 0 success, 2 invalid input, 3 numerical non-convergence,
4 missing files.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np

from . import serialize
from .errors import InvalidInputError, NonConvergenceError
from .experiments import (
    cauchy_convergence,
    k_set_score,
    halfplane_restriction,
    label_side,
    zero_curve_distance,
)
from .hyppoly import build_polynomial
from .potential import classify_regions, make_harmonic_system, trace_conjectured_loop, trace_level_curve
from .rootfinding import find_roots
from .svgfig import compose_figure

DEFAULTS = {
    "precision": 512,
    "n_list": [10, 25, 50, 100],
    "box": [-1.0, 2.0, -1.5, 1.5],
    "resolution": 400,
    "step": 0.004,
    "eps_cells": 3.0,
    "null_samples": 20000,
    "width": 720,
}


class RunContext:
    """Holds the loaded config; explicit flags take precedence over it."""

    def __init__(self, config_path=None):
        self.config = {}
        if config_path:
            self.config = json.loads(Path(config_path).read_text())

    def get(self, key, flag_value, default=None):
        if flag_value is not None:
            return flag_value
        if key in self.config:
            return self.config[key]
        if default is not None:
            return default
        return DEFAULTS.get(key)


def _parse_box(text):
    if text is None:
        return None
    if isinstance(text, (list, tuple)):
        return tuple(float(v) for v in text)
    parts = [float(v) for v in text.split(":")]
    if len(parts) != 4:
        raise InvalidInputError("box must be xmin:xmax:ymin:ymax")
    return tuple(parts)


def _parse_nlist(text):
    if text is None:
        return None
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    return [int(v) for v in text.split(",")]


def _resolve_schedule(ctx, schedule_flag):
    path = ctx.get("schedule", schedule_flag, default="")
    if not path:
        raise InvalidInputError("no schedule file given (flag --schedule or config)")
    if not Path(path).exists():
        raise FileNotFoundError(f"schedule file {path} not found")
    return Path(path), serialize.read_schedule(path)


def _outdir(ctx, out_flag):
    out = Path(ctx.get("out", out_flag, default="out"))
    out.mkdir(parents=True, exist_ok=True)
    return out


@click.group()
@click.option("--config", type=click.Path(), default=None, help="JSON run-config file; flags override its values.")
@click.pass_context
def cli(ctx, config):
    """Hypergeometric polynomial zeros, limit curves, and clustering experiments."""
    if config is not None and not Path(config).exists():
        raise FileNotFoundError(f"config file {config} not found")
    ctx.obj = RunContext(config)


@cli.command("poly")
@click.option("--schedule", type=click.Path(), default=None)
@click.option("--n", type=int, default=None)
@click.option("--out", type=click.Path(), default=None)
@click.pass_obj
def cmd_poly(ctx, schedule, n, out):
    """Build the exact polynomial and export its coefficients."""
    spath, sched = _resolve_schedule(ctx, schedule)
    n = ctx.get("n", n, default=100)
    outdir = _outdir(ctx, out)
    p = build_polynomial(sched, int(n))
    serialize.write_polynomial(outdir / f"poly_n{n}.txt", p)
    serialize.write_manifest(outdir, "poly", {"n": int(n), "schedule": str(spath)},
                             {"schedule": spath})
    click.echo(f"wrote {outdir / f'poly_n{n}.txt'} (degree {p.degree})")


@cli.command("roots")
@click.option("--schedule", type=click.Path(), default=None)
@click.option("--n", type=int, default=None, help="single n (overrides --n-list)")
@click.option("--n-list", default=None, help="comma-separated n ladder")
@click.option("--precision", type=int, default=None)
@click.option("--out", type=click.Path(), default=None)
@click.pass_obj
def cmd_roots(ctx, schedule, n, n_list, precision, out):
    """Compute certified roots for each n on the ladder."""
    spath, sched = _resolve_schedule(ctx, schedule)
    ns = [int(n)] if n is not None else _parse_nlist(ctx.get("n_list", _parse_nlist(n_list)))
    prec = int(ctx.get("precision", precision))
    outdir = _outdir(ctx, out)
    for nn in ns:
        p = build_polynomial(sched, nn)
        m = find_roots(p, prec)
        serialize.write_roots(outdir / f"roots_n{nn}.txt", m, sched)
        click.echo(f"n={nn}: {m.n} roots at {m.precision_bits} bits, "
                   f"max residual {float(max(m.residual_bounds)):.3e}")
    serialize.write_manifest(outdir, "roots",
                             {"n_list": ns, "precision": prec, "schedule": str(spath)},
                             {"schedule": spath})


@cli.command("curve")
@click.option("--schedule", type=click.Path(), default=None)
@click.option("--precision", type=int, default=None)
@click.option("--out", type=click.Path(), default=None)
@click.pass_obj
def cmd_curve(ctx, schedule, precision, out):
    """Export the limit curve A(z, w) and its branch points."""
    from .algcurve import branch_points, build_curve

    spath, sched = _resolve_schedule(ctx, schedule)
    prec = int(ctx.get("precision", precision, default=128))
    outdir = _outdir(ctx, out)
    curve = build_curve(sched)
    serialize.write_curve(outdir / "curve.txt", curve)
    bps = branch_points(curve, sched, min(prec, 256))
    serialize.write_branch_points(outdir / "branch_points.txt", bps, min(prec, 256))
    serialize.write_manifest(outdir, "curve", {"precision": prec, "schedule": str(spath)},
                             {"schedule": spath})
    click.echo(f"wrote curve.txt and branch_points.txt ({len(bps.points)} branch points)")


@cli.command("levels")
@click.option("--schedule", type=click.Path(), default=None)
@click.option("--pair", default=None, help="branch pair i,j (default: loops 1,i for all i)")
@click.option("--seed", default=None, help="seed point re,im (with --pair)")
@click.option("--step", type=float, default=None)
@click.option("--out", type=click.Path(), default=None)
@click.pass_obj
def cmd_levels(ctx, schedule, pair, seed, step, out):
    """Trace level curves (default: the conjectured loops through the branch points)."""
    spath, sched = _resolve_schedule(ctx, schedule)
    step = float(ctx.get("step", step))
    outdir = _outdir(ctx, out)
    sys_ = make_harmonic_system(sched)
    written = []
    if pair is not None:
        i, j = (int(v) for v in pair.split(","))
        if seed is None:
            raise InvalidInputError("--pair needs an explicit --seed re,im")
        re_s, im_s = seed.split(",")
        curve = trace_level_curve(sys_, (i, j), complex(float(re_s), float(im_s)), step=step)
        name = f"level_{i}_{j}.csv"
        serialize.write_level_curve(outdir / name, curve)
        written.append(name)
    else:
        for i in range(2, sched.A + 1):
            curve = trace_conjectured_loop(sys_, i, step=step)
            name = f"level_1_{i}.csv"
            serialize.write_level_curve(outdir / name, curve)
            written.append(name)
    serialize.write_manifest(outdir, "levels",
                             {"step": step, "pair": pair, "seed": seed, "schedule": str(spath)},
                             {"schedule": spath})
    click.echo(f"wrote {', '.join(written)}")


@cli.command("regions")
@click.option("--schedule", type=click.Path(), default=None)
@click.option("--box", default=None, help="xmin:xmax:ymin:ymax")
@click.option("--resolution", type=int, default=None)
@click.option("--out", type=click.Path(), default=None)
@click.pass_obj
def cmd_regions(ctx, schedule, box, resolution, out):
    """Classify the grid by argmax branch and extract the singular set K."""
    spath, sched = _resolve_schedule(ctx, schedule)
    box = _parse_box(ctx.get("box", _parse_box(box)))
    res = int(ctx.get("resolution", resolution))
    outdir = _outdir(ctx, out)
    sys_ = make_harmonic_system(sched)
    grid = classify_regions(sys_, box, res)
    serialize.write_region_grid(outdir / "regions.txt", grid)
    serialize.write_k_cells(outdir / "k_cells.txt", grid)
    serialize.write_manifest(outdir, "regions",
                             {"box": list(box), "resolution": res, "schedule": str(spath)},
                             {"schedule": spath})
    click.echo(f"labels {grid.labels_present()}, {int(grid.kmask.sum())} K cells")


def _load_measures(outdir, ns):
    measures = {}
    for nn in ns:
        path = Path(outdir) / f"roots_n{nn}.txt"
        if not path.exists():
            raise FileNotFoundError(f"{path} not found; run the roots command first")
        measures[nn] = serialize.read_roots(path)
    return measures


@cli.command("verify")
@click.option("--schedule", type=click.Path(), default=None)
@click.option("--n-list", default=None)
@click.option("--data", type=click.Path(), default=None,
              help="directory with roots/levels/regions outputs (default: --out)")
@click.option("--experiments", "experiments_", default="distance,convergence,kscore")
@click.option("--test-point", "test_points", multiple=True,
              help="convergence test point re,im (side labeled by winding number)")
@click.option("--eps-cells", type=float, default=None)
@click.option("--out", type=click.Path(), default=None)
@click.pass_obj
def cmd_verify(ctx, schedule, n_list, data, experiments_, test_points, eps_cells, out):
    """Run the clustering/convergence experiment reports from emitted files."""
    spath, sched = _resolve_schedule(ctx, schedule)
    ns = sorted(_parse_nlist(ctx.get("n_list", _parse_nlist(n_list))))
    outdir = _outdir(ctx, out)
    datadir = Path(ctx.get("data", data, default=str(outdir)))
    wanted = [e.strip() for e in experiments_.split(",") if e.strip()]
    shash = serialize.schedule_hash(sched)
    provenance = {"schedule": shash, "n_list": ns, "data_dir": str(datadir)}
    measures = _load_measures(datadir, ns)
    inputs = {"schedule": spath}
    inputs.update({f"roots_n{nn}": datadir / f"roots_n{nn}.txt" for nn in ns})

    if "distance" in wanted or "convergence" in wanted:
        level_path = datadir / "level_1_2.csv"
        if not level_path.exists():
            raise FileNotFoundError(f"{level_path} not found; run the levels command first")
        loop = serialize.read_level_curve(level_path)
        inputs["level_1_2"] = level_path

    if "distance" in wanted:
        eta = float(sched.alphas[1].re)
        cutoff = eta / (eta + 1)
        rows = {}
        rows_unrestricted = {}
        for nn in ns:
            rep = zero_curve_distance(measures[nn], loop,
                                      halfplane_restriction(cutoff),
                                      f"Re z > {cutoff:.6g}")
            rows[str(nn)] = rep.summary()
            rows_unrestricted[str(nn)] = zero_curve_distance(measures[nn], loop).summary()
        maxes = [rows[str(nn)]["max"] for nn in ns]
        payload = {
            "provenance": provenance,
            "pair": [1, 2],
            "restricted": rows,
            "unrestricted": rows_unrestricted,
            "max_decreasing": all(a > b for a, b in zip(maxes, maxes[1:])),
        }
        serialize.write_report(outdir / "report_distance.json", payload)
        click.echo(f"distance: max over n {dict(zip(map(str, ns), maxes))}")

    if "convergence" in wanted:
        if not loop.closed:
            raise InvalidInputError("convergence labeling needs a closed loop")
        pts = []
        for tp in test_points:
            re_s, im_s = tp.split(",")
            z = complex(float(re_s), float(im_s))
            pts.append((z, label_side(loop, z)))
        if not pts:
            pts = [(2.0 + 0j, label_side(loop, 2.0 + 0j)),
                   (1.1 + 0j, label_side(loop, 1.1 + 0j))]
        try:
            report = cauchy_convergence(sched, ns, pts, measures=measures)
        except InvalidInputError as exc:
            # branch designation only exists for the two-slope degenerate
            # family; record the skip rather than failing the whole run
            serialize.write_report(outdir / "report_convergence.json",
                                   {"provenance": provenance, "skipped": str(exc)})
            click.echo(f"convergence skipped: {exc}")
        else:
            payload = {"provenance": provenance, **report.summary()}
            serialize.write_report(outdir / "report_convergence.json", payload)
            click.echo(f"convergence monotone: {report.monotone}")

    if "kscore" in wanted:
        regions_path = datadir / "regions.txt"
        if not regions_path.exists():
            raise FileNotFoundError(f"{regions_path} not found; run the regions command first")
        grid = serialize.read_region_grid(regions_path)
        inputs["regions"] = regions_path
        eps = float(ctx.get("eps_cells", eps_cells)) * grid.cell_diagonal
        score = k_set_score(measures[max(ns)], grid, eps,
                                  null_samples=int(ctx.get("null_samples", None)))
        payload = {"provenance": provenance, "n": max(ns), **score.summary()}
        serialize.write_report(outdir / "report_kscore.json", payload)
        click.echo(f"kscore: fraction {score.fraction_on_k:.3f} "
                   f"(null {score.null_fraction:.3f}, ratio {score.ratio_over_null:.1f})")

    serialize.write_manifest(outdir, "verify",
                             {"n_list": ns, "experiments": wanted, "schedule": str(spath)},
                             inputs)


@cli.command("plot")
@click.option("--data", type=click.Path(), default=None,
              help="directory with emitted data files (default: --out)")
@click.option("--n", type=int, default=None, help="which roots file to scatter")
@click.option("--box", default=None)
@click.option("--with-regions", is_flag=True, default=False)
@click.option("--width", type=int, default=None)
@click.option("--out", type=click.Path(), default=None)
@click.pass_obj
def cmd_plot(ctx, data, n, box, with_regions, width, out):
    """Compose the SVG figure from previously emitted files."""
    outdir = _outdir(ctx, out)
    datadir = Path(ctx.get("data", data, default=str(outdir)))
    box = _parse_box(ctx.get("box", _parse_box(box)))
    width = int(ctx.get("width", width))
    roots = np.array([])
    n = ctx.get("n", n, default=0)
    roots_files = sorted(datadir.glob("roots_n*.txt"))
    chosen = None
    if n:
        chosen = datadir / f"roots_n{n}.txt"
        if not chosen.exists():
            raise FileNotFoundError(f"{chosen} not found")
    elif roots_files:
        chosen = roots_files[-1]
    if chosen is not None:
        roots = serialize.read_roots(chosen).as_complex_array()
    curves = [serialize.read_level_curve(f) for f in sorted(datadir.glob("level_*.csv"))]
    bp_file = datadir / "branch_points.txt"
    bpts = serialize.read_point_list(bp_file) if bp_file.exists() else np.array([])
    grid = None
    if with_regions:
        regions_path = datadir / "regions.txt"
        if not regions_path.exists():
            raise FileNotFoundError(f"{regions_path} not found; run the regions command first")
        grid = serialize.read_region_grid(regions_path)
    if not len(roots) and not curves and grid is None:
        raise FileNotFoundError(f"no data files found in {datadir}")
    figure_path = outdir / "figure.svg"
    compose_figure(figure_path, box, roots=roots, curves=curves, branch_pts=bpts,
                   grid=grid, width=width)
    serialize.write_manifest(outdir, "plot",
                             {"box": list(box), "n": n, "with_regions": with_regions},
                             {})
    click.echo(f"wrote {figure_path}")


def main(argv=None):
    """Entry point with the documented exit-code mapping."""
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.exceptions.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        return 2
    except click.exceptions.Abort:
        return 2
    except InvalidInputError as exc:
        click.echo(f"invalid input: {exc}", err=True)
        return 2
    except NonConvergenceError as exc:
        click.echo(f"non-convergence: {exc}", err=True)
        for entry in exc.trace:
            click.echo(f"  {entry}", err=True)
        return 3
    except FileNotFoundError as exc:
        click.echo(f"missing file: {exc}", err=True)
        return 4


if __name__ == "__main__":
    sys.exit(main())
