"""``fdepth`` command line: depths, central regions, outliers and PCA tables.

Exit codes: 0 success, 1 data error, 2 usage error.
"""

from __future__ import annotations

import argparse
import io
import logging
import sys

import numpy as np

from . import __version__
from .estimators import METHODS, FunctionalDepth, resolve_config
from .functional import fit_pca
from .io import DataError, load_dataset, write_json, write_table
from .multivariate import KINDS, DepthError
from .regions import EllipseSection, IntervalSection, OutlierReport, member_envelope, region_envelope

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_DATA, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _alpha_list(text):
    try:
        values = [float(a) for a in text.split(",") if a.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid alpha list {text!r}") from None
    if not values or any(not 0.0 < a <= 1.0 for a in values):
        raise argparse.ArgumentTypeError("alpha values must satisfy 0 < alpha <= 1")
    return values


def _subset(text):
    if text.strip() == "all":
        return None
    try:
        idx = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid subset {text!r}") from None
    if not idx:
        raise argparse.ArgumentTypeError("subset must not be empty")
    return idx


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return value


def build_parser():
    parser = argparse.ArgumentParser(prog="fdepth", description="Depths for functional data.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--data", required=True, metavar="FILE", help="CSV of the (first coordinate of the) sample")
    common.add_argument("--data2", metavar="FILE", help="second coordinate file for bivariate functions")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", default="-", metavar="FILE", help="output file, '-' for stdout")
    common.add_argument("--threads", type=_positive_int, help="worker threads (default: $FDEPTH_THREADS or all cores)")
    common.add_argument("-v", "--verbose", action="store_true")

    depth_opts = argparse.ArgumentParser(add_help=False)
    depth_opts.add_argument("--method", choices=METHODS, default="graph")
    depth_opts.add_argument("--mvdepth", choices=KINDS)
    depth_opts.add_argument("--subset", type=_subset, help="grid indices 'i1,i2,...' or 'all'")
    depth_opts.add_argument("--directions", type=_positive_int, default=1000, help="sampled directions (grid, pc)")
    depth_opts.add_argument("--seed", type=int, default=0)
    depth_opts.add_argument("--components", type=_positive_int, help="number of principal components (pc)")
    depth_opts.add_argument("--loo", action="store_true", help="leave-one-out depths for sample functions")

    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("depth", parents=[common, depth_opts], help="depth of query or sample functions")
    p.add_argument("--query", metavar="FILE", help="query functions (default: the sample itself)")
    p.add_argument("--query2", metavar="FILE", help="second coordinate of bivariate queries")
    p = sub.add_parser("regions", parents=[common, depth_opts], help="central-region envelopes")
    p.add_argument("--alpha", type=_alpha_list, required=True, metavar="A[,A...]")
    p = sub.add_parser("outliers", parents=[common, depth_opts], help="functions with depth below alpha")
    p.add_argument("--alpha", type=_alpha_list, required=True, metavar="A[,A...]")
    p = sub.add_parser("pca", parents=[common], help="principal component summaries")
    p.add_argument("--components", type=_positive_int, required=True)
    return parser


def _estimator(args, sample):
    try:
        est = FunctionalDepth(
            method=args.method,
            mvdepth=args.mvdepth,
            subset=args.subset,
            direction_count=args.directions,
            seed=args.seed,
            n_components=args.components,
            loo=args.loo,
            n_jobs=args.threads,
        )
        resolve_config(args.method, args.mvdepth, sample.d, args.components)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.subset is not None and max(args.subset) >= sample.k:
        raise UsageError(f"subset index {max(args.subset)} out of range for k={sample.k}")
    return est.fit(sample)


def run_depth(args, sample):
    est = _estimator(args, sample)
    if args.query:
        queries = load_dataset(args.query, args.query2)
        if queries.k != sample.k or np.any(queries.grid != sample.grid):
            raise DataError(f"{args.query}:1: grid mismatch with {args.data}")
        if queries.d != sample.d:
            raise DataError(f"{args.query}: query has d={queries.d}, sample has d={sample.d}")
        ids = queries.ids
        depth, labels = est._depths(queries.values)
    else:
        ids = sample.ids
        depth, labels = est._sample_depths(args.loo)
    rows = list(zip(ids, depth, labels))
    record = {
        "command": "depth",
        "method": args.method,
        "mvdepth": est.mvdepth_,
        "rows": [{"id": i, "depth": v, "aspect": a} for i, v, a in rows],
    }
    return ["id", "depth", "aspect"], rows, record


def _section_rows(section):
    if section.empty:
        return [("empty", "", "", "")]
    if isinstance(section, IntervalSection):
        return [("ok", i, lo, hi) for i, (lo, hi) in enumerate(section.intervals)]
    verts = section.boundary(64) if isinstance(section, EllipseSection) else section.vertices
    return [("ok", i, x, y) for i, (x, y) in enumerate(verts)]


def run_regions(args, sample):
    est = _estimator(args, sample)
    if sample.d > 2:
        raise UsageError("regions are available for d <= 2 only")
    graph_type = args.method in ("graph", "halfgraph", "band")
    depths = None if graph_type else est.sample_depths()
    rows, blocks = [], []
    for alpha in args.alpha:
        if graph_type:
            env = region_envelope(sample, args.subset, est.mvdepth_, alpha)
        else:
            env = member_envelope(sample, depths, alpha)
        sections = []
        for s in env.sections:
            srows = _section_rows(s)
            rows.extend((alpha, s.t) + r for r in srows)
            key = "intervals" if sample.d == 1 else "vertices"
            sections.append({"t": s.t, "empty": s.empty, key: [list(r[2:]) for r in srows if r[0] == "ok"]})
        blocks.append({"alpha": alpha, "empty": env.empty, "first_empty_t": env.first_empty_t, "sections": sections})
    cols = ["lo", "hi"] if sample.d == 1 else ["x", "y"]
    header = ["alpha", "t", "status", "part" if sample.d == 1 else "vertex"] + cols
    record = {"command": "regions", "method": args.method, "mvdepth": est.mvdepth_, "blocks": blocks}
    return header, rows, record


def run_outliers(args, sample):
    est = _estimator(args, sample)
    depths = est.sample_depths()
    rows, blocks = [], []
    for alpha in args.alpha:
        report = OutlierReport.from_depths(sample.ids, depths, alpha)
        rows.extend((alpha, i, v) for i, v in report.entries)
        blocks.append(
            {"alpha": alpha, "count": len(report), "outliers": [{"id": i, "depth": v} for i, v in report.entries]}
        )
    record = {"command": "outliers", "method": args.method, "mvdepth": est.mvdepth_, "blocks": blocks}
    return ["alpha", "id", "depth"], rows, record


def run_pca(args, sample):
    try:
        model = fit_pca(sample, args.components)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rows = []
    for j, (ev, ratio) in enumerate(zip(model.eigenvalues, model.explained_variance_ratio), start=1):
        rows.append(("variance", f"pc{j}", "eigenvalue", ev))
        rows.append(("variance", f"pc{j}", "ratio", ratio))
    for c in range(sample.d):
        rows.extend(("mean", f"x{c + 1}", t, v) for t, v in zip(sample.grid, model.mean_curve[:, c]))
    for j in range(model.n_components):
        for c in range(sample.d):
            rows.extend(
                ("component", f"pc{j + 1}.x{c + 1}", t, v) for t, v in zip(sample.grid, model.components[j, :, c])
            )
    for i, s in zip(sample.ids, model.scores):
        rows.extend(("score", i, f"pc{j + 1}", v) for j, v in enumerate(s))
    record = {
        "command": "pca",
        "grid": model.grid,
        "eigenvalues": model.eigenvalues,
        "explained_variance_ratio": model.explained_variance_ratio,
        "mean": model.mean_curve.T,
        "components": np.transpose(model.components, (0, 2, 1)),
        "scores": [{"id": i, "scores": s} for i, s in zip(sample.ids, model.scores)],
    }
    return ["section", "name", "key", "value"], rows, record


COMMANDS = {"depth": run_depth, "regions": run_regions, "outliers": run_outliers, "pca": run_pca}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        if args.command != "pca":
            try:
                resolve_config(args.method, args.mvdepth, None, args.components)
            except ValueError as exc:
                raise UsageError(str(exc)) from None
        sample = load_dataset(args.data, args.data2)
        header, rows, record = COMMANDS[args.command](args, sample)
    except UsageError as exc:
        print(f"fdepth: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, DepthError, ValueError) as exc:
        print(f"fdepth: error: {exc}", file=sys.stderr)
        return EXIT_DATA

    buf = io.StringIO()
    if args.format == "csv":
        write_table(buf, header, rows)
    else:
        write_json(buf, record)
    text = buf.getvalue()
    if args.out == "-":
        try:
            sys.stdout.write(text)
            sys.stdout.flush()
        except BrokenPipeError:
            sys.stderr.close()
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
