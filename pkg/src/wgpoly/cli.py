"""Command line driver: `wgpoly study ...`."""

import argparse
import sys

from .assembly import assemble, export_matrix_market
from .harness import (ConfigError, SOLUTIONS, StudyConfig, config_from_json,
                      emit_table, parse_levels, run_study, _study_mesh)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="wgpoly",
        description="Stabilizer-free weak Galerkin Poisson solver")
    sub = parser.add_subparsers(dest="command", required=True)
    st = sub.add_parser("study", help="run a convergence study")
    st.add_argument("--config", help="JSON file with StudyConfig fields")
    st.add_argument("--family", choices=["triangle", "polygon"])
    st.add_argument("--mesh", help="mesh file to use instead of a family")
    st.add_argument("--k", type=int)
    st.add_argument("--j", help="weak-gradient degree or 'auto'")
    st.add_argument("--levels", help="inclusive range a..b")
    st.add_argument("--tol", type=float)
    st.add_argument("--format", choices=["csv", "markdown"])
    st.add_argument("--exact", choices=sorted(SOLUTIONS))
    st.add_argument("--out", help="write the table here instead of stdout")
    st.add_argument("--expect-singular", action="store_true", default=None)
    st.add_argument("--export-matrix",
                    help="write the finest-level matrix (MatrixMarket)")
    return parser


def _build_config(args):
    if args.config:
        with open(args.config) as fh:
            config = config_from_json(fh.read())
    else:
        config = StudyConfig()
    overrides = {}
    if args.mesh:
        if args.family:
            raise ConfigError("give either --family or --mesh, not both")
        overrides["family"] = args.mesh
    elif args.family:
        overrides["family"] = args.family
    if args.k is not None:
        overrides["k"] = args.k
    if args.j is not None:
        overrides["j"] = args.j if args.j == "auto" else int(args.j)
    if args.levels is not None:
        overrides["levels"] = parse_levels(args.levels)
    if args.tol is not None:
        overrides["tol"] = args.tol
    if args.format is not None:
        overrides["format"] = args.format
    if args.exact is not None:
        overrides["exact"] = args.exact
    if args.expect_singular is not None:
        overrides["expect_singular"] = True
    if overrides:
        config = StudyConfig(**{**config.__dict__, **overrides})
    config.validate()
    return config


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        config = _build_config(args)
        records = run_study(config)
        if args.export_matrix:
            m = _study_mesh(config, config.levels[1], {})
            system = assemble(m, config.k, config.j,
                              SOLUTIONS[config.exact].f)
            with open(args.export_matrix, "w") as fh:
                fh.write(export_matrix_market(system.A))
    except (ConfigError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1

    table = emit_table(records, config.format)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(table)
    else:
        sys.stdout.write(table)

    statuses = {r.status for r in records}
    if config.expect_singular:
        return 0 if statuses == {"singular"} else 2
    return 0 if statuses == {"ok"} else 2


if __name__ == "__main__":
    sys.exit(main())
