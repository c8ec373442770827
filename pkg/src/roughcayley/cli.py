"""Command-line front end: space -> lattice -> graph -> analyses -> exports.

Every run is reproducible from its recorded configuration: all randomness
sits behind one seed (flag ``--seed``, overridden by the environment
variable ``COARSE_SEED``), and every output file embeds the configuration
that produced it.  Exit codes: 0 success, 2 schema/argument errors,
3 window or border errors, 4 certification failures.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

from . import actions, folner, graphs, growth, nets
from .errors import (
    BorderError,
    CertificationError,
    DisconnectedGraphError,
    OutOfWindowError,
    RoughCayleyError,
    SchemaError,
    WindowTooSmallError,
)
from .serialize import point_from_json, space_from_json, space_to_json
from .spaces import (
    BallWindow,
    BoxWindow,
    H2Window,
    MODEL_BUILDERS,
)

WINDOW_ERRORS = (OutOfWindowError, BorderError, WindowTooSmallError,
                 DisconnectedGraphError)


@dataclasses.dataclass
class RunConfig:
    """Everything needed to reproduce a run; embedded in every output."""

    command: str
    options: dict
    seed: int

    def to_json(self):
        return {"command": self.command, "options": self.options,
                "seed": self.seed}


def _config(args, skip=("func", "out", "dot", "csv")):
    options = {k: v for k, v in vars(args).items()
               if k not in skip and k != "seed" and v is not None
               and not callable(v)}
    command = options.pop("_command")
    return RunConfig(command=command, options=options, seed=args.seed)


def _write_json(path, config, payload):
    doc = {"config": config.to_json()}
    doc.update(payload)
    with open(path, "w") as fh:
        json.dump(doc, fh, sort_keys=True, indent=1)
        fh.write("\n")


def _write_text(path, config, text, comment_prefix="#"):
    header = f"{comment_prefix} config: " + json.dumps(config.to_json(),
                                                       sort_keys=True)
    with open(path, "w") as fh:
        fh.write(header + "\n" + text)


def _parse_range(text, cast=float):
    try:
        lo, hi = text.split("..")
        return cast(lo), cast(hi)
    except (ValueError, AttributeError):
        raise SchemaError(f"expected a range like 'a..b', got {text!r}")


def _parse_list(text, cast=float):
    try:
        return [cast(v) for v in text.split(",")]
    except (ValueError, AttributeError):
        raise SchemaError(f"expected a comma list, got {text!r}")


def _space_from_args(args):
    name = args.space
    if name not in MODEL_BUILDERS:
        raise SchemaError(f"unknown space {name!r}; see 'space list'")
    kwargs = {}
    if name in ("zd", "euclidean"):
        kwargs["d"] = args.d
    if name == "free_group":
        kwargs["k"] = args.k
    try:
        return MODEL_BUILDERS[name](**kwargs)
    except TypeError:
        raise SchemaError(f"bad parameters for space {name!r}")


def _load_lattice(path):
    with open(path) as fh:
        return nets.QuasiLattice.from_json(json.load(fh))


def _load_graph(path):
    with open(path) as fh:
        return graphs.RoughGraph.from_json(json.load(fh))


# ---------------------------------------------------------------------------
# subcommand implementations


def cmd_space_list(args):
    for name, build in MODEL_BUILDERS.items():
        space = build()
        print(f"{name:<12} c={space.coarse_constant_c:g} "
              f"discrete={space.is_discrete} group={space.is_group} "
              f"example_id={space.model_id}")
    return 0


def cmd_lattice_build(args):
    config = _config(args)
    if args.horocyclic:
        if args.n is None or args.u is None:
            raise SchemaError("--horocyclic needs --n and --u ranges")
        n0, n1 = _parse_range(args.n, int)
        u0, u1 = _parse_range(args.u, float)
        lattice = nets.horocyclic_lattice((u0, u1), (n0, n1))
    else:
        space = _space_from_args(args)
        window = _window_from_args(args, space)
        if args.group_ball:
            lattice = nets.group_ball_lattice(space, window.radius)
        else:
            if args.delta is None:
                raise SchemaError("greedy construction needs --delta")
            lattice = nets.greedy_net(space, window, args.delta)
    summary = f"lattice: {len(lattice)} points, construction {lattice.construction}"
    if args.probes:
        probes = nets.sample_probes(lattice.space, lattice.window, args.probes,
                                    args.margin, args.seed)
        cert, profile = nets.verify_quasilattice(
            lattice, probes, _parse_list(args.R, float), seed=args.seed)
        lattice.certificates["density"] = cert
        lattice.certificates["multiplicity"] = list(profile.entries)
        summary += (f"; density<= {cert['max_min_distance']:.4f} over "
                    f"{cert['n_probes']} probes")
    print(summary)
    _write_json(args.out, config, lattice.to_json())
    print(f"wrote {args.out}")
    return 0


def _window_from_args(args, space):
    if args.radius is not None:
        return BallWindow(args.radius)
    if args.box is not None:
        lo, hi = [], []
        for part in args.box.split(","):
            a, b = _parse_range(part, float)
            lo.append(a)
            hi.append(b)
        return BoxWindow(tuple(lo), tuple(hi), args.pitch)
    if args.u is not None and args.log_a is not None:
        u0, u1 = _parse_range(args.u, float)
        l0, l1 = _parse_range(args.log_a, float)
        return H2Window(u0, u1, l0, l1, args.pitch)
    raise SchemaError("no window: give --radius, --box, or --u with --log-a")


def cmd_lattice_verify(args):
    config = _config(args)
    lattice = _load_lattice(args.lattice)
    probes = nets.sample_probes(lattice.space, lattice.window, args.probes,
                                args.margin, args.seed)
    cert, profile = nets.verify_quasilattice(
        lattice, probes, _parse_list(args.R, float), seed=args.seed)
    print(f"density certificate: max nearest distance "
          f"{cert['max_min_distance']:.6f} over {cert['n_probes']} probes")
    for r, m in profile.entries:
        print(f"multiplicity M({r:g}) = {m}")
    if args.out:
        _write_json(args.out, config,
                    {"density": cert, "multiplicity": list(profile.entries)})
        print(f"wrote {args.out}")
    return 0


def cmd_graph_build(args):
    config = _config(args)
    lattice = _load_lattice(args.lattice)
    graph = graphs.build_graph(lattice, threshold=args.threshold)
    stats = graphs.graph_stats(graph)
    print(f"graph: {stats['vertices']} vertices, {stats['edges']} edges, "
          f"threshold {graph.threshold:g}, max degree {stats['max_degree']}")
    _write_json(args.out, config, graph.to_json())
    print(f"wrote {args.out}")
    return 0


def cmd_graph_stats(args):
    graph = _load_graph(args.graph)
    for key, value in graphs.graph_stats(graph).items():
        print(f"{key}: {value}")
    return 0


def cmd_graph_export(args):
    config = _config(args)
    graph = _load_graph(args.graph)
    if not args.dot and not args.csv:
        raise SchemaError("graph export needs --dot and/or --csv")
    if args.dot:
        _write_text(args.dot, config, graphs.to_dot(graph), comment_prefix="//")
        print(f"wrote {args.dot}")
    if args.csv:
        _write_text(args.csv, config, graphs.edge_csv(graph))
        print(f"wrote {args.csv}")
    return 0


def cmd_qaction_certify(args):
    config = _config(args)
    lattice = _load_lattice(args.lattice)
    qa = actions.quasi_action(lattice.space, lattice)
    cert = actions.certify_axioms(qa, group_radius=args.group_radius,
                                  n_targets=args.targets, seed=args.seed)
    print(f"identity defect {cert.identity_defect:g}; associativity defect "
          f"{cert.associativity_defect:g}; per-s defect {cert.per_s_qi_defect:g}; "
          f"orbit diameter {cert.orbit_diameter:g}")
    for R, w in cert.properness:
        print(f"properness: displacement <= {R:g} stays in word ball {w:g}")
    if args.out:
        _write_json(args.out, config, {
            "per_s_qi_defect": cert.per_s_qi_defect,
            "identity_defect": cert.identity_defect,
            "associativity_defect": cert.associativity_defect,
            "orbit_diameter": cert.orbit_diameter,
            "properness": list(cert.properness),
            "sample": cert.sample,
        })
        print(f"wrote {args.out}")
    return 0


def cmd_qaction_orbit_qi(args):
    config = _config(args)
    lattice = _load_lattice(args.lattice)
    qa = actions.quasi_action(lattice.space, lattice)
    radii = [int(v) for v in _parse_list(args.radii, int)]
    report = actions.orbit_map_qi(qa, radii=radii, seed=args.seed)
    for m, C, r, n in report.per_radius:
        print(f"radius {m}: C={C:.4f} r={r:.4f} over {n} pairs")
    print(f"stable: {report.stable}")
    if not report.stable:
        raise CertificationError(report.message)
    if args.out:
        _write_json(args.out, config, {
            "per_radius": [list(row) for row in report.per_radius],
            "C": report.constants.C,
            "r": report.constants.r,
            "stable": report.stable,
        })
        print(f"wrote {args.out}")
    return 0


def cmd_qaction_conjugacy(args):
    config = _config(args)
    lat1 = _load_lattice(args.lattice)
    lat2 = _load_lattice(args.lattice2)
    qa1 = actions.quasi_action(lat1.space, lat1)
    qa2 = actions.quasi_action(lat2.space, lat2)
    defect = actions.quasi_conjugacy_defect(
        qa1, qa2, group_radius=args.group_radius, seed=args.seed)
    print(f"quasi-conjugacy defect {defect:g} "
          f"(group radius {args.group_radius})")
    if args.out:
        _write_json(args.out, config, {"defect": defect})
        print(f"wrote {args.out}")
    return 0


def cmd_growth_run(args):
    config = _config(args)
    if bool(args.graph) == bool(args.space):
        raise SchemaError("growth run needs exactly one of --graph/--space")
    if args.graph:
        source = _load_graph(args.graph)
        x0 = None
        if args.x0 is not None:
            x0 = source.lattice.index_of(
                point_from_json(source.space, json.loads(args.x0)))
    else:
        source = _space_from_args(args)
        x0 = None
    series = growth.ball_sizes(source, x0, args.max_m)
    print(f"growth series of {series.source}: "
          f"{list(series.values[: min(8, len(series))])}...")
    _write_text(args.out, config, series.to_csv())
    print(f"wrote {args.out}")
    return 0


def cmd_growth_classify(args):
    with open(args.series) as fh:
        series = growth.GrowthSeries.from_csv(fh.read())
    verdict = growth.classify_growth(series)
    print(json.dumps({
        "class": verdict.kind,
        "estimate": verdict.estimate,
        "ci": verdict.ci,
        "diagnostics": verdict.diagnostics,
    }, sort_keys=True))
    return 0


def cmd_growth_compare(args):
    with open(args.a) as fh:
        sa = growth.GrowthSeries.from_csv(fh.read(), source="a")
    with open(args.b) as fh:
        sb = growth.GrowthSeries.from_csv(fh.read(), source="b")
    verdict = growth.compare_growth(sa, sb)
    print(json.dumps({
        "equivalent": verdict.equivalent,
        "constants": verdict.constants,
        "detail": verdict.detail,
    }, sort_keys=True))
    return 0


def cmd_folner_ratio(args):
    graph = _load_graph(args.graph)
    center = folner._finite_center(graph)
    A = folner._finite_ball(graph, center, args.ball)
    ratio = folner.folner_ratio(graph, A, args.c)
    print(f"ball radius {args.ball} ({len(A)} vertices): ratio {ratio:.6f}")
    return 0


def cmd_folner_scan(args):
    config = _config(args)
    graph = _load_graph(args.graph)
    lo, hi = _parse_range(args.sizes, int)
    report = folner.folner_scan(graph, args.c, args.family, args.epsilon,
                                range(lo, hi + 1))
    print(f"folner scan ({args.family}): best ratio {report.best_ratio:.4f}, "
          f"achieved={report.achieved}")
    if args.out:
        _write_json(args.out, config, report.to_json())
        print(f"wrote {args.out}")
    if args.csv:
        _write_text(args.csv, config, report.to_csv())
        print(f"wrote {args.csv}")
    return 0


# ---------------------------------------------------------------------------
# parser


def _add_space_options(p):
    p.add_argument("--space", help="zd | free_group | heisenberg | euclidean | h2")
    p.add_argument("--d", type=int, default=2, help="dimension for zd/euclidean")
    p.add_argument("--k", type=int, default=2, help="rank for free_group")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="roughcayley",
        description="rough Cayley graphs, quasi-lattices, growth and Folner analysis",
    )
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for all sampled computations "
                             "(COARSE_SEED overrides)")
    sub = parser.add_subparsers(dest="group", required=True)

    p_space = sub.add_parser("space", help="model registry")
    space_sub = p_space.add_subparsers(dest="cmd", required=True)
    p = space_sub.add_parser("list")
    p.set_defaults(func=cmd_space_list, _command="space list")

    p_lat = sub.add_parser("lattice", help="build and verify quasi-lattices")
    lat_sub = p_lat.add_subparsers(dest="cmd", required=True)
    p = lat_sub.add_parser("build")
    _add_space_options(p)
    p.add_argument("--horocyclic", action="store_true",
                   help="the explicit lattice {(e^n m, e^n)} in h2")
    p.add_argument("--group-ball", action="store_true",
                   help="whole word ball of a group model")
    p.add_argument("--delta", type=float, help="greedy net separation")
    p.add_argument("--radius", type=int, help="word-ball window radius")
    p.add_argument("--box", help="euclidean box, e.g. -5..5,-5..5")
    p.add_argument("--u", help="u range for h2, e.g. -20..20")
    p.add_argument("--n", help="integer level range for --horocyclic, e.g. -3..3")
    p.add_argument("--log-a", dest="log_a", help="log a range for h2 windows")
    p.add_argument("--pitch", type=float, default=0.25)
    p.add_argument("--probes", type=int, default=1000,
                   help="verification probes (0 disables)")
    p.add_argument("--margin", type=float, default=1.2)
    p.add_argument("--R", default="1.0", help="multiplicity radii, e.g. 1,2")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_lattice_build, _command="lattice build")

    p = lat_sub.add_parser("verify")
    p.add_argument("--lattice", required=True)
    p.add_argument("--probes", type=int, default=1000)
    p.add_argument("--margin", type=float, default=1.2)
    p.add_argument("--R", default="1.0")
    p.add_argument("--out")
    p.set_defaults(func=cmd_lattice_verify, _command="lattice verify")

    p_graph = sub.add_parser("graph", help="rough graphs over lattices")
    graph_sub = p_graph.add_subparsers(dest="cmd", required=True)
    p = graph_sub.add_parser("build")
    p.add_argument("--lattice", required=True)
    p.add_argument("--threshold", type=float)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_graph_build, _command="graph build")
    p = graph_sub.add_parser("stats")
    p.add_argument("--graph", required=True)
    p.set_defaults(func=cmd_graph_stats, _command="graph stats")
    p = graph_sub.add_parser("export")
    p.add_argument("--graph", required=True)
    p.add_argument("--dot")
    p.add_argument("--csv")
    p.set_defaults(func=cmd_graph_export, _command="graph export")

    p_qa = sub.add_parser("qaction", help="quasi-action certificates")
    qa_sub = p_qa.add_subparsers(dest="cmd", required=True)
    p = qa_sub.add_parser("certify")
    p.add_argument("--lattice", required=True)
    p.add_argument("--group-radius", dest="group_radius", type=int, default=8)
    p.add_argument("--targets", type=int, default=8)
    p.add_argument("--out")
    p.set_defaults(func=cmd_qaction_certify, _command="qaction certify")
    p = qa_sub.add_parser("orbit-qi")
    p.add_argument("--lattice", required=True)
    p.add_argument("--radii", default="5,10,15")
    p.add_argument("--out")
    p.set_defaults(func=cmd_qaction_orbit_qi, _command="qaction orbit-qi")
    p = qa_sub.add_parser("conjugacy")
    p.add_argument("--lattice", required=True)
    p.add_argument("--lattice2", required=True)
    p.add_argument("--group-radius", dest="group_radius", type=int, default=8)
    p.add_argument("--out")
    p.set_defaults(func=cmd_qaction_conjugacy, _command="qaction conjugacy")

    p_growth = sub.add_parser("growth", help="ball growth series")
    growth_sub = p_growth.add_subparsers(dest="cmd", required=True)
    p = growth_sub.add_parser("run")
    p.add_argument("--graph")
    _add_space_options(p)
    p.add_argument("--max-m", dest="max_m", type=int, required=True)
    p.add_argument("--x0", help="base point as tagged JSON")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_growth_run, _command="growth run")
    p = growth_sub.add_parser("classify")
    p.add_argument("--series", required=True)
    p.set_defaults(func=cmd_growth_classify, _command="growth classify")
    p = growth_sub.add_parser("compare")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.set_defaults(func=cmd_growth_compare, _command="growth compare")

    p_folner = sub.add_parser("folner", help="boundary ratios and scans")
    folner_sub = p_folner.add_subparsers(dest="cmd", required=True)
    p = folner_sub.add_parser("ratio")
    p.add_argument("--graph", required=True)
    p.add_argument("--ball", type=int, required=True)
    p.add_argument("--c", type=float, default=1.0)
    p.set_defaults(func=cmd_folner_ratio, _command="folner ratio")
    p = folner_sub.add_parser("scan")
    p.add_argument("--graph", required=True)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--family", default="boxes",
                   choices=["metric_balls", "boxes", "greedy_improved"])
    p.add_argument("--sizes", default="1..20", help="size schedule, e.g. 2..40")
    p.add_argument("--out")
    p.add_argument("--csv")
    p.set_defaults(func=cmd_folner_scan, _command="folner scan")

    return parser


def _join_range_flags(argv):
    """Let range flags take values like '-3..3' without argparse seeing a
    new option; rewrites ['--n', '-3..3'] as ['--n=-3..3']."""
    range_flags = {"--n", "--u", "--log-a", "--box", "--radii", "--sizes", "--R"}
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in range_flags and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None):
    argv = _join_range_flags(sys.argv[1:] if argv is None else list(argv))
    parser = build_parser()
    args = parser.parse_args(argv)
    env_seed = os.environ.get("COARSE_SEED")
    if env_seed is not None:
        try:
            args.seed = int(env_seed)
        except ValueError:
            print(f"error: COARSE_SEED must be an integer, got {env_seed!r}",
                  file=sys.stderr)
            return 2
    try:
        return args.func(args)
    except SchemaError as exc:
        print(f"error (schema): {exc}", file=sys.stderr)
        return 2
    except WINDOW_ERRORS as exc:
        print(f"error (window/border): {exc}", file=sys.stderr)
        return 3
    except CertificationError as exc:
        print(f"error (certification): {exc}", file=sys.stderr)
        return 4
    except RoughCayleyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
