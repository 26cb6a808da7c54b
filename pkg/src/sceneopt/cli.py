"""Command-line front end.

Subcommands: ``optimize``, ``edit``, ``rank``, ``eval``, ``tune``,
``render`` and ``gen-corpus``.  Every run is deterministic: the same
input files, flags and seed produce byte-identical output files.  All
files are written atomically (temp sibling, then rename).

Exit codes: 0 on success or convergence, 1 on input errors, 2 when the
optimizer exhausts its step budget without converging, 3 when an edit
command fails validation.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

from . import editing, metrics, ranking, svg, tuning
from .optimizer import OptimizerParams, OptResult, optimize
from .scene import (
    ConstraintSet,
    SceneState,
    SceneValidationError,
    load_constraints,
    load_scene,
    save_scene,
    scene_to_dict,
    write_text_atomic,
)

__all__ = ["main", "build_parser"]

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NO_CONVERGENCE = 2
EXIT_EDIT_INVALID = 3


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_INPUT


def _load_json(path: str) -> dict:
    with open(path, "r") as fh:
        return json.load(fh)


def _load_params(args) -> OptimizerParams:
    if getattr(args, "params", None):
        params = OptimizerParams.from_dict(_load_json(args.params))
    else:
        params = OptimizerParams()
    if getattr(args, "max_iters", None) is not None:
        params = dataclasses.replace(params, t_max=args.max_iters)
    if getattr(args, "collision_mode", None):
        params = dataclasses.replace(params, collision_mode=args.collision_mode)
    params.validate()
    return params


def _load_scene_and_constraints(args) -> tuple[SceneState, ConstraintSet]:
    scene, cons = load_scene(args.scene)
    if getattr(args, "constraints", None):
        cons = cons.merged(load_constraints(args.constraints))
        cons.validate(scene)
    return scene, cons


def _write_trace(path: str, result: OptResult) -> None:
    rows = ["iteration,residual,active-deadlocks"]
    for i, (r, a) in enumerate(zip(result.residuals, result.active_log)):
        rows.append(f"{i},{r!r},{a}")
    write_text_atomic(path, "\n".join(rows) + "\n")


def _write_params(path: str, params: OptimizerParams) -> None:
    write_text_atomic(path, json.dumps(params.to_dict(), indent=2, sort_keys=True) + "\n")


def _render_to(path: str, scene: SceneState, cons: ConstraintSet, args) -> None:
    spec = svg.RenderSpec(
        scale=getattr(args, "scale", 100.0),
        show_grid=not getattr(args, "no_grid", False),
        grid_spacing=getattr(args, "grid_spacing", 1.0),
        show_ids=not getattr(args, "no_ids", False),
        show_constraint_overlays=getattr(args, "overlays", False),
        color_by_level=getattr(args, "color_by_level", False),
    )
    write_text_atomic(path, svg.render_svg(scene, spec, cons))


def cmd_optimize(args) -> int:
    scene, cons = _load_scene_and_constraints(args)
    params = _load_params(args)
    os.makedirs(args.out, exist_ok=True)
    result = optimize(
        scene, cons, params, seed=args.seed, deadlock_guard=not args.no_deadlock_guard
    )
    save_scene(os.path.join(args.out, "optimized.json"), result.scene, cons)
    if args.trace:
        _write_trace(os.path.join(args.out, "trace.csv"), result)
    if args.svg:
        _render_to(os.path.join(args.out, "before.svg"), scene, cons, args)
        _render_to(os.path.join(args.out, "after.svg"), result.scene, cons, args)
    print(
        f"{'converged' if result.converged else 'did not converge'} "
        f"after {result.iterations} iterations "
        f"(residual {result.final_residual:.3e})"
    )
    return EXIT_OK if result.converged else EXIT_NO_CONVERGENCE


def cmd_edit(args) -> int:
    scene, cons = _load_scene_and_constraints(args)
    params = _load_params(args)
    cmd = editing.command_from_dict(_load_json(args.command))
    os.makedirs(args.out, exist_ok=True)
    outcome = editing.edit_and_optimize(
        scene, cons, cmd, params, seed=args.seed,
        deadlock_guard=not args.no_deadlock_guard,
    )
    result = outcome.result
    save_scene(
        os.path.join(args.out, "edited.json"),
        outcome.edited_scene,
        outcome.edited_constraints,
    )
    save_scene(
        os.path.join(args.out, "optimized.json"), result.scene, outcome.edited_constraints
    )
    report = {
        "converged": result.converged,
        "iterations": result.iterations,
        "final_residual": result.final_residual,
        "untouched_drift": outcome.untouched_drift,
    }
    write_text_atomic(
        os.path.join(args.out, "report.json"),
        json.dumps(report, indent=2, sort_keys=True) + "\n",
    )
    if args.trace:
        _write_trace(os.path.join(args.out, "trace.csv"), result)
    if args.svg:
        _render_to(os.path.join(args.out, "before.svg"), scene, cons, args)
        _render_to(
            os.path.join(args.out, "after.svg"),
            result.scene,
            outcome.edited_constraints,
            args,
        )
    print(
        f"edit applied; {'converged' if result.converged else 'did not converge'} "
        f"after {result.iterations} iterations "
        f"(drift {outcome.untouched_drift:.4f} m)"
    )
    return EXIT_OK if result.converged else EXIT_NO_CONVERGENCE


def cmd_rank(args) -> int:
    catalog = ranking.catalog_from_dict(_load_json(args.catalog))
    query = _load_json(args.query)
    if "target_dims" not in query:
        raise ranking.RankingError("query file needs 'target_dims'")
    dims = tuple(float(v) for v in query["target_dims"])
    vec = tuple(float(v) for v in query["semantic"]) if "semantic" in query else None
    weights = ranking.RankWeights(
        recall_k=args.recall_k if args.recall_k is not None else 60
    )
    ranked = ranking.rank(dims, catalog, weights, query_vec=vec)
    os.makedirs(args.out, exist_ok=True)
    rows = ["rank,id,s_sbert,s_clip,s_size,score"]
    for i, c in enumerate(ranked, start=1):
        rows.append(f"{i},{c.id},{c.s_sbert!r},{c.s_clip!r},{c.s_size!r},{c.score!r}")
    write_text_atomic(os.path.join(args.out, "ranking.csv"), "\n".join(rows) + "\n")
    for line in rows[1 : 1 + args.show]:
        print(line)
    return EXIT_OK


def cmd_eval(args) -> int:
    if bool(args.scene) == bool(args.corpus):
        return _fail("eval needs exactly one of --scene or --corpus")
    if args.scene:
        items = [(os.path.basename(args.scene), load_scene(args.scene)[0])]
    else:
        items = [
            (os.path.basename(p), s)
            for p, (s, _) in zip(
                sorted(
                    os.path.join(args.corpus, f)
                    for f in os.listdir(args.corpus)
                    if f.endswith(".json")
                ),
                tuning.load_corpus(args.corpus),
            )
        ]
    rows, agg = metrics.evaluate_corpus(items)
    lines = ["scene," + ",".join(metrics.REPORT_COLUMNS)]
    for name, rep in rows:
        lines.append(name + "," + ",".join(repr(v) for v in rep.row()))
    lines.append("MEAN," + ",".join(repr(agg[c]) for c in metrics.REPORT_COLUMNS))
    os.makedirs(args.out, exist_ok=True)
    write_text_atomic(os.path.join(args.out, "metrics.csv"), "\n".join(lines) + "\n")
    print("  ".join(f"{c}={agg[c]:.2f}" for c in metrics.REPORT_COLUMNS))
    return EXIT_OK


def cmd_tune(args) -> int:
    corpus = tuning.load_corpus(args.corpus)
    space = tuning.SearchSpace.around_defaults(
        budget=args.budget, span=args.span, prune_interval=args.prune_interval
    )
    best, trials = tuning.search(corpus, space, seed=args.seed)
    os.makedirs(args.out, exist_ok=True)
    rows = ["trial,mean_penalty,pruned,scenes_evaluated"]
    for t in trials:
        rows.append(f"{t.index},{t.mean_penalty!r},{int(t.pruned)},{len(t.scene_penalties)}")
    write_text_atomic(os.path.join(args.out, "trials.csv"), "\n".join(rows) + "\n")
    _write_params(os.path.join(args.out, "best_params.json"), best.params)
    print(
        f"best trial {best.index}: mean penalty {best.mean_penalty!r} "
        f"({sum(1 for t in trials if t.pruned)}/{len(trials)} trials pruned)"
    )
    return EXIT_OK


def cmd_render(args) -> int:
    scene, cons = _load_scene_and_constraints(args)
    os.makedirs(args.out, exist_ok=True)
    _render_to(os.path.join(args.out, "scene.svg"), scene, cons, args)
    print(os.path.join(args.out, "scene.svg"))
    return EXIT_OK


def cmd_gen_corpus(args) -> int:
    corpus = tuning.gen_corpus(args.n, seed=args.seed)
    paths = tuning.save_corpus(args.out, corpus)
    print(f"wrote {len(paths)} scenes to {args.out}")
    return EXIT_OK


def _add_optimizer_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--params", help="optimizer parameter JSON file")
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    p.add_argument("--max-iters", type=int, default=None, help="step budget override")
    p.add_argument(
        "--collision-mode", choices=("sat", "area"), default=None,
        help="horizontal collision measure",
    )
    p.add_argument(
        "--no-deadlock-guard", action="store_true", help="disable deadlock handling"
    )
    p.add_argument("--trace", action="store_true", help="write per-iteration trace CSV")
    p.add_argument("--svg", action="store_true", help="write before/after SVG views")


def _add_render_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scale", type=float, default=100.0, help="pixels per meter")
    p.add_argument("--grid-spacing", type=float, default=1.0, help="grid pitch, meters")
    p.add_argument("--no-grid", action="store_true", help="hide the metric grid")
    p.add_argument("--no-ids", action="store_true", help="hide object id labels")
    p.add_argument("--overlays", action="store_true", help="draw constraint overlays")
    p.add_argument("--color-by-level", action="store_true", help="color per support level")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sceneopt",
        description="Constraint-driven force-directed indoor layout tool",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("optimize", help="resolve constraint violations in a scene")
    p.add_argument("--scene", required=True, help="scene JSON file")
    p.add_argument("--constraints", help="extra constraints JSON file")
    p.add_argument("--out", default=".", help="output directory")
    _add_optimizer_flags(p)
    _add_render_flags(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("edit", help="apply an add/delete/move command, then re-optimize")
    p.add_argument("--scene", required=True, help="scene JSON file")
    p.add_argument("--constraints", help="extra constraints JSON file")
    p.add_argument("--command", required=True, help="edit command JSON file")
    p.add_argument("--out", default=".", help="output directory")
    _add_optimizer_flags(p)
    _add_render_flags(p)
    p.set_defaults(func=cmd_edit)

    p = sub.add_parser("rank", help="score an asset catalog against a query")
    p.add_argument("--catalog", required=True, help="asset catalog JSON file")
    p.add_argument("--query", required=True, help="query JSON file")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--recall-k", type=int, default=None, help="stage-one recall count")
    p.add_argument("--show", type=int, default=10, help="rows to print (default 10)")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("eval", help="score scenes on plausibility metrics")
    p.add_argument("--scene", help="single scene JSON file")
    p.add_argument("--corpus", help="directory of scene JSON files")
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("tune", help="random-search optimizer parameters over a corpus")
    p.add_argument("--corpus", required=True, help="directory of scene JSON files")
    p.add_argument("--budget", type=int, default=200, help="number of trials")
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    p.add_argument("--span", type=float, default=10.0, help="range factor around defaults")
    p.add_argument(
        "--prune-interval", type=int, default=1, help="scenes between prune checks"
    )
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("render", help="render a scene to SVG")
    p.add_argument("--scene", required=True, help="scene JSON file")
    p.add_argument("--constraints", help="extra constraints JSON file")
    p.add_argument("--out", default=".", help="output directory")
    _add_render_flags(p)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("gen-corpus", help="generate a synthetic scene corpus")
    p.add_argument("--n", type=int, default=50, help="number of scenes")
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_gen_corpus)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except editing.EditError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EDIT_INVALID
    except (
        FileNotFoundError,
        NotADirectoryError,
        IsADirectoryError,
        json.JSONDecodeError,
        SceneValidationError,
        ranking.RankingError,
        ValueError,
    ) as exc:
        return _fail(str(exc))


if __name__ == "__main__":
    sys.exit(main())
