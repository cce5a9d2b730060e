"""Command line front end for the reconstruction pipeline.

Commands: gen, observe, solve, densify, correspond, plot, selftest.
Exit codes: 0 success, 1 validation error (one machine-parsable line on
stderr), 2 solver non-convergence (best candidate still written).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import artifacts, densify, observe, perspective, scene
from .acceptance import DEFAULT_SEED, run_all, write_pipeline_artifacts
from .errors import NoConvergenceError, RigidCurveError
from .linearize import linearized_solve
from .solver import SolverConfig, solve_global


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rigidcurve",
                                description="rigid curve reconstruction pipeline")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a synthetic scene and frames")
    g.add_argument("--seed", type=int, default=1)
    g.add_argument("--frames", type=int, default=6)
    g.add_argument("--samples", type=int, default=64)
    g.add_argument("--noise", type=float, default=0.0)
    g.add_argument("--nuisance", action="store_true",
                   help="add in-plane rotation/translation per frame")
    g.add_argument("--out", default=".", help="output directory")

    o = sub.add_parser("observe", help="extract per-frame observables")
    o.add_argument("--in", dest="inp", required=True, help="frames.json")
    o.add_argument("--out", required=True, help="obs.json")

    s = sub.add_parser("solve", help="estimate the global curve invariants")
    s.add_argument("--in", dest="inp", required=True, help="obs.json")
    s.add_argument("--out", required=True, help="solution.json")
    s.add_argument("--method", choices=("nonlinear", "linearized"), default="nonlinear")
    s.add_argument("--tol", type=float, default=None,
                   help="override the solver success tolerance")

    d = sub.add_parser("densify", help="reconstruct non-traceable 3D points")
    d.add_argument("--in", dest="inp", required=True, help="frames.json")
    d.add_argument("--solution", required=True, help="solution.json")
    d.add_argument("--out", required=True, help="curve3d.json")

    c = sub.add_parser("correspond", help="planar-curve correspondence between views")
    c.add_argument("--in", dest="inp", required=True, help="view1.json")
    c.add_argument("--in2", required=True, help="view2.json")
    c.add_argument("--out", required=True, help="pairs.json")

    pl = sub.add_parser("plot", help="render frames to SVG")
    pl.add_argument("--in", dest="inp", required=True, help="frames.json")
    pl.add_argument("--out", default=".", help="output directory")

    st = sub.add_parser("selftest", help="write pipeline artifacts and run acceptance")
    st.add_argument("--seed", type=int, default=DEFAULT_SEED)
    st.add_argument("--out", default="selftest-out", help="artifact directory")
    st.add_argument("--artifacts-only", action="store_true",
                    help="skip the acceptance battery, only write artifacts")
    return p


def _cmd_gen(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    sc = scene.make_scene(args.seed, n_frames=args.frames, n_samples=args.samples,
                          noise_sigma=args.noise, nuisance=args.nuisance)
    artifacts.write_json(out / "scene.json", artifacts.scene_doc(sc, args.samples))
    artifacts.write_json(out / "frames.json", artifacts.frames_doc(sc.frames))
    print(f"wrote {out / 'scene.json'} and {out / 'frames.json'}")
    return 0


def _cmd_observe(args) -> int:
    frames = artifacts.frames_from_doc(artifacts.read_json(args.inp))
    obs = observe.extract_all(frames)
    artifacts.write_json(args.out, artifacts.observations_doc(obs))
    print(f"wrote {args.out} ({len(obs)} observations)")
    return 0


def _cmd_solve(args) -> int:
    obs = artifacts.observations_from_doc(artifacts.read_json(args.inp))
    cfg = SolverConfig() if args.tol is None else SolverConfig(noise_tol=args.tol)
    try:
        if args.method == "linearized":
            rep = linearized_solve(obs, cfg)
        else:
            rep = solve_global(obs, cfg)
    except NoConvergenceError as exc:
        if exc.report is not None:
            artifacts.write_json(args.out, artifacts.solution_doc(exc.report))
        print(f"error: {exc}", file=sys.stderr)
        return 2
    artifacts.write_json(args.out, artifacts.solution_doc(rep))
    p = rep.params
    print(f"wrote {args.out}: c={p.c:.9g} alpha={p.alpha:.9g} beta={p.beta:.9g} "
          f"phi={p.phi:.9g} rms={rep.residual_rms:.3g}")
    return 0


def _cmd_densify(args) -> int:
    frames = artifacts.frames_from_doc(artifacts.read_json(args.inp))
    rep = artifacts.solution_from_doc(artifacts.read_json(args.solution))
    recon = densify.reconstruct_curve(frames[:2], list(rep.per_frame[:2]), rep.params)
    artifacts.write_json(args.out, artifacts.curve3d_doc(recon))
    print(f"wrote {args.out} ({len(recon.points)} points, mirror {recon.mirror_flag})")
    return 0


def _cmd_correspond(args) -> int:
    v1 = artifacts.view_from_doc(artifacts.read_json(args.inp))
    v2 = artifacts.view_from_doc(artifacts.read_json(args.in2))
    pairs = perspective.correspond_curve(v1, v2)
    artifacts.write_json(args.out, artifacts.pairs_doc(pairs))
    print(f"wrote {args.out} ({len(pairs)} pairs)")
    return 0


def _cmd_plot(args) -> int:
    frames = artifacts.frames_from_doc(artifacts.read_json(args.inp))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for img in frames:
        path = out / f"frame_{img.index:03d}.svg"
        path.write_text(artifacts.frame_svg(img), encoding="utf-8")
    print(f"wrote {len(frames)} SVG files to {out}")
    return 0


def _cmd_selftest(args) -> int:
    write_pipeline_artifacts(args.seed, args.out)
    print(f"artifacts written to {args.out}")
    if args.artifacts_only:
        return 0
    results = run_all(args.seed)
    return 0 if all(r.passed for r in results) else 1


_COMMANDS = {"gen": _cmd_gen, "observe": _cmd_observe, "solve": _cmd_solve,
             "densify": _cmd_densify, "correspond": _cmd_correspond,
             "plot": _cmd_plot, "selftest": _cmd_selftest}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except RigidCurveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: missing input file: {exc.filename}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
