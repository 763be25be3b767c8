"""Command-line entry points: fitting, recognition, evaluation, serving, replay."""

from __future__ import annotations

import argparse
import importlib.resources
import json
import shutil
import sys
from pathlib import Path


from .config import AssistConfig
from .datasets import generate_synthetic, load_demoset, save_demoset
from .errors import AssistanceError, SchemaError
from .evaluation import eval_rms
from .promp import fit_promp, load_promp, save_promp
from .recognition import prefix_buffer, recognize
from .service import load_command_log, replay_command_log, serve

_TASK_ALIASES = {"door": "door-reach", "door-reach": "door-reach", "punch": "punch"}


def _cmd_gen_synthetic(args) -> int:
    task = _TASK_ALIASES.get(args.task)
    if task is None:
        raise SchemaError(f"unknown task {args.task!r} (expected door or punch)")
    ds = generate_synthetic(task, count=args.count, seed=args.seed)
    save_demoset(ds, args.output)
    print(f"wrote {len(ds.demos)} demos ({ds.task_label}, frame {ds.frame}) to {args.output}")
    return 0


def _cmd_fit(args) -> int:
    ds = load_demoset(args.demoset)
    if args.by_label and ds.demo_labels is not None:
        out_dir = Path(args.output)
        out_dir.mkdir(parents=True, exist_ok=True)
        for label, sub in ds.split_by_label().items():
            promp = fit_promp(
                sub.demos, task_label=label, frame=sub.frame,
                ridge_lambda=args.ridge_lambda, basis_count=args.basis_count,
                bandwidth=args.bandwidth,
            )
            path = out_dir / f"{label}.promp.json"
            save_promp(promp, path)
            print(f"fit {label}: {len(sub.demos)} demos -> {path}")
        return 0
    promp = fit_promp(
        ds.demos, task_label=args.label or ds.task_label, frame=ds.frame,
        ridge_lambda=args.ridge_lambda, basis_count=args.basis_count,
        bandwidth=args.bandwidth,
    )
    save_promp(promp, args.output)
    print(f"fit {promp.task_label}: {len(ds.demos)} demos, "
          f"mean duration {promp.mean_duration:.2f}s -> {args.output}")
    return 0


def _cmd_recognize(args) -> int:
    candidates = [load_promp(p) for p in args.promps]
    ds = load_demoset(args.input)
    traj = ds.demos[args.demo_index]
    shortest = min(c.mean_duration for c in candidates)
    span = args.window * max(traj.duration, shortest)
    buf = prefix_buffer(traj, span)
    result = recognize(buf, candidates, window_fraction=args.window)
    print(json.dumps(result.to_dict(), indent=1))
    return 0


def _cmd_eval_rms(args) -> int:
    candidates = [load_promp(p) for p in args.promps]
    tests = load_demoset(args.tests)
    report = eval_rms(candidates, tests.demos, window_fraction=args.window)
    print(report.format_text())
    if args.json_out:
        with open(args.json_out, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, indent=1)
        print(f"\nmachine-readable report -> {args.json_out}")
    return 0


def _cmd_export_envelope(args) -> int:
    """Write the primitive's mean and std envelope as plain columns."""
    import csv

    import numpy as np

    promp = load_promp(args.promp)
    phases = np.linspace(0.0, 1.0, args.samples)
    mean = promp.mean_at(phases)
    std = promp.std_at(phases)
    if promp.channels is not None:
        names = []
        for c in promp.channels:
            kind = "position" if c.kind.value.startswith("position") else "orientation"
            names += [f"{c.name}.{kind}.{axis}" for axis in "xyz"]
    else:
        names = [f"dim{d}" for d in range(promp.basis.n)]
    with open(args.output, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["phase"] + [f"{n}.mean" for n in names] + [f"{n}.std" for n in names])
        for i, phase in enumerate(phases):
            writer.writerow([repr(float(phase))]
                            + [repr(float(v)) for v in mean[i]]
                            + [repr(float(v)) for v in std[i]])
    print(f"wrote {args.samples} envelope rows for {promp.task_label!r} to {args.output}")
    return 0


def parse_inject_flag(text: str) -> dict:
    """Decode an --inject-object flag: ``class=door pose=x,y,z,qx,qy,qz,qw``."""
    fields = dict(part.split("=", 1) for part in text.split() if "=" in part)
    if "class" not in fields:
        raise SchemaError(f"--inject-object needs class=<name>, got {text!r}")
    pose = {"position": [0.0, 0.0, 0.0], "orientation_xyzw": [0.0, 0.0, 0.0, 1.0]}
    if "pose" in fields:
        comps = [float(v) for v in fields["pose"].split(",")]
        if len(comps) != 7:
            raise SchemaError("pose needs 7 comma-separated numbers: x,y,z,qx,qy,qz,qw")
        pose = {"position": comps[:3], "orientation_xyzw": comps[3:]}
    return {"type": "inject_object", "object_class": fields["class"], "pose": pose}


def _cmd_serve(args) -> int:
    config = AssistConfig.load(args.config)
    startup = [parse_inject_flag(text) for text in (args.inject_object or [])]
    serve(config, record_path=args.record, static_dir=args.static,
          startup_commands=startup)
    return 0


def _cmd_replay(args) -> int:
    config = AssistConfig.load(args.config)
    replies, events = replay_command_log(args.log, config)
    for event in events:
        print(json.dumps(event))
    errors = [r for r in replies if not r.get("ok")]
    print(f"# replayed {len(load_command_log(args.log))} commands, "
          f"{len(events)} events, {len(errors)} error replies", file=sys.stderr)
    return 0


def _cmd_init_workspace(args) -> int:
    """Generate a ready-to-serve workspace: demos, primitives, templates, manifest."""
    root = Path(args.directory)
    root.mkdir(parents=True, exist_ok=True)

    door = generate_synthetic("door-reach", count=args.door_demos, seed=args.seed)
    save_demoset(door, root / "door_reach.demos.json")
    door_promp = fit_promp(door.demos, task_label="reach_handle", frame=door.frame)
    save_promp(door_promp, root / "reach_handle.promp.json")

    punch = generate_synthetic("punch", count=args.punch_demos, seed=args.seed + 1)
    save_demoset(punch, root / "punch.demos.json")
    punch_promp = fit_promp(punch.demos, task_label="punch", frame=punch.frame)
    save_promp(punch_promp, root / "punch.promp.json")

    data = importlib.resources.files("teleassist") / "data"
    for name in ("door_handle.at.json", "punch_target.at.json"):
        shutil.copyfile(str(data / name), root / name)

    manifest = {
        "version": 1,
        "objects": {
            "door": {
                "promps": ["reach_handle.promp.json"],
                "affordance": "door_handle.at.json",
            },
            "punch_target": {
                "promps": ["punch.promp.json"],
                "affordance": "punch_target.at.json",
            },
        },
    }
    with open(root / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=1)

    config = AssistConfig(manifest=str(root / "manifest.json"))
    config.save(root / "teleassist.cfg")
    print(f"workspace ready in {root}")
    print(f"serve with: teleassist serve --config {root / 'teleassist.cfg'}")
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="teleassist",
        description="Assistive teleoperation: learn, recognize, adapt, blend, serve.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-synthetic", help="generate synthetic demonstrations")
    p.add_argument("task", choices=sorted(_TASK_ALIASES))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=None)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_gen_synthetic)

    p = sub.add_parser("fit", help="fit a primitive from a demo set")
    p.add_argument("demoset")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--label", default=None)
    p.add_argument("--by-label", action="store_true",
                   help="fit one primitive per demo label into the output directory")
    p.add_argument("--basis-count", type=int, default=None)
    p.add_argument("--bandwidth", type=float, default=None)
    p.add_argument("--ridge-lambda", type=float, default=1e-12)
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("recognize", help="recognize a motion prefix among primitives")
    p.add_argument("promps", nargs="+")
    p.add_argument("--input", required=True, help="demo-set file holding the motion")
    p.add_argument("--demo-index", type=int, default=0)
    p.add_argument("--window", type=float, default=1.0 / 3.0)
    p.set_defaults(func=_cmd_recognize)

    p = sub.add_parser("eval-rms", help="RMS evaluation of adapted primitives")
    p.add_argument("promps", nargs="+")
    p.add_argument("--tests", required=True)
    p.add_argument("--window", type=float, default=1.0 / 3.0)
    p.add_argument("--json-out", default=None)
    p.set_defaults(func=_cmd_eval_rms)

    p = sub.add_parser("export-envelope",
                       help="dump a primitive's mean/std envelope as CSV columns")
    p.add_argument("promp")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--samples", type=int, default=200)
    p.set_defaults(func=_cmd_export_envelope)

    p = sub.add_parser("serve", help="run the streaming service")
    p.add_argument("--config", required=True)
    p.add_argument("--record", default=None, help="append received commands to this log")
    p.add_argument("--static", default=None, help="directory of console assets to serve")
    p.add_argument("--inject-object", action="append", default=None,
                   metavar="class=NAME pose=X,Y,Z,QX,QY,QZ,QW",
                   help="inject an object at startup (repeatable)")
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("replay", help="replay a recorded command log")
    p.add_argument("log")
    p.add_argument("--config", required=True)
    p.set_defaults(func=_cmd_replay)

    p = sub.add_parser("init-workspace", help="generate demos, primitives and a manifest")
    p.add_argument("directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--door-demos", type=int, default=20)
    p.add_argument("--punch-demos", type=int, default=27)
    p.set_defaults(func=_cmd_init_workspace)

    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except (AssistanceError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
