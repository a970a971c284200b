"""Single entry-point command line tool.

Subcommands: list, train, eval, robot (parse | validate | attach), serve,
kill. Exit codes: 0 success, 1 usage error, 2 domain error.
"""

from __future__ import annotations

import argparse
import asyncio
import dataclasses
import json
import sys
from pathlib import Path

from . import __version__, registry
from .core import RoverGymError
from .envs.base import EpisodeConfig, RewardWeights
from .dynamics import RoverGeometry

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DOMAIN = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


class ConfigError(RoverGymError):
    pass


# ---------------------------------------------------------------------------
# Config file: JSON sections mirroring the dataclasses; unknown keys rejected
# ---------------------------------------------------------------------------

def load_config_file(path: str) -> dict:
    from .rl.train import TrainConfig
    sections = {
        "train": TrainConfig,
        "episode": EpisodeConfig,
        "reward": RewardWeights,
        "geometry": RoverGeometry,
    }
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: config root must be an object")
    out: dict = {}
    for section, payload in doc.items():
        cls = sections.get(section)
        if cls is None:
            raise ConfigError(f"{path}: unknown config section {section!r}")
        if not isinstance(payload, dict):
            raise ConfigError(f"{path}: section {section!r} must be an object")
        known = {f.name for f in dataclasses.fields(cls)}
        for key in payload:
            if key not in known:
                raise ConfigError(
                    f"{path}: unknown key {section}.{key}")
        out[section] = payload
    return out


def _build(cls, overrides: dict):
    fixed = {k: (tuple(v) if isinstance(v, list) else v)
             for k, v in overrides.items()}
    return cls(**fixed)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_list(args) -> int:
    entries = [
        {"id": spec.env_id, "obs_dim": spec.obs_dim, "act_dim": spec.act_dim}
        for spec in registry().values()
    ]
    if args.json:
        print(json.dumps(entries, indent=2))
        return EXIT_OK
    if not entries:
        return EXIT_OK
    width = max(len(e["id"]) for e in entries)
    print(f"{'ENV'.ljust(width)}  OBS  ACT")
    for e in entries:
        print(f"{e['id'].ljust(width)}  {e['obs_dim']:>3}  {e['act_dim']:>3}")
    return EXIT_OK


def cmd_train(args) -> int:
    from .rl.train import TrainConfig, train
    sections = load_config_file(args.config) if args.config else {}
    train_kw = dict(sections.get("train", {}))
    if args.algo is not None:
        train_kw["algo"] = args.algo
    if args.timesteps is not None:
        train_kw["total_timesteps"] = args.timesteps
    if args.seed is not None:
        train_kw["seed"] = args.seed
    config = _build(TrainConfig, train_kw)
    env_config = (_build(EpisodeConfig, sections["episode"])
                  if "episode" in sections else None)
    result = train(args.env_id, config, out_dir=args.out,
                   env_config=env_config)
    last = result.curve.rows[-1] if result.curve.rows else None
    print(f"trained {args.env_id} [{config.algo}] for "
          f"{config.total_timesteps} timesteps; "
          f"final window mean: {last[1]:.3f}" if last else
          f"trained {args.env_id} [{config.algo}]: no completed episodes")
    if args.out:
        print(f"wrote {Path(args.out) / 'curve.csv'}, checkpoint.json, "
              f"manifest.json")
    return EXIT_OK


def cmd_eval(args) -> int:
    from .rl.train import evaluate, load_checkpoint
    sections = load_config_file(args.config) if args.config else {}
    env_config = (_build(EpisodeConfig, sections["episode"])
                  if "episode" in sections else None)
    checkpoint = load_checkpoint(args.checkpoint)
    report = evaluate(checkpoint, args.env_id, args.n, seed=args.seed or 1000,
                      env_config=env_config)
    print(f"episodes:        {report.n_episodes}")
    print(f"success rate:    {report.success_rate:.3f}")
    print(f"mean reward:     {report.mean_reward:.3f}")
    print(f"stability RMS:   {report.stability_rms:.4f}")
    print(f"success RMS:     {report.success_stability_rms:.4f}")
    return EXIT_OK


def cmd_robot(args) -> int:
    from . import robot as robot_mod
    from . import urdf as urdf_mod
    text = Path(args.path).read_text(encoding="utf-8")
    model = urdf_mod.parse(text)

    if args.robot_cmd == "parse":
        out = args.out or (Path(args.path).stem + ".rmodel.json")
        Path(out).write_text(robot_mod.to_rmodel_json(model), encoding="utf-8")
        print(f"parsed {args.path}: {len(model.links)} links, "
              f"{len(model.joints)} joints -> {out}")
        for w in model.warnings:
            print(f"warning: {w}", file=sys.stderr)
        return EXIT_OK

    if args.robot_cmd == "validate":
        violations = robot_mod.validate(model)
        for v in violations:
            print(str(v))
        if violations:
            return EXIT_DOMAIN
        print(f"{args.path}: valid ({len(model.links)} links, "
              f"{len(model.joints)} joints)")
        return EXIT_OK

    # attach
    configs = []
    if args.diff_drive:
        left, _, right = args.diff_drive.partition(",")
        if not right:
            raise ConfigError("--diff-drive expects LEFT_JOINT,RIGHT_JOINT")
        configs.append({"kind": "diff_drive", "left_joint": left.strip(),
                        "right_joint": right.strip()})
    if args.imu:
        configs.append({"kind": "imu", "link": args.imu,
                        "sigma_imu": args.imu_sigma})
    for kind, link in (("gps", args.gps), ("sonar", args.sonar),
                       ("lidar", args.lidar),
                       ("magnetic_field", args.magnetic_field)):
        if link:
            configs.append({"kind": kind, "link": link})
    model = robot_mod.attach_plugins(model, configs)
    out = args.out or (Path(args.path).stem + ".rmodel.json")
    Path(out).write_text(robot_mod.to_rmodel_json(model), encoding="utf-8")
    print(f"attached {len(configs)} plugin(s) -> {out}")
    for att in model.plugins:
        print(f"  {att.kind}: {json.dumps(att.params)}")
    return EXIT_OK


def cmd_serve(args) -> int:
    from .teleop import serve_forever
    static_dir = args.cockpit
    if static_dir is not None and not Path(static_dir).is_dir():
        raise ConfigError(f"cockpit directory {static_dir!r} does not exist")
    print(f"serving {args.env_id} on ws://{args.host}:{args.port}/session/main "
          f"(Ctrl-C to stop)")
    if static_dir:
        print(f"cockpit at http://{args.host}:{args.port}/")
    try:
        asyncio.run(serve_forever(args.env_id, seed=args.seed or 0,
                                  host=args.host, port=args.port,
                                  static_dir=static_dir))
    except KeyboardInterrupt:
        print("stopped")
    return EXIT_OK


def cmd_kill(args) -> int:
    import urllib.error
    import urllib.request
    url = f"http://{args.host}:{args.port}/kill"
    try:
        with urllib.request.urlopen(urllib.request.Request(url, method="POST"),
                                    timeout=5.0) as resp:
            payload = json.loads(resp.read().decode("utf-8"))
        print(f"stopped {payload.get('stopped', 0)} session(s)")
    except (urllib.error.URLError, ConnectionError, OSError):
        print("no sessions")
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="rovergym",
                     description="rover simulation, training, and teleoperation")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("list", help="list registered environments")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_list)

    p = sub.add_parser("train", help="train a policy")
    p.add_argument("env_id")
    p.add_argument("--algo", choices=("ppo", "td3"))
    p.add_argument("--timesteps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a checkpoint")
    p.add_argument("checkpoint")
    p.add_argument("env_id")
    p.add_argument("-n", type=int, default=10, help="episodes")
    p.add_argument("--seed", type=int)
    p.add_argument("--config", help="JSON config file")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("robot", help="robot description tools")
    rsub = p.add_subparsers(dest="robot_cmd", required=True)
    for name in ("parse", "validate", "attach"):
        rp = rsub.add_parser(name)
        rp.add_argument("path")
        if name != "validate":
            rp.add_argument("--out")
        if name == "attach":
            rp.add_argument("--diff-drive", metavar="LEFT,RIGHT")
            rp.add_argument("--imu", metavar="LINK")
            rp.add_argument("--imu-sigma", type=float, default=0.0)
            rp.add_argument("--gps", metavar="LINK")
            rp.add_argument("--sonar", metavar="LINK")
            rp.add_argument("--lidar", metavar="LINK")
            rp.add_argument("--magnetic-field", metavar="LINK")
        rp.set_defaults(func=cmd_robot)

    p = sub.add_parser("serve", help="run the teleoperation service")
    p.add_argument("env_id")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8631)
    p.add_argument("--seed", type=int)
    p.add_argument("--cockpit", help="serve this directory as the web cockpit")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("kill", help="stop all running sessions")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8631)
    p.set_defaults(func=cmd_kill)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except RoverGymError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
