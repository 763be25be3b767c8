"""Runtime configuration: one flat key=value file covering every numeric knob."""

from __future__ import annotations

import ast
from dataclasses import asdict, dataclass, fields

from .errors import ParseError

_FIELD_COMMENTS = {
    "ridge_lambda": "ridge factor for per-demonstration weight regression",
    "basis_count": "radial basis functions per stacked dimension",
    "basis_bandwidth": "RBF bandwidth; default 1/(basis_count - 1)",
    "window_fraction": "fraction of the mean duration observed before proposing",
    "onset_threshold": "end-effector speed [m/s] that starts observation capture",
    "observation_noise": "variance attached to operator observations",
    "blend_fraction": "share of proposal samples replaced by the blend window",
    "blend_alpha_target": "blending coefficient value required at 70% of the window",
    "follower_tau": "first-order lag time constant [s] of the kinematic follower",
    "deviation_position_bound": "ghost deviation warning bound [m]",
    "deviation_orientation_bound": "ghost deviation warning bound [rad]",
    "sample_rate": "reference sampling and observation decimation rate [Hz]",
    "speed_scale": "execution speed multiplier applied to the proposal duration",
    "port": "service TCP port",
    "host": "service bind address",
    "manifest": "path to the object-class registry manifest",
}


@dataclass
class AssistConfig:
    ridge_lambda: float = 1e-12
    basis_count: int = 20
    basis_bandwidth: float = 1.0 / 19.0
    window_fraction: float = 1.0 / 3.0
    onset_threshold: float = 0.03
    observation_noise: float = 1e-6
    blend_fraction: float = 0.3
    blend_alpha_target: float = 0.85
    follower_tau: float = 0.15
    deviation_position_bound: float = 0.02
    deviation_orientation_bound: float = 0.1
    sample_rate: float = 50.0
    speed_scale: float = 1.0
    port: int = 8765
    host: str = "127.0.0.1"
    manifest: str = ""

    def to_dict(self) -> dict:
        return asdict(self)

    def dumps(self) -> str:
        lines = []
        for f in fields(self):
            comment = _FIELD_COMMENTS.get(f.name)
            if comment:
                lines.append(f"# {comment}")
            lines.append(f"{f.name} = {getattr(self, f.name)!r}")
        return "\n".join(lines) + "\n"

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())

    @staticmethod
    def loads(text: str, location: str = "<string>") -> "AssistConfig":
        known = {f.name: f for f in fields(AssistConfig)}
        values = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ParseError("expected 'key = value'", f"{location}:{lineno}")
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in known:
                raise ParseError(f"unknown setting {key!r}", f"{location}:{lineno}")
            try:
                parsed = ast.literal_eval(value.strip())
            except (ValueError, SyntaxError):
                parsed = value.strip()
            values[key] = parsed
        return AssistConfig(**values)

    @staticmethod
    def load(path) -> "AssistConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return AssistConfig.loads(fh.read(), location=str(path))
