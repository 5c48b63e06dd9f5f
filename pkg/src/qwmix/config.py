"""Run configuration shared by the harness and the command line."""

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from ._io import dumps_json

SCHEMA_VERSION = 1

# config-file section for each field
_SECTIONS = {
    "graph": ("n", "p", "seed", "rate"),
    "walk": ("epsilon", "start", "t_min", "per_decade", "mixing"),
    "constants": ("C", "c", "rigidity_epsilon"),
    "ensemble": ("n_list", "seed_count", "spot_p", "spot_n", "spot_seed_count", "jobs"),
    "output": ("out",),
}


@dataclass
class RunConfig:
    n: int = 256
    p: float = 0.5
    seed: int = 0
    rate: str = "np"
    epsilon: float = 0.1
    start: str = "0"
    t_min: float = 0.1
    per_decade: int = 256
    mixing: bool = True
    C: float = 10.0
    c: float = 0.1
    rigidity_epsilon: float = 0.1
    n_list: list = field(default_factory=lambda: [256, 512, 1024, 2048])
    seed_count: int = 10
    spot_p: list = field(default_factory=lambda: [0.1, 0.3, 0.7, 0.9])
    spot_n: int = 512
    spot_seed_count: int = 3
    jobs: int = 1
    out: str = "out"
    schema_version: int = SCHEMA_VERSION

    def validate(self):
        """Raise ``ValueError`` naming the offending field."""
        if self.n < 1:
            raise ValueError(f"--n must be >= 1, got {self.n}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"--p must lie in [0, 1], got {self.p}")
        if self.seed < 0:
            raise ValueError(f"--seed must be non-negative, got {self.seed}")
        if not 0.0 < self.epsilon < 2.0:
            raise ValueError(f"--epsilon must lie in (0, 2), got {self.epsilon}")
        if self.rate not in ("np", "norm"):
            raise ValueError(f"--rate must be 'np' or 'norm', got {self.rate!r}")
        if self.start != "uniform":
            try:
                node = int(self.start)
            except ValueError:
                raise ValueError(f"--start must be a node index or 'uniform', got {self.start!r}")
            if node < 0:
                raise ValueError(f"--start must be non-negative, got {node}")
        if self.t_min <= 0:
            raise ValueError(f"--t-min must be positive, got {self.t_min}")
        if self.per_decade < 1:
            raise ValueError(f"--per-decade must be positive, got {self.per_decade}")
        if self.C <= 0 or self.c <= 0:
            raise ValueError("--C and --c must be positive")
        if self.rigidity_epsilon < 0:
            raise ValueError(f"--rigidity-epsilon must be >= 0, got {self.rigidity_epsilon}")
        if self.seed_count < 1:
            raise ValueError(f"--seed-count must be >= 1, got {self.seed_count}")
        if list(self.n_list) != sorted(self.n_list) or any(k < 2 for k in self.n_list):
            raise ValueError(f"--n-list must be ascending with entries >= 2, got {self.n_list}")
        if any(not 0.0 < q <= 1.0 for q in self.spot_p):
            raise ValueError(f"--spot-p entries must lie in (0, 1], got {self.spot_p}")
        if self.jobs < 1:
            raise ValueError(f"--jobs must be >= 1, got {self.jobs}")
        return self

    def to_dict(self):
        flat = asdict(self)
        out = {"schema_version": flat.pop("schema_version")}
        for section, keys in _SECTIONS.items():
            out[section] = {k: flat[k] for k in keys}
        return out

    @classmethod
    def from_dict(cls, data):
        version = data.get("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ValueError(f"unsupported config schema_version {version}")
        known = {f.name for f in fields(cls)}
        flat = {}
        for key, value in data.items():
            if key == "schema_version":
                continue
            if isinstance(value, dict) and key in _SECTIONS:
                for k, v in value.items():
                    if k not in known:
                        raise ValueError(f"unknown config key {key}.{k}")
                    flat[k] = v
            elif key in known:
                flat[key] = value
            else:
                raise ValueError(f"unknown config key {key!r}")
        return cls(**flat)

    def dumps(self):
        return dumps_json(self.to_dict()) + "\n"

    @classmethod
    def loads(cls, text):
        return cls.from_dict(json.loads(text))

    def save(self, path):
        Path(path).write_text(self.dumps())

    @classmethod
    def load(cls, path):
        return cls.loads(Path(path).read_text())
