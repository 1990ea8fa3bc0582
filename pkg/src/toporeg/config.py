"""Schema-validated run configuration."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import jsonschema

from .errors import ConfigError
from .optimizer import OptimizerConfig
from .topoloss import TopoLossSpec

VARIANTS = ("ordinary", "topo_only", "regularized")


def schema() -> dict:
    return json.loads(resources.files("toporeg").joinpath("data/run_config.schema.json").read_text())


@dataclass(frozen=True)
class RunConfig:
    experiment: str
    data: Dict[str, Any]
    backend: str
    backend_options: Dict[str, Any] = field(default_factory=dict)
    topo_spec: Optional[TopoLossSpec] = None
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    variants: Tuple[str, ...] = VARIANTS
    variant_overrides: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    out_dir: Optional[str] = None
    base_dir: Path = Path(".")

    def with_optimizer(self, **changes) -> "RunConfig":
        return replace(self, optimizer=replace(self.optimizer, **changes))

    def resolve(self, path: str) -> Path:
        """Input paths are taken relative to the config file."""
        p = Path(path)
        return p if p.is_absolute() else self.base_dir / p


def parse_config(doc, base_dir=".") -> RunConfig:
    """Validate a config document and build a :class:`RunConfig`."""
    try:
        jsonschema.validate(doc, schema())
    except jsonschema.ValidationError as err:
        where = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise ConfigError(f"config invalid at {where}: {err.message}") from None
    spec = doc.get("topo_spec")
    return RunConfig(
        experiment=doc["experiment"],
        data=dict(doc["data"]),
        backend=doc["backend"],
        backend_options=dict(doc.get("backend_options", {})),
        topo_spec=None if spec is None else TopoLossSpec.from_dict(spec),
        optimizer=OptimizerConfig(**doc.get("optimizer", {})),
        variants=tuple(doc.get("variants", VARIANTS)),
        variant_overrides={k: dict(v) for k, v in doc.get("variant_overrides", {}).items()},
        out_dir=doc.get("out_dir"),
        base_dir=Path(base_dir),
    )


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as err:
        raise ConfigError(f"cannot read {path}: {err.strerror}") from None
    except json.JSONDecodeError as err:
        raise ConfigError(f"{path}: invalid JSON ({err.msg})") from None
    return parse_config(doc, path.parent)
