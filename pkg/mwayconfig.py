import os
import yaml
from typing import Dict, List, Any, Optional
from dataclasses import dataclass, asdict, field

from simpleLogger import CHATTY, DEBUG, INFO, WARN, ERROR, CRITICAL  # noqa: F401

""" Engine configuration.
    EngineConfig collects the limits and knobs shared by all commands. It is built from
    the 'engine' and 'palette' blocks of a YAML file, then the MULTIWAY_MAX_STATES
    environment variable, then explicit command line values (param_overrides).
"""

# ============================================================================
ENV_MAX_STATES = 'MULTIWAY_MAX_STATES'

# Edge colors follow the usual multiway figure conventions
_default_palette = {
    'evolution': 'gray',
    'causal':    'orange',
    'level1':    'purple',
    'level2':    'orange',
    'level3':    'blue',
    'branchial': 'teal',
}

_engine_fields = ["max_states", "workers", "path_cap", "ancestor_depth",
                  "max_rules", "max_iters", "interreduce", "unanchored", "seed"]

# ============================================================================
def check_params(params_data: Dict[str, Any], required: List[str], optional: List[str] ) -> bool:
    """
    Check that all required parameters are present, and no unexpected ones.
    """
    check_clean = True
    for f in required:
        if f not in params_data:
            raise ValueError(f"Missing required field '{f}'.")
    # Iterate over a copy since we are deleting fields
    if optional:
        for f in params_data.copy():
            if f not in optional + required:
                WARN( f"Unexpected field '{f}' in params. Removing, but you should clean up the yaml")
                check_clean = False
                del params_data[f]

    return check_clean

# ============================================================================
@dataclass( frozen = True )
class EngineConfig:
    max_states:     Optional[int] = 200000  # None for no cap
    workers:        int  = 1
    path_cap:       int  = 1000     # single-way histories in the causal invariance check
    ancestor_depth: int  = 1
    max_rules:      int  = 50
    max_iters:      int  = 50
    interreduce:    bool = True
    unanchored:     bool = False
    seed:           int  = 0
    palette:        Dict[str, str] = field(default_factory=lambda: dict(_default_palette))

    # ------------------------------------------------
    def __post_init__(self):
        if self.max_states is not None and self.max_states < 1:
            raise ValueError(f"max_states must be positive, got {self.max_states}")
        for name in ("workers", "path_cap", "max_rules", "max_iters"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1, got {getattr(self, name)}")
        if self.ancestor_depth < 1:
            raise ValueError(f"ancestor_depth must be at least 1, got {self.ancestor_depth}")

    # ------------------------------------------------
    def dict(self) -> Dict[str, Any]:
        return asdict(self)

    def color(self, kind: str, level: int = 0) -> str:
        if kind == 'evolution' and level >= 1:
            kind = f"level{min(level, 3)}"
        return self.palette.get(kind, self.palette['evolution'])

    # ------------------------------------------------
    @classmethod
    def from_yaml(cls,
                  yaml_file: str, #  Used for messages
                  yaml_data: Optional[Dict[str, Any]],
                  param_overrides=None,
                  ) -> "EngineConfig":
        """
        Constructs an EngineConfig from a YAML data dictionary.

        Args:
            yaml_data: The dictionary loaded from the YAML file (may be empty).
            param_overrides: A dictionary (usually originating from argparse); None values are ignored.

        Returns:
            An EngineConfig object.
        """
        yaml_data = dict(yaml_data or {})
        check_params(yaml_data, required=[], optional=["engine", "palette"])

        engine_data = dict(yaml_data.get("engine") or {})
        check_params(engine_data, required=[], optional=list(_engine_fields))

        palette = dict(_default_palette)
        palette_data = dict(yaml_data.get("palette") or {})
        check_params(palette_data, required=[], optional=list(_default_palette))
        palette.update({k: str(v) for k, v in palette_data.items()})

        env_cap = os.environ.get(ENV_MAX_STATES)
        if env_cap:
            try:
                engine_data["max_states"] = int(env_cap)
            except ValueError:
                raise ValueError(f"{ENV_MAX_STATES}={env_cap!r} is not an integer")
            DEBUG(f"State cap {env_cap} from {ENV_MAX_STATES}")

        for k, v in (param_overrides or {}).items():
            if k in _engine_fields and v is not None:
                engine_data[k] = v

        for k in ("interreduce", "unanchored"):
            if k in engine_data and not isinstance(engine_data[k], bool):
                raise ValueError(f"'{k}' in {yaml_file or 'configuration'} must be true or false")

        CHATTY(f"Engine configuration from {yaml_file or 'defaults'}: {engine_data}")
        return cls(palette=palette, **engine_data)

    # ------------------------------------------------
    @classmethod
    def from_yaml_file(cls, yaml_file: Optional[str], param_overrides=None) -> "EngineConfig":
        if not yaml_file:
            return cls.from_yaml(yaml_file="", yaml_data={}, param_overrides=param_overrides)
        try:
            with open(yaml_file, "r") as yamlstream:
                yaml_data = yaml.safe_load(yamlstream)
        except yaml.YAMLError as exc:
            raise ValueError(f"Error parsing YAML file: {exc}")
        except FileNotFoundError:
            raise FileNotFoundError(f"YAML file not found: {yaml_file}")

        if yaml_data is not None and not isinstance(yaml_data, dict):
            raise ValueError(f"{yaml_file} must hold a mapping at top level")
        return cls.from_yaml(yaml_file=yaml_file, yaml_data=yaml_data, param_overrides=param_overrides)

