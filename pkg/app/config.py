"""
Environment-driven settings and logging setup.

Values come from a .env file (python-dotenv) and the process environment;
command-line flags override them.
"""
import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import List, Mapping, Optional, Tuple

from dotenv import load_dotenv

from netlist import ConfigError, GateCostModel

TOOL_NAME = "dadda-netlist"
TOOL_VERSION = "1.0.0"

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

ENV_VARS = (
    "MULT_OUT_DIR",
    "MULT_VECTORS",
    "MULT_SEED",
    "MULT_WORKERS",
    "MULT_COST_MODEL",
    "MULT_LOG_LEVEL",
    "MULT_LOG_FILE",
)


@dataclass(frozen=True)
class Settings:
    out_dir: Path = Path("out")
    vectors: int = 1000
    seed: int = 0
    workers: int = 1
    cost_model_path: Optional[Path] = None
    log_level: str = "INFO"
    log_file: Optional[Path] = None

    def cost_model(self) -> GateCostModel:
        if self.cost_model_path is None:
            return GateCostModel.default()
        return GateCostModel.from_file(self.cost_model_path)


def _env_int(env: Mapping[str, str], name: str, default: int, minimum: int) -> int:
    raw = env.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw.strip())
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {raw!r}") from None
    if value < minimum:
        raise ConfigError(f"{name} must be at least {minimum}, got {value}")
    return value


def load_settings(env: Optional[Mapping[str, str]] = None) -> Settings:
    """
    Read settings from the environment.

    :param env: mapping to read instead of os.environ (the .env file is only
        loaded when reading the real environment)
    """
    if env is None:
        load_dotenv()
        env = os.environ

    level = env.get("MULT_LOG_LEVEL", "INFO").strip().upper() or "INFO"
    if not isinstance(logging.getLevelName(level), int):
        raise ConfigError(f"MULT_LOG_LEVEL must be a logging level name, got {level!r}")
    cost_model = env.get("MULT_COST_MODEL", "").strip()
    log_file = env.get("MULT_LOG_FILE", "").strip()

    return Settings(
        out_dir=Path(env.get("MULT_OUT_DIR", "").strip() or "out"),
        vectors=_env_int(env, "MULT_VECTORS", 1000, 0),
        seed=_env_int(env, "MULT_SEED", 0, 0),
        workers=_env_int(env, "MULT_WORKERS", 1, 1),
        cost_model_path=Path(cost_model) if cost_model and cost_model != "default" else None,
        log_level=level,
        log_file=Path(log_file) if log_file else None,
    )


def setup_logging(settings: Settings) -> None:
    """Configure the root logger once, optionally mirroring to a log file."""
    handlers: List[logging.Handler] = [logging.StreamHandler()]
    if settings.log_file is not None:
        handlers.append(logging.FileHandler(settings.log_file))
    logging.basicConfig(level=settings.log_level, format=LOG_FORMAT, handlers=handlers)


def describe_environment(env: Optional[Mapping[str, str]] = None) -> List[Tuple[str, str]]:
    """(variable, value or 'not set') for every MULT_* variable."""
    if env is None:
        load_dotenv()
        env = os.environ
    return [(name, env[name] if env.get(name) else "not set") for name in ENV_VARS]
