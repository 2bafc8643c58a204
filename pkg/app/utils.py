import hashlib
import json
import re
from pathlib import Path
from typing import Tuple, Union

from netlist import ConfigError

VARIANTS = ("regular_cla", "partitioned_cla", "partitioned_hybrid")
PRESET_WIDTHS = (8, 16, 32, 64)


def validate_width(n, minimum: int = 2) -> int:
    """
    Validate an operand width coming from the CLI, a file or the dashboard:
    - Must be an integer (numeric strings are accepted)
    - Must be at least `minimum`
    """
    if isinstance(n, bool):
        raise ConfigError(f"Operand width must be an integer, got {n!r}")
    try:
        value = int(str(n).strip())
    except ValueError:
        raise ConfigError(f"Operand width must be an integer, got {n!r}") from None
    if value < minimum:
        raise ConfigError(f"Operand width must be at least {minimum}, got {value}")
    return value


def normalize_variant(text: str) -> str:
    """
    Normalize a user-facing variant name to its internal form.

    Steps:
    1. Lowercase and trim
    2. Treat '-', ' ' and '_' alike
    3. Check against the known variants

    e.g. 'Partitioned-Hybrid' -> 'partitioned_hybrid'
    """
    if not isinstance(text, str):
        raise ConfigError(f"Variant must be a string, got {text!r}")
    key = re.sub(r"[\s\-_]+", "_", text.strip().lower())
    if key not in VARIANTS:
        raise ConfigError(f"Unknown variant '{text}', expected one of {[v.replace('_', '-') for v in VARIANTS]}")
    return key


def variant_label(variant: str) -> str:
    """Command-line spelling: 'partitioned_hybrid' -> 'partitioned-hybrid'."""
    return normalize_variant(variant).replace("_", "-")


def parse_design_id(text: str) -> Tuple[int, str]:
    """'16:partitioned-hybrid' -> (16, 'partitioned_hybrid')"""
    width, sep, variant = text.partition(":")
    if not sep:
        raise ConfigError(f"Design id '{text}' is not of the form <n>:<variant>")
    return validate_width(width), normalize_variant(variant)


def stable_digest(data) -> str:
    """sha256 of the canonical JSON form of data."""
    text = json.dumps(data, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def file_sha256(path: Union[str, Path]) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()
