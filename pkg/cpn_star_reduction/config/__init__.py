"""Load environment defaults for the star-product CLI.

Usage:
    from config import STAR_DEFAULT_N, STAR_DEFAULT_ORDER, STAR_DEFAULT_MU
"""
from pathlib import Path
from fractions import Fraction
import os
from dotenv import load_dotenv

# Locate .env (or env.example) one level above this package
_base_dir = Path(__file__).resolve().parent.parent
_load_path = _base_dir / ".env"
if _load_path.exists():
    load_dotenv(_load_path)
else:
    # Fallback to env.example so developers see which vars exist
    example_path = _base_dir / "env.example"
    if example_path.exists():
        load_dotenv(example_path)

_invalid = []


def _int_var(name: str, default: int, minimum: int) -> int:
    raw = os.getenv(name, "").strip()
    if not raw:
        return default
    try:
        value = int(raw)
    except ValueError:
        _invalid.append(f"{name}={raw!r} (expected an integer)")
        return default
    if value < minimum:
        _invalid.append(f"{name}={raw!r} (must be >= {minimum})")
        return default
    return value


def _mu_var(name: str, default: str) -> str:
    raw = os.getenv(name, "").strip() or default
    try:
        if Fraction(raw) >= 0:
            _invalid.append(f"{name}={raw!r} (mu must be negative)")
            return default
    except (ValueError, ZeroDivisionError):
        _invalid.append(f"{name}={raw!r} (expected a rational like -1/2)")
        return default
    return raw


STAR_DEFAULT_N: int = _int_var("STAR_DEFAULT_N", 1, 1)
STAR_DEFAULT_ORDER: int = _int_var("STAR_DEFAULT_ORDER", 4, 1)
STAR_DEFAULT_MU: str = _mu_var("STAR_DEFAULT_MU", "-1/2")
STAR_DEFAULT_SEED: int = _int_var("STAR_DEFAULT_SEED", 0, 0)
STAR_BASIS_DEGREE: int = _int_var("STAR_BASIS_DEGREE", 1, 1)
STAR_LOG_LEVEL: str = (os.getenv("STAR_LOG_LEVEL", "").strip() or "WARNING").upper()
STAR_LOG_DIR: str | None = os.getenv("STAR_LOG_DIR") or None

if STAR_LOG_LEVEL not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
    _invalid.append(f"STAR_LOG_LEVEL={STAR_LOG_LEVEL!r}")

if _invalid:
    invalid_str = ", ".join(_invalid)
    raise RuntimeError(
        f"Invalid environment variables: {invalid_str}.\n"
        "Fix your .env file (see env.example) or unset the variables."
    )
