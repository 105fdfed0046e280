"""Validation utilities for raw tracking-file values"""
import re
from typing import Iterable, Optional, Tuple

import numpy as np
import pandas as pd

from models.tracking import FIELD_LENGTH, FIELD_WIDTH
from utils.errors import ErrorBudgetExceeded, SchemaError

MISSING_TOKENS = frozenset({"", "NA", "N/A", "NaN", "nan", "None", "NULL", "null"})


def is_missing(value: Optional[str]) -> bool:
    """
    Check whether a raw cell holds no value

    Args:
        value: Raw cell text (or None)

    Returns:
        True for empty cells and the usual NA spellings
    """
    if value is None:
        return True
    if isinstance(value, float) and np.isnan(value):
        return True
    return str(value).strip() in MISSING_TOKENS


def parse_int(value: Optional[str]) -> Optional[int]:
    """Parse an integer cell, tolerating a trailing '.0'; None when missing or malformed"""
    if is_missing(value):
        return None
    text = str(value).strip()
    try:
        return int(text)
    except ValueError:
        try:
            number = float(text)
        except ValueError:
            return None
        return int(number) if number.is_integer() else None


def parse_flag(value: Optional[str]) -> bool:
    """Credit columns hold 1/0, sometimes as floats or booleans"""
    if is_missing(value):
        return False
    text = str(value).strip().lower()
    if text in ("true", "t", "yes"):
        return True
    try:
        return float(text) != 0.0
    except ValueError:
        return False


def parse_id_list(value: Optional[str]) -> list:
    """Split a cell holding one or more player ids"""
    if is_missing(value):
        return []
    ids = []
    for part in re.split(r"[;|,\s]+", str(value).strip()):
        parsed = parse_int(part)
        if parsed is not None:
            ids.append(parsed)
    return ids


def sanitize_text(text: str) -> str:
    """
    Sanitize text by removing control characters and collapsing whitespace

    Args:
        text: Text to sanitize

    Returns:
        Sanitized text
    """
    text = re.sub(r'[\x00-\x1f\x7f-\x9f]', '', text)
    text = re.sub(r'\s+', ' ', text)
    return text.strip()


def numeric_column(values: pd.Series) -> Tuple[pd.Series, pd.Series]:
    """
    Convert a text column to floats

    Returns:
        (floats with NaN for missing/malformed cells, mask of malformed non-missing cells)
    """
    text = values.astype(str).str.strip()
    missing = text.isin(MISSING_TOKENS)
    numbers = pd.to_numeric(text.where(~missing), errors="coerce")
    malformed = numbers.isna() & ~missing
    return numbers, malformed


def out_of_bounds(x: pd.Series, y: pd.Series) -> pd.Series:
    """Mask of positions outside the 120 x 53.3 yard field"""
    return (x < 0) | (x > FIELD_LENGTH) | (y < 0) | (y > FIELD_WIDTH)


def require_columns(columns: Iterable[str], required: Iterable[str], file: str) -> None:
    """
    Raise SchemaError naming the first required column that is absent

    Args:
        columns: Columns present in the file header
        required: Columns the parser needs
        file: File name for the message
    """
    present = set(columns)
    for column in required:
        if column not in present:
            raise SchemaError(f"{file}: missing required column '{column}'")


def check_error_budget(skipped: int, read: int, budget: float, file: str) -> None:
    """Abort when the share of skipped rows exceeds the budget"""
    if read == 0:
        return
    share = skipped / read
    if share > budget:
        raise ErrorBudgetExceeded(
            f"{file}: {skipped} of {read} rows malformed ({share:.4%}), budget is {budget:.4%}"
        )


__all__ = [
    "MISSING_TOKENS",
    "is_missing",
    "parse_int",
    "parse_flag",
    "parse_id_list",
    "sanitize_text",
    "numeric_column",
    "out_of_bounds",
    "require_columns",
    "check_error_budget",
]
