"""Table, record and manifest exports for pipeline outputs"""
import hashlib
import json
import logging
import platform
from importlib import metadata
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Union

import pandas as pd
from pydantic import BaseModel

from config.settings import STRAIN_SIG_DIGITS
from models.report import RunManifest

logger = logging.getLogger(__name__)

Rows = Union[pd.DataFrame, Sequence[BaseModel], Sequence[dict]]

# Packages whose versions are stamped into every manifest
TRACKED_PACKAGES = ["numpy", "scipy", "pandas", "pydantic", "openpyxl", "python-dotenv"]

# Excel sheet name limit
_MAX_SHEET_NAME = 31


def records_to_dataframe(records: Rows, columns: Optional[List[str]] = None) -> pd.DataFrame:
    """
    Convert pydantic models or plain dicts to a DataFrame

    Args:
        records: Models, dicts, or an existing DataFrame
        columns: Optional column order (missing columns are created empty)

    Returns:
        pandas DataFrame with one row per record
    """
    if isinstance(records, pd.DataFrame):
        frame = records.copy()
    else:
        data = [r.model_dump(mode="json") if isinstance(r, BaseModel) else dict(r) for r in records]
        frame = pd.DataFrame(data)
    if columns is not None:
        frame = frame.reindex(columns=columns)
    return frame


def _float_format(sig_digits: int) -> str:
    return f"%.{sig_digits}g"


def export_to_csv(records: Rows, output_path, sig_digits: int = STRAIN_SIG_DIGITS,
                  columns: Optional[List[str]] = None) -> str:
    """
    Write a table as CSV with floats rendered to a fixed number of significant digits

    Args:
        records: Rows to write
        output_path: Target file (a .csv suffix is added when absent)
        sig_digits: Significant digits for floats
        columns: Optional column order

    Returns:
        Path of the written file
    """
    path = Path(output_path)
    if path.suffix != ".csv":
        path = path.with_suffix(".csv")
    path.parent.mkdir(parents=True, exist_ok=True)

    frame = records_to_dataframe(records, columns)
    frame.to_csv(path, index=False, float_format=_float_format(sig_digits))
    logger.debug("wrote %d rows to %s", len(frame), path)
    return str(path)


def _safe_sheet_name(name: str) -> str:
    safe = "".join(c if c.isalnum() or c in (" ", "-", "_") else "_" for c in name)
    return safe[:_MAX_SHEET_NAME] or "Sheet"


def export_to_excel(sheets: Dict[str, Rows], output_path, sig_digits: int = STRAIN_SIG_DIGITS) -> str:
    """
    Export several tables to a single Excel workbook, one sheet per table

    Args:
        sheets: Sheet name -> rows
        output_path: Target file (suffix replaced with .xlsx)
        sig_digits: Significant digits for floats

    Returns:
        Path of the workbook
    """
    if not sheets:
        raise ValueError("No tables to export")

    path = Path(output_path).with_suffix(".xlsx")
    path.parent.mkdir(parents=True, exist_ok=True)

    with pd.ExcelWriter(path, engine="openpyxl") as writer:
        for name, rows in sheets.items():
            frame = records_to_dataframe(rows)
            frame.to_excel(writer, sheet_name=_safe_sheet_name(name), index=False,
                           float_format=_float_format(sig_digits))
    return str(path)


def export_records_jsonl(records: Iterable[BaseModel], output_path) -> str:
    """Write one model_dump(mode="json") document per line"""
    path = Path(output_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    n = 0
    with open(path, "w", encoding="utf-8") as f:
        for record in records:
            f.write(json.dumps(record.model_dump(mode="json"), sort_keys=True))
            f.write("\n")
            n += 1
    logger.debug("wrote %d records to %s", n, path)
    return str(path)


def file_sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def package_versions() -> Dict[str, str]:
    versions = {"python": platform.python_version()}
    for name in TRACKED_PACKAGES:
        try:
            versions[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            versions[name] = "not installed"
    return versions


def write_manifest(
    output_dir,
    command: str,
    config: Dict[str, object],
    inputs: Iterable = (),
    outputs: Iterable[str] = (),
    schemas: Optional[Dict[str, dict]] = None,
) -> str:
    """
    Record what produced a set of outputs

    Args:
        output_dir: Directory receiving manifest.json
        command: CLI subcommand or workflow stage
        config: Effective configuration values
        inputs: Input files to hash (missing files are skipped)
        outputs: Output files written by the stage
        schemas: JSON schemas of the record types the stage serializes

    Returns:
        Path of manifest.json
    """
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    hashes = {}
    for path in inputs:
        path = Path(path)
        if path.exists():
            hashes[path.name] = file_sha256(path)

    manifest = RunManifest(
        command=command,
        config=config,
        input_hashes=hashes,
        versions=package_versions(),
        outputs=sorted(Path(o).name for o in outputs),
        schemas=schemas or {},
    )
    path = out / "manifest.json"
    path.write_text(manifest.model_dump_json(indent=2), encoding="utf-8")
    return str(path)


__all__ = [
    "records_to_dataframe",
    "export_to_csv",
    "export_to_excel",
    "export_records_jsonl",
    "file_sha256",
    "package_versions",
    "write_manifest",
]
