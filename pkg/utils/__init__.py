"""Utilities module"""
from utils.errors import (
    StrainError,
    DataError,
    SchemaError,
    ModelFitError,
)
from utils.validators import (
    is_missing,
    parse_int,
    sanitize_text,
    check_error_budget,
)
from utils.spreadsheet_generator import (
    records_to_dataframe,
    export_to_csv,
    export_to_excel,
    export_records_jsonl,
    write_manifest,
)

__all__ = [
    "StrainError",
    "DataError",
    "SchemaError",
    "ModelFitError",
    "is_missing",
    "parse_int",
    "sanitize_text",
    "check_error_budget",
    "records_to_dataframe",
    "export_to_csv",
    "export_to_excel",
    "export_records_jsonl",
    "write_manifest",
]
