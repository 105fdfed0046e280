import pandas as pd
import pytest

from utils.errors import ErrorBudgetExceeded, SchemaError
from utils.validators import (
    check_error_budget,
    is_missing,
    numeric_column,
    out_of_bounds,
    parse_flag,
    parse_id_list,
    parse_int,
    require_columns,
    sanitize_text,
)


@pytest.mark.parametrize("value", [None, "", " NA ", "nan", float("nan"), "NULL"])
def test_is_missing(value):
    assert is_missing(value)


@pytest.mark.parametrize("value, expected", [("7", 7), ("7.0", 7), (" 12 ", 12), ("7.5", None), ("x", None), ("NA", None)])
def test_parse_int(value, expected):
    assert parse_int(value) == expected


@pytest.mark.parametrize("value, expected", [("1", True), ("1.0", True), ("0", False), ("TRUE", True), ("NA", False)])
def test_parse_flag(value, expected):
    assert parse_flag(value) is expected


def test_parse_id_list():
    assert parse_id_list("43335; 52421") == [43335, 52421]
    assert parse_id_list("41233.0") == [41233]
    assert parse_id_list("NA") == []


def test_sanitize_text():
    assert sanitize_text("  Pass   Rush\x00 ") == "Pass Rush"


def test_numeric_column_flags_malformed_cells():
    numbers, malformed = numeric_column(pd.Series(["1.5", "NA", "abc", "2"]))

    assert numbers.tolist()[0] == 1.5 and pd.isna(numbers.tolist()[1])
    assert malformed.tolist() == [False, False, True, False]


def test_out_of_bounds():
    mask = out_of_bounds(pd.Series([10.0, -1.0, 121.0]), pd.Series([20.0, 5.0, 5.0]))

    assert mask.tolist() == [False, True, True]


def test_require_columns():
    require_columns(["a", "b"], ["a"], "plays.csv")
    with pytest.raises(SchemaError, match="'c'"):
        require_columns(["a", "b"], ["a", "c"], "plays.csv")


def test_check_error_budget():
    check_error_budget(1, 100, 0.01, "week1.csv")
    check_error_budget(0, 0, 0.0, "week1.csv")
    with pytest.raises(ErrorBudgetExceeded, match="week1.csv"):
        check_error_budget(2, 100, 0.01, "week1.csv")
