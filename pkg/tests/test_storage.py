import json
from fractions import Fraction

import numpy as np
import pytest

from core.errors import InvalidParams
from core.storage import (
    ReportStorage,
    distribution_rows,
    dumps_json,
    format_decimal,
    format_rational,
    tail_rows,
    to_serializable,
)


def test_format_rational():
    assert format_rational(Fraction(25, 12)) == "25/12"
    assert format_rational(Fraction(-6, 3)) == "-2"
    assert format_rational(0) == "0"


def test_format_decimal_round_trips():
    assert float(format_decimal(Fraction(1, 3))) == 1 / 3


def test_to_serializable_handles_numpy_and_fractions():
    data = to_serializable({1: Fraction(1, 5), "arr": np.arange(3), "x": np.float64(0.5), "n": np.int64(4)})
    assert data == {"1": "1/5", "arr": [0, 1, 2], "x": 0.5, "n": 4}
    with pytest.raises(TypeError):
        to_serializable(object())


def test_json_is_deterministic():
    payload = {"probs": {3: Fraction(4, 5), 1: Fraction(1, 5)}, "n": 6}
    text = dumps_json(payload)
    assert text == dumps_json(dict(reversed(list(payload.items()))))
    assert text.endswith("\n")
    assert json.loads(text)["probs"] == {"1": "1/5", "3": "4/5"}


def test_csv_export(tmp_path):
    storage = ReportStorage(str(tmp_path))
    rows = distribution_rows({1: Fraction(1, 5), 3: Fraction(4, 5)})
    rows.append({"t": 5, "probability": "0", "decimal": "a,b"})
    path = storage.export("dist", "csv", payload=None, rows=rows)
    raw = path.read_bytes()
    assert raw.startswith(b"t,probability,decimal\r\n")
    assert b"1,1/5,0.2\r\n" in raw
    assert b'"a,b"' in raw


def test_tail_rows_exact_and_empirical():
    exact = tail_rows([1, 3], {1: Fraction(1), 3: Fraction(4, 5)}, {1: Fraction(3), 3: Fraction(2)}, observed_key="exact")
    assert exact[1] == {"t": 3, "exact": "4/5", "bound": "2", "bound_decimal": "2.0"}
    emp = tail_rows([1], {1: 0.25}, {1: Fraction(1, 2)})
    assert emp[0]["empirical"] == "0.25"


def test_resolve(tmp_path):
    storage = ReportStorage(str(tmp_path / "reports"))
    assert storage.resolve("x", "json") == tmp_path / "reports" / "x.json"
    assert storage.resolve("x", "csv", str(tmp_path / "out")) == tmp_path / "out" / "x.csv"
    assert storage.resolve("x", "json", str(tmp_path / "r.json")) == tmp_path / "r.json"
    with pytest.raises(InvalidParams):
        storage.resolve("x", "xml")


def test_json_export_creates_parents(tmp_path):
    storage = ReportStorage(str(tmp_path))
    path = storage.export("r", "json", {"v": Fraction(2, 3)}, rows=[], out=str(tmp_path / "a" / "b"))
    assert path.read_text(encoding="utf-8") == '{\n  "v": "2/3"\n}\n'
