from __future__ import annotations

import io
import json

import pytest

from brzeta import checks
from brzeta.checks import CheckOutcome
from brzeta.cli import (EXIT_CHECK, EXIT_ERROR, EXIT_OK, ForestParseError, format_forest_text,
                        parse_forest, parse_point, run)


@pytest.fixture(autouse=True)
def cache_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("BRZETA_CACHE_DIR", str(tmp_path / "cache"))
    return tmp_path / "cache"


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_flatten_example():
    code, out, _ = call("flatten", "T(s=1)[T(s=2),T(s=3)]")
    assert code == EXIT_OK
    assert out.splitlines()[0] == "(1,2,3) + (1,3,2) + 1·(1,5)"


def test_flatten_json_and_lambda():
    code, out, _ = call("flatten", "T(s=1)[T(s=2),T(s=3)]", "--json", "--lambda", "-1")
    data = json.loads(out)
    assert data["lambda"] == -1
    assert sorted((w["coefficient"], w["weights"]) for w in data["words"]) == \
        [("-1", "(1,5)"), ("1", "(1,2,3)"), ("1", "(1,3,2)")]
    code, out0, _ = call("flatten", "T(s=1)[T(s=2)]", "--lambda", "0")
    assert out0.splitlines()[0] == "(1,2)"


@pytest.mark.parametrize("text", ["T(s=2)", "T(s=2)[T(s=3),T(l=5,s=-1)]",
                                  "T(s=1/2)[T(s=0)[T(s=-3)]],T(s=4)", "T(l=3,s=1),T(l=1,s=2)"])
def test_parse_format_round_trip(text):
    F = parse_forest(text)
    assert parse_forest(format_forest_text(F)) == F
    assert format_forest_text(parse_forest(format_forest_text(F))) == format_forest_text(F)


def test_parse_errors_carry_positions():
    with pytest.raises(ForestParseError) as e:
        parse_forest("T(s=1)[T(s=2)")
    assert e.value.position == 13
    with pytest.raises(ForestParseError) as e:
        parse_forest("T(l=1,s=1),T(l=1,s=2)")
    assert "duplicate label" in str(e.value)
    with pytest.raises(ForestParseError):
        parse_forest("T(l=1)")
    code, _, err = call("flatten", "T(q=1)")
    assert code == EXIT_ERROR and "position" in err


def test_parse_point():
    assert parse_point("0.1,0.2") == {1: 0.1, 2: 0.2}
    assert parse_point("1=0.5, 3=1+2i") == {1: 0.5, 3: 1 + 2j}


def test_zeta_renormalised_exact_json_is_stable(cache_dir):
    argv = ("zeta", "T(s=-1)[T(s=-2)]", "--renormalise", "--mode", "exact", "--json")
    code1, out1, _ = call(*argv)
    assert code1 == EXIT_OK
    data = json.loads(out1)
    assert data["result"]["mode"] == "exact"
    assert data["result"]["checks"]["rational"]
    code2, out2, _ = call(*argv)
    assert out1 == out2
    for f in cache_dir.glob("*.json"):
        f.unlink()
    assert call(*argv)[1] == out1


def test_zeta_value_and_germ():
    code, out, _ = call("zeta", "T(s=-1)", "--renormalise")
    assert code == EXIT_OK and "-1/12" in out
    code, out, _ = call("zeta", "T(s=2)", "--at", "0.1")
    assert code == EXIT_OK and "germ at 0.1" in out
    code, out, _ = call("zeta", "T(s=0)[T(s=-1)]")
    assert "regularised germ [exact]" in out


def test_bad_arguments_exit_one():
    assert call("zeta", "T(s=-1)", "--lambda", "0")[0] == EXIT_ERROR
    assert call("zeta", "T(s=-1)", "--K", "1")[0] == EXIT_ERROR
    assert call("zeta", "T(s=-1)", "--Q-file", "/nonexistent.json")[0] == EXIT_ERROR
    assert call("nonsense")[0] == EXIT_ERROR


def test_check_suites(monkeypatch):
    code, out, _ = call("check", "--suite", "germ")
    assert code == EXIT_OK and out.count("PASS") == 3
    monkeypatch.setitem(checks.SUITES, "germ", lambda rng: [CheckOutcome("germ", "broken", False)])
    code, out, _ = call("check", "--suite", "germ", "--json")
    assert code == EXIT_CHECK and json.loads(out)["passed"] is False


def test_cache_list_and_clear(cache_dir):
    call("zeta", "T(s=-2)", "--renormalise")
    code, out, _ = call("cache", "list", "--json")
    data = json.loads(out)
    assert code == EXIT_OK and len(data["entries"]) == 1
    assert data["entries"][0]["request"]["forest"] == "T(s=-2)"
    code, out, _ = call("cache", "clear")
    assert "removed 1" in out
    assert json.loads(call("cache", "list", "--json")[1])["entries"] == []
