from __future__ import annotations

import json

from brzeta.cache import ENV_VAR, Cache, cache_key, canonical_json, resolve_cache_dir


def test_round_trip(tmp_path):
    c = Cache(tmp_path / "c")
    req = {"forest": "T(s=-1)", "b": [1, 2]}
    assert c.get(req) is None
    key = c.put(req, {"value": "-1/12"})
    assert key == cache_key({"b": [1, 2], "forest": "T(s=-1)"})
    assert c.get(req) == {"value": "-1/12"}
    assert not list((tmp_path / "c").glob("*.tmp"))


def test_corrupt_or_foreign_entries_are_misses(tmp_path):
    c = Cache(tmp_path)
    req = {"x": 1}
    c.put(req, 5)
    path = tmp_path / f"{cache_key(req)}.json"
    path.write_text(json.dumps({"request": {"x": 2}, "result": 7}))
    assert c.get(req) is None
    path.write_text("{not json")
    assert c.get(req) is None


def test_entries_and_clear(tmp_path):
    c = Cache(tmp_path)
    assert Cache(tmp_path / "missing").entries() == []
    c.put({"forest": "a"}, 1)
    c.put({"forest": "b"}, 2)
    es = c.entries()
    assert sorted(e["request"]["forest"] for e in es) == ["a", "b"]
    assert c.clear() == 2 and c.entries() == []


def test_env_beats_configured(tmp_path, monkeypatch):
    monkeypatch.setenv(ENV_VAR, str(tmp_path / "env"))
    assert resolve_cache_dir(tmp_path / "cfg") == tmp_path / "env"
    monkeypatch.delenv(ENV_VAR)
    assert resolve_cache_dir(tmp_path / "cfg") == tmp_path / "cfg"
    monkeypatch.setenv("XDG_CACHE_HOME", str(tmp_path / "xdg"))
    assert resolve_cache_dir() == tmp_path / "xdg" / "brzeta"


def test_canonical_json_is_order_free():
    assert canonical_json({"b": 1, "a": [1, {"d": 2, "c": 3}]}) == '{"a":[1,{"c":3,"d":2}],"b":1}'
