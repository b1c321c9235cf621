import json

import numpy as np
import pytest

from fermibound.moments import MomentEmbedding, index_map
from fermibound.paramio import load_params, save_params
from fermibound.ti import TIEmbedding, ti_index_map


def test_roundtrip_dense(tmp_path):
    rng = np.random.default_rng(31)
    emb = MomentEmbedding(index_map(3, "fourth", "number"))
    params = rng.normal(size=emb.n_params)
    path = tmp_path / "params.json"
    save_params(path, emb, params)
    pf = load_params(path)
    assert pf.signature == emb.signature
    assert pf.n_sites == 3
    assert pf.level == "fourth"
    assert pf.symmetry == "number"
    assert np.allclose(pf.params, params, atol=1e-15)


def test_roundtrip_preserves_rep_values(tmp_path):
    rng = np.random.default_rng(37)
    emb = TIEmbedding(ti_index_map(4, "second", "parity"))
    params = rng.normal(size=emb.n_params)
    path = tmp_path / "ti.json"
    save_params(path, emb, params)
    pf = load_params(path)
    stored = emb.table.rep_values(params)
    assert set(pf.rep_values) == set(emb.table.reps)
    for rep, value in zip(emb.table.reps, stored):
        assert abs(pf.rep_values[rep] - value) < 1e-15


def test_file_is_plain_json(tmp_path):
    emb = MomentEmbedding(index_map(2, "second", "parity"))
    path = tmp_path / "p.json"
    save_params(path, emb, np.zeros(emb.n_params))
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    assert payload["format"] == "fermibound-params"
    assert payload["version"] == 1
    assert len(payload["params"]) == emb.n_params
    assert len(payload["reps"]) == len(payload["values"])


def test_wrong_length_rejected(tmp_path):
    emb = MomentEmbedding(index_map(2, "second", "parity"))
    with pytest.raises(ValueError):
        save_params(tmp_path / "bad.json", emb, np.zeros(emb.n_params + 1))


def test_foreign_files_rejected(tmp_path):
    other = tmp_path / "other.json"
    other.write_text('{"format": "something-else", "version": 1}')
    with pytest.raises(ValueError):
        load_params(other)
    stale = tmp_path / "stale.json"
    stale.write_text('{"format": "fermibound-params", "version": 99}')
    with pytest.raises(ValueError):
        load_params(stale)
