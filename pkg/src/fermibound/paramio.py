"""Parameter-file serialization.

Converged solver parameters are stored as JSON so that later runs can
warm start from them.  The file carries the embedding signature plus
the representative moments both as the raw coordinate vector and as
(key, value) pairs; the latter lets a run at a different ring size
transplant matching moments without rebuilding the source embedding.

Format (version 1):

    {
      "format": "fermibound-params",
      "version": 1,
      "signature": <nested list form of the embedding signature>,
      "n_sites": int, "level": str, "symmetry": str,
      "params": [float, ...],
      "reps": [[[site, dagger], ...], ...],
      "values": [[re, im], ...]        # aligned with "reps"
    }
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .algebra import Monomial

FORMAT_NAME = "fermibound-params"
FORMAT_VERSION = 1


def signature_to_json(sig):
    if isinstance(sig, tuple):
        return [signature_to_json(s) for s in sig]
    return sig


def signature_from_json(obj):
    if isinstance(obj, list):
        return tuple(signature_from_json(s) for s in obj)
    return obj


@dataclass(frozen=True)
class ParamFile:
    signature: tuple
    n_sites: int
    level: str
    symmetry: str
    params: np.ndarray
    rep_values: dict[Monomial, complex]


def save_params(path: str, embedding, params: np.ndarray) -> None:
    """Write a parameter vector tagged with its embedding's identity."""
    params = np.asarray(params, dtype=float)
    if params.shape != (embedding.n_params,):
        raise ValueError("parameter vector does not fit the embedding")
    values = embedding.table.rep_values(params)
    payload = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "signature": signature_to_json(embedding.signature),
        "n_sites": embedding.n_sites,
        "level": embedding.level,
        "symmetry": embedding.symmetry,
        "params": params.tolist(),
        "reps": [
            [[site, bool(dag)] for site, dag in rep] for rep in embedding.table.reps
        ],
        "values": [[v.real, v.imag] for v in values],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


def load_params(path: str) -> ParamFile:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("format") != FORMAT_NAME:
        raise ValueError(f"{path} is not a {FORMAT_NAME} file")
    if payload.get("version") != FORMAT_VERSION:
        raise ValueError(f"unsupported parameter file version {payload.get('version')}")
    reps = [
        tuple((int(site), bool(dag)) for site, dag in rep) for rep in payload["reps"]
    ]
    values = [complex(re, im) for re, im in payload["values"]]
    return ParamFile(
        signature=signature_from_json(payload["signature"]),
        n_sites=int(payload["n_sites"]),
        level=str(payload["level"]),
        symmetry=str(payload["symmetry"]),
        params=np.asarray(payload["params"], dtype=float),
        rep_values=dict(zip(reps, values)),
    )
