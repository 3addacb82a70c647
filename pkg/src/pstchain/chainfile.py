"""JSON chain files: ``{"n": int, "omega": [...], "lambda": [...], "meta": {...}}``.

Parsing is strict; unknown keys, wrong types and invalid chains are rejected.
Floats are written with Python's shortest round-trip representation.
"""

from __future__ import annotations

import json
import math
import sys
from numbers import Real
from typing import Any

from pstchain.core import ChainSpec
from pstchain.errors import SpinChainError

_REQUIRED = ("n", "omega", "lambda")
_ALLOWED = frozenset(_REQUIRED + ("meta",))


class ChainFileError(SpinChainError, ValueError):
    pass


def chain_to_dict(c: ChainSpec, meta: dict[str, str] | None = None) -> dict[str, Any]:
    data: dict[str, Any] = {
        "n": c.n,
        "omega": [float(w) for w in c.omega],
        "lambda": [float(x) for x in c.lam],
    }
    if meta:
        data["meta"] = dict(meta)
    return data


def _numbers(data, key: str) -> list[float]:
    values = data[key]
    if not isinstance(values, list):
        raise ChainFileError(f"{key!r} must be an array")
    for v in values:
        if isinstance(v, bool) or not isinstance(v, Real) or not math.isfinite(v):
            raise ChainFileError(f"{key!r} entries must be finite numbers, got {v!r}")
    return [float(v) for v in values]


def chain_from_dict(data) -> tuple[ChainSpec, dict[str, str]]:
    if not isinstance(data, dict):
        raise ChainFileError("chain file must contain a JSON object")
    unknown = set(data) - _ALLOWED
    if unknown:
        raise ChainFileError(f"unknown keys: {sorted(unknown)}")
    missing = [k for k in _REQUIRED if k not in data]
    if missing:
        raise ChainFileError(f"missing keys: {missing}")
    n = data["n"]
    if isinstance(n, bool) or not isinstance(n, int):
        raise ChainFileError(f"'n' must be an integer, got {n!r}")
    meta = data.get("meta", {})
    if not isinstance(meta, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in meta.items()
    ):
        raise ChainFileError("'meta' must map strings to strings")
    try:
        chain = ChainSpec(n, _numbers(data, "omega"), _numbers(data, "lambda"))
    except ChainFileError:
        raise
    except ValueError as exc:
        raise ChainFileError(str(exc)) from exc
    return chain, dict(meta)


def dumps_chain(c: ChainSpec, meta: dict[str, str] | None = None) -> str:
    return json.dumps(chain_to_dict(c, meta), indent=2) + "\n"


def loads_chain(text: str) -> tuple[ChainSpec, dict[str, str]]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ChainFileError(f"invalid JSON: {exc}") from exc
    return chain_from_dict(data)


def read_chain(path: str) -> tuple[ChainSpec, dict[str, str]]:
    """Load a chain file; ``-`` reads standard input."""
    if path == "-":
        return loads_chain(sys.stdin.read())
    try:
        with open(path, encoding="utf-8") as fh:
            return loads_chain(fh.read())
    except OSError as exc:
        raise ChainFileError(f"cannot read {path}: {exc}") from exc


def write_chain(path: str, c: ChainSpec, meta: dict[str, str] | None = None) -> None:
    text = dumps_chain(c, meta)
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
