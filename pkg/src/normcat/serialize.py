"""Input documents (schema-validated JSON) and deterministic report output."""
from __future__ import annotations

import json
import math
import sys
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import jsonschema
from jsonschema.exceptions import best_match

from .errors import InputError

KINDS = ("finite_category", "norm_table", "digraph", "metric_space", "lipschitz_map", "ep_pair",
         "sequence_table", "certificate", "functor_expr")
SCHEMA_VERSION = "1"


@dataclass(frozen=True)
class InputDocument:
    kind: str
    version: str
    payload: dict


@lru_cache(maxsize=None)
def schema(name: str) -> dict:
    text = resources.files("normcat").joinpath("schemas", f"{name}.json").read_text("utf-8")
    return json.loads(text)


def _pointer(path) -> str:
    return "".join(f"/{p}" for p in path)


def _validate(instance, name: str, prefix=()) -> None:
    validator = jsonschema.Draft202012Validator(schema(name))
    err = best_match(validator.iter_errors(instance))
    if err is not None:
        ptr = _pointer(list(prefix) + list(err.absolute_path))
        raise InputError(f"schema violation at {ptr or '/'}: {err.message}", pointer=ptr or "/")


def parse_document(data) -> InputDocument:
    _validate(data, "document")
    kind = data["kind"]
    if kind not in KINDS:
        raise InputError(f"unknown document kind {kind!r}", pointer="/kind")
    _validate(data["payload"], kind)
    return InputDocument(kind, data["version"], data["payload"])


def load(path: str) -> InputDocument:
    """Read and validate a document from ``path`` (``-`` for standard input).

    Schema error pointers are relative to the payload.
    """
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return parse_document(data)


def document(kind: str, payload: dict) -> dict:
    return {"kind": kind, "version": SCHEMA_VERSION, "payload": payload}


def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    s = format(x, ".17g")
    if not any(c in s for c in ".en"):
        s += ".0"
    return s


def dumps(obj, indent: int = 2) -> str:
    """JSON with sorted keys, floats at 17 significant digits and INF as ``"inf"``."""
    out: list[str] = []

    def emit(o, level):
        pad = " " * (indent * (level + 1))
        end = " " * (indent * level)
        if isinstance(o, bool) or o is None:
            out.append(json.dumps(o))
        elif isinstance(o, float):
            out.append(_fmt_float(o))
        elif isinstance(o, int):
            out.append(str(o))
        elif isinstance(o, str):
            out.append(json.dumps(o, ensure_ascii=False))
        elif isinstance(o, dict):
            if not o:
                out.append("{}")
                return
            out.append("{\n")
            items = sorted((str(k), v) for k, v in o.items())
            for i, (k, v) in enumerate(items):
                out.append(pad + json.dumps(k, ensure_ascii=False) + ": ")
                emit(v, level + 1)
                out.append(",\n" if i < len(items) - 1 else "\n")
            out.append(end + "}")
        elif isinstance(o, (list, tuple)):
            if not o:
                out.append("[]")
                return
            out.append("[\n")
            for i, v in enumerate(o):
                out.append(pad)
                emit(v, level + 1)
                out.append(",\n" if i < len(o) - 1 else "\n")
            out.append(end + "]")
        elif hasattr(o, "item"):  # numpy scalars
            emit(o.item(), level)
        else:
            out.append(json.dumps(str(o)))

    emit(obj, 0)
    return "".join(out) + "\n"
