"""JSON state-spec files.

A spec is an object ``{"kind": ..., "params": {...}, "children": [...],
"labels": [...]}``. Literal matrices are row-major lists of rows whose
entries are ``[re, im]`` pairs (bare numbers are accepted as real)::

    {"kind": "compose", "children": [{"kind": "bell"}, {"kind": "ghz", "params": {"n": 3}}]}
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .states import KINDS, SpecError, StateSpec
from .tensor import MultipartiteState

PARAMS = {
    "bell": ((), ()),
    "ghz": (("n",), ()),
    "w": (("n",), ()),
    "product-basis": (("dims",), ("indices",)),
    "random-mixed": (("dims", "seed"), ("rank",)),
    "random-pure": (("dims", "seed"), ()),
    "compose": ((), ()),
    "literal": (("matrix",), ("dims",)),
}
TOP_LEVEL = {"kind", "params", "children", "labels"}


class SpecParseError(SpecError):
    """Syntax error in a spec file, with its line and column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line, self.column = line, column


def spec_from_dict(data, path: str = "") -> StateSpec:
    """Structural validation; ``path`` prefixes field names in error messages."""
    where = lambda name: f"{path}{name}"
    if not isinstance(data, dict):
        raise SpecError(f"expected an object, got {type(data).__name__}", path.rstrip(".") or "<root>")
    unknown = set(data) - TOP_LEVEL
    if unknown:
        raise SpecError(f"unknown field(s) {sorted(unknown)}", where(sorted(unknown)[0]))
    kind = data.get("kind")
    if kind is None:
        raise SpecError("missing", where("kind"))
    if kind not in KINDS:
        raise SpecError(f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}", where("kind"))
    params = data.get("params", {})
    if not isinstance(params, dict):
        raise SpecError("expected an object", where("params"))
    required, optional = PARAMS[kind]
    for name in required:
        if name not in params:
            raise SpecError(f"missing for kind '{kind}'", where(f"params.{name}"))
    extra = set(params) - set(required) - set(optional)
    if extra:
        raise SpecError(f"not accepted by kind '{kind}'", where(f"params.{sorted(extra)[0]}"))
    children = data.get("children", [])
    if not isinstance(children, list):
        raise SpecError("expected a list", where("children"))
    if kind == "compose" and not children:
        raise SpecError("compose needs at least one child", where("children"))
    if kind != "compose" and children:
        raise SpecError(f"kind '{kind}' takes no children", where("children"))
    labels = data.get("labels")
    if labels is not None and (not isinstance(labels, list) or not all(isinstance(s, str) for s in labels)):
        raise SpecError("expected a list of strings", where("labels"))
    kids = tuple(spec_from_dict(c, f"{path}children[{i}].") for i, c in enumerate(children))
    return StateSpec(kind, dict(params), kids, None if labels is None else tuple(labels))


def parse_spec(text: str) -> StateSpec:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecParseError(e.msg, e.lineno, e.colno) from None
    return spec_from_dict(data)


def load_spec(path: str | Path) -> StateSpec:
    return parse_spec(Path(path).read_text(encoding="utf-8"))


def spec_to_dict(spec: StateSpec) -> dict:
    out: dict = {"kind": spec.kind}
    if spec.params:
        out["params"] = spec.params
    if spec.children:
        out["children"] = [spec_to_dict(c) for c in spec.children]
    if spec.labels is not None:
        out["labels"] = list(spec.labels)
    return out


def literal_spec(state: MultipartiteState) -> StateSpec:
    """Spec reproducing ``state`` entry by entry."""
    m = np.asarray(state.matrix)
    rows = [[[float(z.real), float(z.imag)] for z in row] for row in m]
    return StateSpec("literal", {"dims": list(state.dims), "matrix": rows}, (), state.labels)
