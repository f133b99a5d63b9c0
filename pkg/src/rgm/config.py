"""JSON config schemas for the command-line tool.

Every command reads a single JSON document, optionally patched by
``--override key.path=value`` flags. Configs are validated before
execution; unknown keys are rejected by name so typos fail loudly instead
of silently using defaults.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .discrepancy import SinkhornConfig
from .errors import ConfigError
from .kernels import KernelSpec
from .maps import ACTIVATIONS, LinearSpec, MlpSpec, ModelSpec
from .objective import CONVENTIONS, LagrangeWeights

COMMANDS = ("gen", "train", "eval", "convex", "bounds", "push", "plot")


def load_json(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top-level config must be an object")
    return doc


def apply_overrides(doc: dict, overrides: list[str]) -> dict:
    """Patch ``doc`` with dotted ``key.path=value`` assignments.

    Values parse as JSON when possible and fall back to plain strings.
    """
    out = json.loads(json.dumps(doc))
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        key, raw = item.split("=", 1)
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        node = out
        parts = key.split(".")
        for part in parts[:-1]:
            if part not in node or not isinstance(node[part], dict):
                node[part] = {}
            node = node[part]
        node[parts[-1]] = value
    return out


def _check_keys(doc: dict, where: str, required: set[str], optional: set[str] = frozenset()) -> None:
    unknown = set(doc) - required - set(optional)
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    missing = required - set(doc)
    if missing:
        raise ConfigError(f"{where}: missing keys {sorted(missing)}")


def _number(doc, key, where) -> float:
    v = doc.get(key)
    if not isinstance(v, (int, float)) or isinstance(v, bool):
        raise ConfigError(f"{where}.{key}: expected a number, got {v!r}")
    return float(v)


def _count(doc, key, where, minimum=0) -> int:
    v = doc.get(key)
    if not isinstance(v, int) or isinstance(v, bool) or v < minimum:
        raise ConfigError(f"{where}.{key}: expected an integer >= {minimum}, got {v!r}")
    return v


def _string(doc, key, where) -> str:
    v = doc.get(key)
    if not isinstance(v, str) or not v:
        raise ConfigError(f"{where}.{key}: expected a non-empty string, got {v!r}")
    return v


def parse_kernel(doc: Any, where: str) -> tuple[KernelSpec, bool]:
    """Parse a kernel fragment; returns the spec and its ``fit`` flag.

    ``fit: true`` asks the command to fit standardization on the cloud the
    kernel belongs to before use.
    """
    if not isinstance(doc, dict):
        raise ConfigError(f"{where}: expected an object")
    kind = doc.get("kind")
    base = {"kind", "standardization", "fit"}
    try:
        if kind == "rbf":
            _check_keys(doc, where, {"kind", "divisor"}, base)
            spec = KernelSpec(kind="rbf", divisor=_number(doc, "divisor", where))
        elif kind == "polynomial":
            _check_keys(doc, where, {"kind", "degree", "offset"}, base)
            spec = KernelSpec(
                kind="polynomial",
                degree=_count(doc, "degree", where, minimum=1),
                offset=_number(doc, "offset", where),
            )
        elif kind == "inner_product":
            _check_keys(doc, where, {"kind"}, base)
            spec = KernelSpec(kind="inner_product")
        elif kind in ("mahalanobis", "mahalanobis_inner"):
            _check_keys(doc, where, {"kind", "matrix"}, base)
            matrix = np.asarray(doc.get("matrix"), dtype=float)
            spec = KernelSpec(kind=kind, matrix=tuple(map(tuple, matrix)))
        else:
            raise ConfigError(f"{where}.kind: unknown kernel kind {kind!r}")
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError(f"{where}: {exc}") from None
    std = doc.get("standardization")
    if std is not None:
        _check_keys(std, f"{where}.standardization", {"shift", "scale"})
        spec = KernelSpec(
            kind=spec.kind,
            divisor=spec.divisor,
            degree=spec.degree,
            offset=spec.offset,
            matrix=spec.matrix,
            standardization=(
                _number(std, "shift", f"{where}.standardization"),
                _number(std, "scale", f"{where}.standardization"),
            ),
        )
    fit = bool(doc.get("fit", False))
    if fit and std is not None:
        raise ConfigError(f"{where}: give either a fixed standardization or fit=true, not both")
    return spec, fit


def kernel_to_json(spec: KernelSpec) -> dict:
    doc: dict[str, Any] = {"kind": spec.kind}
    if spec.kind == "rbf":
        doc["divisor"] = spec.divisor
    elif spec.kind == "polynomial":
        doc["degree"] = spec.degree
        doc["offset"] = spec.offset
    elif spec.kind in ("mahalanobis", "mahalanobis_inner"):
        doc["matrix"] = [list(row) for row in spec.matrix]
    if spec.standardization is not None:
        doc["standardization"] = {"shift": spec.standardization[0], "scale": spec.standardization[1]}
    return doc


def parse_model(doc: Any, where: str) -> ModelSpec:
    if not isinstance(doc, dict):
        raise ConfigError(f"{where}: expected an object")
    kind = doc.get("kind")
    if kind == "linear":
        _check_keys(doc, where, {"kind", "in_dim", "out_dim"}, {"bias"})
        return LinearSpec(
            in_dim=_count(doc, "in_dim", where, minimum=1),
            out_dim=_count(doc, "out_dim", where, minimum=1),
            bias=bool(doc.get("bias", False)),
        )
    if kind == "mlp":
        _check_keys(doc, where, {"kind", "dims", "activations"})
        dims = doc.get("dims")
        acts = doc.get("activations")
        if not isinstance(dims, list) or not all(isinstance(d, int) and d >= 1 for d in dims):
            raise ConfigError(f"{where}.dims: expected a list of positive integers")
        if not isinstance(acts, list) or not all(a in ACTIVATIONS for a in acts):
            raise ConfigError(f"{where}.activations: expected a list drawn from {ACTIVATIONS}")
        try:
            return MlpSpec(dims=tuple(dims), activations=tuple(acts))
        except Exception as exc:
            raise ConfigError(f"{where}: {exc}") from None
    raise ConfigError(f"{where}.kind: unknown model kind {kind!r}")


def parse_weights(doc: Any, where: str) -> LagrangeWeights:
    if not isinstance(doc, dict):
        raise ConfigError(f"{where}: expected an object")
    _check_keys(doc, where, {"lambda1", "lambda2", "lambda3"}, {"convention"})
    convention = doc.get("convention", "penalties")
    if convention not in CONVENTIONS:
        raise ConfigError(f"{where}.convention: expected one of {CONVENTIONS}, got {convention!r}")
    try:
        return LagrangeWeights(
            lambda1=_number(doc, "lambda1", where),
            lambda2=_number(doc, "lambda2", where),
            lambda3=_number(doc, "lambda3", where),
            convention=convention,
        )
    except Exception as exc:
        raise ConfigError(f"{where}: {exc}") from None


def parse_penalty(doc: Any, where: str) -> SinkhornConfig | None:
    if doc is None:
        return None
    if not isinstance(doc, dict):
        raise ConfigError(f"{where}: expected an object")
    kind = doc.get("kind")
    if kind == "mmd":
        _check_keys(doc, where, {"kind"})
        return None
    if kind == "sinkhorn":
        _check_keys(doc, where, {"kind", "epsilon"}, {"max_iterations", "tolerance"})
        try:
            return SinkhornConfig(
                epsilon=_number(doc, "epsilon", where),
                max_iterations=_count(doc, "max_iterations", where, minimum=1) if "max_iterations" in doc else 10_000,
                tolerance=_number(doc, "tolerance", where) if "tolerance" in doc else 1e-9,
            )
        except Exception as exc:
            raise ConfigError(f"{where}: {exc}") from None
    raise ConfigError(f"{where}.kind: expected 'mmd' or 'sinkhorn', got {kind!r}")
