"""Parametric map families: linear maps and fully connected networks.

Forward evaluation is layerwise affine plus an elementwise activation
(`relu`, `tanh`, or `identity`); reverse mode computes exact parameter and
input gradients. Initialization is Glorot uniform (weights in
``+-sqrt(6 / (fan_in + fan_out))``, zero biases), deterministic given the
seed. The ReLU derivative at 0 is 0.

The optimizer is Adam with bias-corrected moments and a stepwise halving
schedule: the rate at step ``t`` (0-based) is ``initial * 2**-(t // period)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError

ACTIVATIONS = ("relu", "tanh", "identity")


@dataclass(frozen=True)
class LinearSpec:
    in_dim: int
    out_dim: int
    bias: bool = False


@dataclass(frozen=True)
class MlpSpec:
    """Layer sizes ``dims[0] -> dims[1] -> ...`` with one activation per layer.

    ``output_bias=True`` adds a trainable bias vector *after* the last
    activation, so classes like ``x -> tanh(W2 tanh(W1 x + b1)) + b2`` are
    representable exactly.
    """

    dims: tuple[int, ...]
    activations: tuple[str, ...]
    output_bias: bool = False

    def __post_init__(self):
        if len(self.dims) < 2:
            raise DimensionError("an MLP needs at least one layer")
        if len(self.activations) != len(self.dims) - 1:
            raise DimensionError("need exactly one activation per layer")
        for a in self.activations:
            if a not in ACTIVATIONS:
                raise DimensionError(f"unknown activation {a!r}")


ModelSpec = LinearSpec | MlpSpec


@dataclass
class LinearMap:
    weight: np.ndarray  # (out_dim, in_dim)
    bias: np.ndarray | None = None


@dataclass
class MlpLayer:
    weight: np.ndarray  # (out_dim, in_dim)
    bias: np.ndarray  # (out_dim,)
    activation: str


@dataclass
class Mlp:
    layers: list[MlpLayer]


MapModel = LinearMap | Mlp


def init_model(spec: ModelSpec, rng: np.random.Generator) -> MapModel:
    """Glorot-uniform weights, zero biases; deterministic given the seed."""

    def glorot(out_dim, in_dim):
        bound = np.sqrt(6.0 / (in_dim + out_dim))
        return rng.uniform(-bound, bound, size=(out_dim, in_dim))

    if isinstance(spec, LinearSpec):
        bias = np.zeros(spec.out_dim) if spec.bias else None
        return LinearMap(weight=glorot(spec.out_dim, spec.in_dim), bias=bias)
    layers = []
    for k, act in enumerate(spec.activations):
        layers.append(
            MlpLayer(weight=glorot(spec.dims[k + 1], spec.dims[k]), bias=np.zeros(spec.dims[k + 1]), activation=act)
        )
    return Mlp(layers=layers)


def parameters(model: MapModel) -> list[np.ndarray]:
    """Flat list of parameter arrays, in a fixed order."""
    if isinstance(model, LinearMap):
        return [model.weight] if model.bias is None else [model.weight, model.bias]
    out = []
    for layer in model.layers:
        out.extend([layer.weight, layer.bias])
    return out


def input_dim(model: MapModel) -> int:
    if isinstance(model, LinearMap):
        return model.weight.shape[1]
    return model.layers[0].weight.shape[1]


def output_dim(model: MapModel) -> int:
    if isinstance(model, LinearMap):
        return model.weight.shape[0]
    return model.layers[-1].weight.shape[0]


def _activate(name: str, z: np.ndarray) -> np.ndarray:
    if name == "relu":
        return np.maximum(z, 0.0)
    if name == "tanh":
        return np.tanh(z)
    return z


def _activate_grad(name: str, z: np.ndarray, h: np.ndarray) -> np.ndarray:
    if name == "relu":
        return (z > 0.0).astype(float)
    if name == "tanh":
        return 1.0 - h * h
    return np.ones_like(z)


def forward(model: MapModel, x) -> np.ndarray:
    """Apply the map to a batch of row vectors; returns the output batch."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise DimensionError(f"expected a (batch, dim) array, got shape {x.shape}")
    if x.shape[1] != input_dim(model):
        raise DimensionError(f"input dim {x.shape[1]} does not match the model ({input_dim(model)})")
    if isinstance(model, LinearMap):
        out = x @ model.weight.T
        if model.bias is not None:
            out = out + model.bias
        return out
    h = x
    for layer in model.layers:
        h = _activate(layer.activation, h @ layer.weight.T + layer.bias)
    return h


def backward(model: MapModel, x, upstream) -> tuple[list[np.ndarray], np.ndarray]:
    """Gradients of ``sum_b <upstream_b, model(x_b)>`` w.r.t. parameters and input.

    Returns ``(param_grads, input_grad)`` with ``param_grads`` aligned with
    :func:`parameters`.
    """
    x = np.asarray(x, dtype=float)
    upstream = np.asarray(upstream, dtype=float)
    if upstream.shape != (x.shape[0], output_dim(model)):
        raise DimensionError(
            f"upstream shape {upstream.shape} does not match ({x.shape[0]}, {output_dim(model)})"
        )
    if isinstance(model, LinearMap):
        grads = [upstream.T @ x]
        if model.bias is not None:
            grads.append(upstream.sum(axis=0))
        return grads, upstream @ model.weight

    # Forward pass caching pre-activations and activations per layer.
    hs = [x]
    zs = []
    h = x
    for layer in model.layers:
        z = h @ layer.weight.T + layer.bias
        h = _activate(layer.activation, z)
        zs.append(z)
        hs.append(h)
    grads: list[np.ndarray] = []
    g = upstream
    for k in range(len(model.layers) - 1, -1, -1):
        layer = model.layers[k]
        dz = g * _activate_grad(layer.activation, zs[k], hs[k + 1])
        grads.insert(0, dz.sum(axis=0))  # bias
        grads.insert(0, dz.T @ hs[k])  # weight
        g = dz @ layer.weight
    return grads, g


@dataclass
class AdamState:
    """Adam accumulators plus a stepwise-halving learning-rate schedule."""

    learning_rate: float
    halving_period: int = 0  # 0 disables halving
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: list[np.ndarray] = field(default_factory=list)
    v: list[np.ndarray] = field(default_factory=list)


def current_rate(state: AdamState) -> float:
    """Learning rate applied at the upcoming step (step count is 0-based)."""
    if state.halving_period <= 0:
        return state.learning_rate
    return state.learning_rate * 2.0 ** -(state.step // state.halving_period)


def adam_step(state: AdamState, params: list[np.ndarray], grads: list[np.ndarray]) -> None:
    """Bias-corrected Adam update, applied to ``params`` in place."""
    if not state.m:
        state.m = [np.zeros_like(p) for p in params]
        state.v = [np.zeros_like(p) for p in params]
    if len(grads) != len(params):
        raise DimensionError("gradient list does not match parameter list")
    rate = current_rate(state)
    state.step += 1
    t = state.step
    bc1 = 1.0 - state.beta1**t
    bc2 = 1.0 - state.beta2**t
    for p, g, m, v in zip(params, grads, state.m, state.v):
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * g * g
        p -= rate * (m / bc1) / (np.sqrt(v / bc2) + state.eps)


def save_model(model: MapModel, path) -> None:
    """Write a JSON checkpoint (row-major weights, exact round-trip floats)."""
    if isinstance(model, LinearMap):
        doc = {
            "kind": "linear",
            "weight": model.weight.tolist(),
            "bias": None if model.bias is None else model.bias.tolist(),
        }
    else:
        doc = {
            "kind": "mlp",
            "layers": [
                {"weight": l.weight.tolist(), "bias": l.bias.tolist(), "activation": l.activation}
                for l in model.layers
            ],
        }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)


def load_model(path) -> MapModel:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("kind") == "linear":
        bias = doc.get("bias")
        return LinearMap(
            weight=np.asarray(doc["weight"], dtype=float),
            bias=None if bias is None else np.asarray(bias, dtype=float),
        )
    if doc.get("kind") == "mlp":
        layers = [
            MlpLayer(
                weight=np.asarray(l["weight"], dtype=float),
                bias=np.asarray(l["bias"], dtype=float),
                activation=l["activation"],
            )
            for l in doc["layers"]
        ]
        return Mlp(layers=layers)
    raise DimensionError(f"unknown checkpoint kind {doc.get('kind')!r}")
