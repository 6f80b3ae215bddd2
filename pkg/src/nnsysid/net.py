"""Fully connected feedforward networks and their output Jacobians.

The backward pass here is the Jacobian flavor of backpropagation: instead of
folding a scalar loss gradient through the layers, it carries the full matrix
of output sensitivities so that the derivative of every network output with
respect to every weight, bias and input component is available at once.

All evaluation functions accept a single input vector ``(n_x,)`` or a batch
``(batch, n_x)`` and return correspondingly shaped results.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError

ACTIVATIONS = ("tanh", "identity")


@dataclass(frozen=True)
class LayerSpec:
    """Node count and elementwise activation of one layer."""

    size: int
    activation: str = "tanh"

    def __post_init__(self):
        if self.size < 1:
            raise ValueError(f"layer size must be >= 1, got {self.size}")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")


@dataclass(frozen=True)
class NetStructure:
    """Input width plus the ordered layer specs of a network."""

    input_size: int
    layers: tuple[LayerSpec, ...]

    def __post_init__(self):
        if self.input_size < 1:
            raise ValueError("input_size must be >= 1")
        if len(self.layers) < 1:
            raise ValueError("need at least one layer")
        object.__setattr__(self, "layers", tuple(self.layers))

    @classmethod
    def mlp(cls, input_size, hidden_sizes, output_size):
        """tanh hidden layers followed by an identity output layer."""
        layers = [LayerSpec(h, "tanh") for h in hidden_sizes]
        layers.append(LayerSpec(output_size, "identity"))
        return cls(input_size, tuple(layers))

    @property
    def n_layers(self):
        return len(self.layers)

    @property
    def output_size(self):
        return self.layers[-1].size

    def fan_ins(self):
        """Input width seen by each layer (layer 0 feeds from the input)."""
        return [self.input_size] + [s.size for s in self.layers[:-1]]

    @property
    def n_weights(self):
        return sum(l.size * f for l, f in zip(self.layers, self.fan_ins()))

    @property
    def n_biases(self):
        return sum(l.size for l in self.layers)

    @property
    def n_params(self):
        return self.n_weights + self.n_biases


class FeedforwardNet:
    """Weight matrices and bias vectors realizing a :class:`NetStructure`.

    ``weights[n]`` has shape ``(size_n, size_{n-1})`` where layer ``-1`` is the
    input; ``biases[n]`` is 1-D of length ``size_n``. The instance is treated
    as immutable during evaluation; nothing here mutates it.
    """

    __slots__ = ("structure", "weights", "biases")

    def __init__(self, structure, weights, biases):
        weights = [np.ascontiguousarray(w, dtype=float) for w in weights]
        biases = [np.ascontiguousarray(b, dtype=float) for b in biases]
        if len(weights) != structure.n_layers or len(biases) != structure.n_layers:
            raise ValueError("one weight matrix and bias vector per layer required")
        for w, b, spec, fan in zip(weights, biases, structure.layers, structure.fan_ins()):
            if w.shape != (spec.size, fan):
                raise ValueError(f"weight shape {w.shape} != {(spec.size, fan)}")
            if b.shape != (spec.size,):
                raise ValueError(f"bias shape {b.shape} != {(spec.size,)}")
        self.structure = structure
        self.weights = weights
        self.biases = biases

    @property
    def input_size(self):
        return self.structure.input_size

    @property
    def output_size(self):
        return self.structure.output_size

    @property
    def n_params(self):
        return self.structure.n_params


@dataclass
class ForwardCache:
    """Everything the forward pass computed.

    ``activations[0]`` is the input; ``activations[n]`` and
    ``pre_activations[n - 1]`` belong to layer ``n``. Arrays are stored
    batched; ``single`` records whether the caller passed a 1-D input.
    """

    pre_activations: list
    activations: list
    single: bool

    @property
    def output(self):
        out = self.activations[-1]
        return out[0] if self.single else out


@dataclass
class Sensitivities:
    """Per-layer output sensitivities d(output)/d(pre-activation).

    ``layers[n - 1]`` has shape ``(batch, n_z, size_n)`` (batch axis dropped
    for single inputs).
    """

    layers: list
    single: bool


def _as_batch(x, n_x):
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    if single:
        x = x[np.newaxis, :]
    if x.ndim != 2 or x.shape[1] != n_x:
        raise ValueError(f"input has shape {x.shape}, expected (..., {n_x})")
    return x, single


def forward(net, x):
    """Evaluate the network, keeping every intermediate value.

    Non-finite inputs propagate through to the outputs; no overflow checks
    are performed here (step control in the optimizer deals with them).
    """
    xb, single = _as_batch(x, net.input_size)
    activations = [xb]
    pre_activations = []
    for w, b, spec in zip(net.weights, net.biases, net.structure.layers):
        beta = activations[-1] @ w.T + b
        pre_activations.append(beta)
        activations.append(np.tanh(beta) if spec.activation == "tanh" else beta)
    return ForwardCache(pre_activations, activations, single)


def backward(net, cache):
    """Backward recursion for the output/pre-activation sensitivities.

    The last layer starts from the diagonal of its activation derivative;
    every earlier layer folds in the next weight matrix and its own
    activation derivative. tanh derivatives are formed as ``1 - a**2`` from
    the cached activations.
    """
    specs = net.structure.layers
    n_layers = len(specs)
    n_z = specs[-1].size
    batch = cache.activations[0].shape[0]

    sens = [None] * n_layers
    if specs[-1].activation == "tanh":
        act = cache.activations[-1]
        last = np.zeros((batch, n_z, n_z))
        idx = np.arange(n_z)
        last[:, idx, idx] = 1.0 - act * act
    else:
        last = np.broadcast_to(np.eye(n_z), (batch, n_z, n_z))
    sens[-1] = last

    for n in range(n_layers - 2, -1, -1):
        propagated = sens[n + 1] @ net.weights[n + 1]
        if specs[n].activation == "tanh":
            act = cache.activations[n + 1]
            deriv = 1.0 - act * act
            sens[n] = propagated * deriv[:, np.newaxis, :]
        else:
            sens[n] = propagated
    if cache.single:
        return Sensitivities([s[0] for s in sens], True)
    return Sensitivities(sens, False)


def param_jacobian(net, cache, sens):
    """Jacobian of the outputs with respect to the packed parameter vector.

    Column order matches :func:`pack_params`: layer by layer, the weight
    matrix in row-major order followed by the biases. The column for weight
    ``(i, j)`` of layer ``n`` is ``sens_n[:, i] * activation_{n-1}[j]``; the
    bias columns are the sensitivities themselves.
    """
    layers = sens.layers if not sens.single else [s[np.newaxis] for s in sens.layers]
    batch = cache.activations[0].shape[0]
    n_z = net.output_size
    jac = np.empty((batch, n_z, net.n_params))
    col = 0
    for n, spec in enumerate(net.structure.layers):
        prev = cache.activations[n]
        s_n = layers[n]
        n_w = spec.size * prev.shape[1]
        block = jac[:, :, col:col + n_w].reshape(batch, n_z, spec.size, prev.shape[1])
        np.multiply(s_n[:, :, :, np.newaxis], prev[:, np.newaxis, np.newaxis, :], out=block)
        col += n_w
        jac[:, :, col:col + spec.size] = s_n
        col += spec.size
    return jac[0] if cache.single else jac


def input_jacobian(net, sens):
    """Jacobian of the outputs with respect to the network input."""
    first = sens.layers[0]
    return first @ net.weights[0]


def init_params(structure, rng):
    """Draw fresh parameters: weights from a zero-mean normal with standard
    deviation ``fan_in ** -0.5``, biases exactly zero."""
    weights = []
    biases = []
    for spec, fan in zip(structure.layers, structure.fan_ins()):
        weights.append(rng.normal(0.0, fan ** -0.5, size=(spec.size, fan)))
        biases.append(np.zeros(spec.size))
    return FeedforwardNet(structure, weights, biases)


def pack_params(net):
    """Flatten all parameters (per layer: row-major weights, then biases)."""
    parts = []
    for w, b in zip(net.weights, net.biases):
        parts.append(w.ravel())
        parts.append(b)
    return np.concatenate(parts)


def unpack_params(vector, structure):
    """Rebuild a network from a flat vector in :func:`pack_params` layout."""
    vector = np.asarray(vector, dtype=float)
    if vector.shape != (structure.n_params,):
        raise DataError(
            f"parameter vector has length {vector.size}, expected {structure.n_params}"
        )
    weights = []
    biases = []
    pos = 0
    for spec, fan in zip(structure.layers, structure.fan_ins()):
        n_w = spec.size * fan
        weights.append(vector[pos:pos + n_w].reshape(spec.size, fan))
        pos += n_w
        biases.append(vector[pos:pos + spec.size])
        pos += spec.size
    return FeedforwardNet(structure, weights, biases)
