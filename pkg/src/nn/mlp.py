"""
Multilayer perceptron with explicit forward/backward passes.

Weights are stored as (n_out, n_in) matrices. Inputs may be a single vector
or a batch with a leading batch dimension; caches and gradients follow the
same convention.
"""

from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

ACTIVATIONS = ("tanh", "identity")


def xavier_init(n_in: int, n_out: int, rng: np.random.Generator, gain: float = 1.0) -> np.ndarray:
    """
    Draw an (n_out, n_in) Xavier-normal matrix.

    Args:
        n_in: Fan-in
        n_out: Fan-out
        rng: Random stream
        gain: Multiplier on the standard deviation sqrt(2 / (n_in + n_out))

    Returns:
        Weight matrix of shape (n_out, n_in)
    """
    if int(n_in) < 1 or int(n_out) < 1:
        raise ValueError(f"Xavier init needs positive dimensions, got n_in={n_in}, n_out={n_out}")
    std = gain * np.sqrt(2.0 / (n_in + n_out))
    return rng.normal(0.0, std, size=(int(n_out), int(n_in)))


@dataclass
class LayerParams:
    """Weights (n_out, n_in) and bias (n_out) of one dense layer."""

    weights: np.ndarray
    bias: np.ndarray

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.bias = np.asarray(self.bias, dtype=np.float64)
        if self.weights.ndim != 2 or self.bias.shape != (self.weights.shape[0],):
            raise ValueError(
                f"Inconsistent layer shapes: weights {self.weights.shape}, bias {self.bias.shape}"
            )

    @property
    def n_in(self) -> int:
        return self.weights.shape[1]

    @property
    def n_out(self) -> int:
        return self.weights.shape[0]


@dataclass
class MlpParams:
    """Ordered dense layers with one activation tag per layer."""

    layers: List[LayerParams]
    activations: List[str]

    def __post_init__(self):
        if not self.layers:
            raise ValueError("An MLP needs at least one layer")
        if len(self.activations) != len(self.layers):
            raise ValueError("One activation tag per layer is required")
        for tag in self.activations:
            if tag not in ACTIVATIONS:
                raise ValueError(f"Unknown activation '{tag}', expected one of {ACTIVATIONS}")
        for prev, nxt in zip(self.layers, self.layers[1:]):
            if prev.n_out != nxt.n_in:
                raise ValueError(f"Layer dimensions do not chain: {prev.n_out} -> {nxt.n_in}")

    @property
    def input_dim(self) -> int:
        return self.layers[0].n_in

    @property
    def output_dim(self) -> int:
        return self.layers[-1].n_out

    @property
    def layer_sizes(self) -> List[int]:
        return [self.layers[0].n_in] + [layer.n_out for layer in self.layers]

    def arrays(self) -> List[np.ndarray]:
        """Flat parameter list [W0, b0, W1, b1, ...]."""
        out = []
        for layer in self.layers:
            out.extend([layer.weights, layer.bias])
        return out

    @classmethod
    def from_arrays(cls, arrays: Sequence[np.ndarray], activations: Sequence[str]) -> "MlpParams":
        if len(arrays) != 2 * len(activations):
            raise ValueError("Expected a weight and a bias array per layer")
        layers = [LayerParams(arrays[i], arrays[i + 1]) for i in range(0, len(arrays), 2)]
        return cls(layers=layers, activations=list(activations))

    def copy(self) -> "MlpParams":
        return MlpParams.from_arrays([a.copy() for a in self.arrays()], self.activations)


@dataclass
class MlpCache:
    """Per-layer inputs and post-activation outputs from one forward pass."""

    inputs: List[np.ndarray]
    outputs: List[np.ndarray]
    weights: List[np.ndarray]
    activations: List[str]
    squeeze: bool = False


@dataclass
class MlpGradients:
    """Parameter gradients plus the gradient with respect to the input."""

    layers: List[LayerParams]
    input_grad: np.ndarray = field(default=None)

    def arrays(self) -> List[np.ndarray]:
        out = []
        for layer in self.layers:
            out.extend([layer.weights, layer.bias])
        return out


def build_mlp(
    layer_sizes: Sequence[int],
    rng: np.random.Generator,
    hidden_activation: str = "tanh",
    output_activation: str = "identity",
    output_gain: float = 1.0,
) -> MlpParams:
    """
    Build an MLP with Xavier-normal weights and zero biases.

    Args:
        layer_sizes: [n_in, hidden..., n_out]
        rng: Random stream
        hidden_activation: Activation of every hidden layer
        output_activation: Activation of the last layer
        output_gain: Std multiplier for the last layer's weights

    Returns:
        Initialized parameters
    """
    if len(layer_sizes) < 2:
        raise ValueError("layer_sizes needs at least an input and an output size")
    layers = []
    activations = []
    n_layers = len(layer_sizes) - 1
    for i in range(n_layers):
        last = i == n_layers - 1
        weights = xavier_init(layer_sizes[i], layer_sizes[i + 1], rng, gain=output_gain if last else 1.0)
        layers.append(LayerParams(weights, np.zeros(layer_sizes[i + 1])))
        activations.append(output_activation if last else hidden_activation)
    return MlpParams(layers=layers, activations=activations)


def mlp_forward(params: MlpParams, x: np.ndarray) -> Tuple[np.ndarray, MlpCache]:
    """
    Evaluate the network.

    Args:
        params: Network parameters
        x: Input vector (n_in,) or batch (B, n_in)

    Returns:
        Tuple of (output, cache for mlp_backward)
    """
    x = np.asarray(x, dtype=np.float64)
    squeeze = x.ndim == 1
    h = x[None, :] if squeeze else x
    if h.ndim != 2 or h.shape[1] != params.input_dim:
        raise ValueError(f"Input width {h.shape[-1]} does not match network input {params.input_dim}")

    inputs, outputs = [], []
    for layer, tag in zip(params.layers, params.activations):
        inputs.append(h)
        z = h @ layer.weights.T + layer.bias
        h = np.tanh(z) if tag == "tanh" else z
        outputs.append(h)

    cache = MlpCache(
        inputs=inputs,
        outputs=outputs,
        weights=[layer.weights for layer in params.layers],
        activations=list(params.activations),
        squeeze=squeeze,
    )
    return (h[0] if squeeze else h), cache


def mlp_backward(cache: MlpCache, grad_output: np.ndarray) -> MlpGradients:
    """
    Backpropagate an output gradient through a cached forward pass.

    Args:
        cache: Cache returned by mlp_forward
        grad_output: dL/d(output), same shape as the forward output

    Returns:
        Gradients for every layer (summed over the batch) and the input gradient
    """
    g = np.asarray(grad_output, dtype=np.float64)
    if cache.squeeze:
        g = g[None, :] if g.ndim == 1 else g
    expected = cache.outputs[-1].shape
    if g.shape != expected:
        raise ValueError(f"grad_output shape {g.shape} does not match cached output {expected}")

    grads: List[LayerParams] = []
    for inp, out, weights, tag in zip(
        reversed(cache.inputs), reversed(cache.outputs), reversed(cache.weights), reversed(cache.activations)
    ):
        if tag == "tanh":
            g = g * (1.0 - out * out)
        grads.append(LayerParams(g.T @ inp, g.sum(axis=0)))
        g = g @ weights
    grads.reverse()
    return MlpGradients(layers=grads, input_grad=g[0] if cache.squeeze else g)
