"""
JSON-friendly (de)serialization of network parameters.

Weight matrices are flattened in row-major order; Python floats round-trip
exactly through JSON, so a reloaded network reproduces outputs bitwise.
"""

from typing import Any, Dict

import numpy as np

from src.nn.mlp import LayerParams, MlpParams
from src.nn.policy import GaussianPolicyHead


def mlp_to_dict(params: MlpParams) -> Dict[str, Any]:
    return {
        "layer_sizes": params.layer_sizes,
        "activations": list(params.activations),
        "weights": [layer.weights.ravel(order="C").tolist() for layer in params.layers],
        "biases": [layer.bias.tolist() for layer in params.layers],
    }


def mlp_from_dict(payload: Dict[str, Any]) -> MlpParams:
    """
    Rebuild an MLP from mlp_to_dict output.

    Raises:
        ValueError: If array lengths disagree with layer_sizes
    """
    sizes = payload["layer_sizes"]
    weights, biases = payload["weights"], payload["biases"]
    if len(weights) != len(sizes) - 1 or len(biases) != len(sizes) - 1:
        raise ValueError("Checkpoint layer count does not match layer_sizes")
    layers = []
    for i, (w, b) in enumerate(zip(weights, biases)):
        n_in, n_out = sizes[i], sizes[i + 1]
        if len(w) != n_in * n_out or len(b) != n_out:
            raise ValueError(f"Checkpoint layer {i} has the wrong number of entries")
        layers.append(LayerParams(np.asarray(w, dtype=np.float64).reshape(n_out, n_in), np.asarray(b, dtype=np.float64)))
    return MlpParams(layers=layers, activations=list(payload["activations"]))


def policy_head_to_dict(head: GaussianPolicyHead) -> Dict[str, Any]:
    payload = mlp_to_dict(head.mean_net)
    payload["log_std"] = head.log_std.tolist()
    return payload


def policy_head_from_dict(payload: Dict[str, Any]) -> GaussianPolicyHead:
    return GaussianPolicyHead(mlp_from_dict(payload), np.asarray(payload["log_std"], dtype=np.float64))
