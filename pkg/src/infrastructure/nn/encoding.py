import numpy as np


def encoded_dim(input_dim: int, num_freqs: int) -> int:
    return input_dim * (2 * num_freqs + 1)


def positional_encoding(x: np.ndarray, num_freqs: int) -> np.ndarray:
    """[x, sin(2^0 pi x), cos(2^0 pi x), ..., sin(2^(L-1) pi x), cos(2^(L-1) pi x)] along the last axis.

    Each sin/cos block spans all d input components, so x=0 gives [0...0, 0...0, 1...1, ...].
    """
    x = np.asarray(x, dtype=np.float64)
    parts = [x]
    for k in range(num_freqs):
        scaled = (2.0 ** k) * np.pi * x
        parts += [np.sin(scaled), np.cos(scaled)]
    return np.concatenate(parts, axis=-1)


def positional_encoding_backward(x: np.ndarray, num_freqs: int, grad_output: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    d = x.shape[-1]
    grad = grad_output[..., :d].copy()
    for k in range(num_freqs):
        freq = (2.0 ** k) * np.pi
        scaled = freq * x
        offset = d * (1 + 2 * k)
        grad += grad_output[..., offset:offset + d] * freq * np.cos(scaled)
        grad -= grad_output[..., offset + d:offset + 2 * d] * freq * np.sin(scaled)
    return grad
