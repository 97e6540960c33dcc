from .adam import AdamResult, AdamState, adam_step
from .encoding import encoded_dim, positional_encoding, positional_encoding_backward
from .mlp import init_mlp, mlp_backward, mlp_forward

__all__ = [
    "AdamResult",
    "AdamState",
    "adam_step",
    "encoded_dim",
    "init_mlp",
    "mlp_backward",
    "mlp_forward",
    "positional_encoding",
    "positional_encoding_backward",
]
