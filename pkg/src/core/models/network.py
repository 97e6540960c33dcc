from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator


class MlpSpec(BaseModel):
    """Architecture of a fully connected network with ReLU hidden layers."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    input_dim: int = Field(ge=1, description="Width of the input vector")
    hidden_dims: tuple[int, ...] = Field(default=(), description="Hidden layer widths, each >= 1")
    output_dim: int = Field(ge=1, description="Width of the output vector")
    activation: Literal["relu"] = Field(default="relu", description="Hidden-layer nonlinearity")
    output_activation: Literal["none", "sigmoid"] = Field(default="none", description="Output nonlinearity")
    init: Literal["xavier", "zero_last_layer"] = Field(default="xavier", description="Weight initialization scheme")

    @field_validator("hidden_dims")
    @classmethod
    def _positive_widths(cls, value: tuple[int, ...]) -> tuple[int, ...]:
        if any(width < 1 for width in value):
            raise ValueError(f"hidden layer widths must be >= 1, got {value}")
        return value

    @property
    def layer_dims(self) -> list[tuple[int, int]]:
        """(fan_in, fan_out) per affine layer."""
        dims = [self.input_dim, *self.hidden_dims, self.output_dim]
        return list(zip(dims[:-1], dims[1:]))

    @property
    def num_layers(self) -> int:
        return len(self.hidden_dims) + 1
