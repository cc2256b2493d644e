from pydantic import BaseModel, ConfigDict, Field


class SolverConfig(BaseModel):
    """
    Settings of the Euler-discretized multiplier dynamics.

    `gain` is accepted as `K` in config files, `tau` is the Euler step.
    """
    model_config = ConfigDict(frozen=True, extra="forbid", populate_by_name=True)

    gain: float = Field(1.0, gt=0.0, alias="K", description="Feedback gain K on the constraint residual")
    tau: float = Field(1e-2, gt=0.0, description="Euler step size")
    eps_f: float = Field(1e-8, gt=0.0, description="Stop when ||dx||_2 falls below this")
    eps_h: float = Field(1e-8, gt=0.0, description="... and ||h||_2 falls below this")
    max_iters: int = Field(10_000, ge=1)
    dense_fallback: bool = Field(False, description="Factor J^T with LAPACK instead of the sparse QR")
    track_flops: bool = Field(True, description="Maintain the structural pattern and count FLOPs")
    log_every: int = Field(100, ge=1, description="Progress log interval in iterations")
