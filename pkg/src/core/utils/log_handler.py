import logging
import os

logging.basicConfig(
    level=os.environ.get("HYBRIDSPLAT_LOG_LEVEL", "INFO").upper(),
    format='%(asctime)s - %(filename)s:%(lineno)d - %(levelname)s - %(message)s'
)
logger = logging.getLogger("hybridsplat")


def _format_value(value: object) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def log_stage(stage: str, **metrics: object) -> str:
    """Emit one structured line for a pipeline stage and return it.

    Example:
        log_stage("prepass", loss=0.012, psnr=31.2, gaussians=4096, wall=12.5)
        -> "stage=prepass loss=0.012 psnr=31.2 gaussians=4096 wall=12.5"
    """
    fields = " ".join(f"{key}={_format_value(value)}" for key, value in metrics.items())
    line = f"stage={stage} {fields}".strip()
    logger.info(line)
    return line
