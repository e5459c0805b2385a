# src/mmebench/config.py
import logging
import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Configure logging based on environment variable
log_level = os.getenv("LOG_LEVEL", "INFO").upper()
logging.basicConfig(level=getattr(logging, log_level, logging.INFO),
                    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)


def _env_bool(name: str, default: str) -> bool:
    return os.getenv(name, default).strip().lower() in ("1", "true", "yes", "on")


class Config:
    def __init__(self):
        # Reproducibility
        self.SEED = int(os.getenv("MMEBENCH_SEED", 0))

        # Output
        self.OUTPUT_DIR = os.getenv("MMEBENCH_OUTPUT_DIR", "results")

        # Numerics
        self.DEGENERACY_TOLERANCE = float(
            os.getenv("MMEBENCH_DEGENERACY_TOLERANCE", 1e-12))
        self.POWER_ITERATIONS = int(os.getenv("MMEBENCH_POWER_ITERATIONS", 200))
        self.COMPENSATED_SUMMATION = _env_bool("MMEBENCH_COMPENSATED_SUMMATION", "false")
        self.ADJOINT_TRIALS = int(os.getenv("MMEBENCH_ADJOINT_TRIALS", 20))

        # Concurrent method runs inside one experiment
        self.WORKERS = int(os.getenv("MMEBENCH_WORKERS", 1))

        logger.debug("Configuration loaded successfully")

    def validate_numerics_config(self):
        """Validate numerical settings when needed."""
        if not 0.0 < self.DEGENERACY_TOLERANCE < 1.0:
            logger.error(f"Invalid MMEBENCH_DEGENERACY_TOLERANCE: {self.DEGENERACY_TOLERANCE}")
            raise ValueError("MMEBENCH_DEGENERACY_TOLERANCE must lie in (0, 1)")

        if self.POWER_ITERATIONS < 1:
            logger.error(f"Invalid MMEBENCH_POWER_ITERATIONS: {self.POWER_ITERATIONS}")
            raise ValueError("MMEBENCH_POWER_ITERATIONS must be a positive integer")

        if self.ADJOINT_TRIALS < 1:
            logger.error(f"Invalid MMEBENCH_ADJOINT_TRIALS: {self.ADJOINT_TRIALS}")
            raise ValueError("MMEBENCH_ADJOINT_TRIALS must be a positive integer")

    def validate_runtime_config(self):
        """Validate seed and worker settings when needed."""
        if self.SEED < 0:
            logger.error(f"Invalid MMEBENCH_SEED: {self.SEED}")
            raise ValueError("MMEBENCH_SEED must be a non-negative integer")

        if self.WORKERS < 1:
            logger.error(f"Invalid MMEBENCH_WORKERS: {self.WORKERS}")
            raise ValueError("MMEBENCH_WORKERS must be a positive integer")

    def validate(self):
        """Validate every section."""
        self.validate_numerics_config()
        self.validate_runtime_config()


# Global config instance
config = Config()
