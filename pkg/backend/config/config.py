import logging
import os

from dotenv import load_dotenv
from sympy import isprime


# Configure logger
logger = logging.getLogger(__name__)

DEFAULT_SEED = 0
DEFAULT_PRIME = 5
DEFAULT_SAMPLES = 1000
DEFAULT_LOG_LEVEL = "WARNING"


class Config:
    def __init__(self, load_env: bool = True):
        if load_env:
            load_dotenv()

        # Get the absolute path of the config.py file
        current_dir = os.path.dirname(os.path.abspath(__file__))

        # Navigate to the parent directory (backend)
        backend_dir = os.path.dirname(current_dir)

        # Build the path to the published report schema
        self.schema_path = os.path.join(backend_dir, "schemas", "report.v1.json")

        self.seed = self._read_int("EO_SEED", DEFAULT_SEED, minimum=0)
        self.prime = self._read_int("EO_PRIME", DEFAULT_PRIME, minimum=3)
        if not isprime(self.prime):
            raise ValueError(f"EO_PRIME must be an odd prime, got {self.prime}")
        self.samples = self._read_int("EO_SAMPLES", DEFAULT_SAMPLES, minimum=1)
        self.log_level = os.getenv("EO_LOG_LEVEL", DEFAULT_LOG_LEVEL).upper()
        if not isinstance(logging.getLevelName(self.log_level), int):
            raise ValueError(f"EO_LOG_LEVEL is not a logging level: {self.log_level}")

    @staticmethod
    def _read_int(name: str, default: int, minimum: int) -> int:
        raw = os.getenv(name)
        if raw is None or raw.strip() == "":
            return default
        try:
            value = int(raw)
        except ValueError:
            raise ValueError(f"{name} must be an integer, got {raw!r}")
        if value < minimum:
            raise ValueError(f"{name} must be at least {minimum}, got {value}")
        logger.debug(f"{name} read from environment: {value}")
        return value

    def get_seed(self):
        """Return the default seed for randomized checks"""
        return self.seed

    def get_prime(self):
        """Return the default characteristic"""
        return self.prime

    def get_samples(self):
        """Return the number of random samples per frame condition"""
        return self.samples

    def get_log_level(self):
        return self.log_level

    def get_schema_path(self):
        """Return the absolute path to the JSON report schema"""
        return self.schema_path


if __name__ == '__main__':
    print(Config().get_schema_path())
