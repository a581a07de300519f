# config/settings.py
import os
from dotenv import load_dotenv
from typing import Optional

# Load environment variables from .env file
# Try multiple paths to find the .env file
env_paths = ['.env', '../.env', '../../.env']
for env_path in env_paths:
    if os.path.exists(env_path):
        load_dotenv(env_path)
        break
else:
    load_dotenv()

class Settings:
    """Application settings and configuration"""

    # Application Configuration
    APP_ENV: str = os.getenv("APP_ENV", "development")
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO").upper()
    DEBUG: bool = os.getenv("DEBUG", "false").lower() == "true"

    # Newton solver for the implicit midpoint rule
    NEWTON_TOL: float = float(os.getenv("NEWTON_TOL", "1e-13"))
    NEWTON_MAX_ITER: int = int(os.getenv("NEWTON_MAX_ITER", "50"))

    # Integration defaults (Delta t = 1/50 as in the Kovalevskaya experiments)
    DEFAULT_DT: float = float(os.getenv("DEFAULT_DT", "0.02"))
    DEFAULT_T_FINAL: float = float(os.getenv("DEFAULT_T_FINAL", "200"))
    REFERENCE_DT: float = float(os.getenv("REFERENCE_DT", "1e-4"))

    # Finite-difference oracle step
    FD_STEP: float = float(os.getenv("FD_STEP", "1e-6"))

    # Output Configuration
    OUTPUT_DIR: str = os.getenv("OUTPUT_DIR", "results")
    CSV_FLOAT_FORMAT: str = os.getenv("CSV_FLOAT_FORMAT", "%.17g")
    PLOT_DPI: int = int(os.getenv("PLOT_DPI", "120"))

    # Parallel runs of a multi-run experiment
    MAX_WORKERS: int = int(os.getenv("MAX_WORKERS", str(os.cpu_count() or 1)))

    # Langfuse Configuration (tracing is disabled without keys)
    LANGFUSE_PUBLIC_KEY: Optional[str] = os.getenv("LANGFUSE_PUBLIC_KEY")
    LANGFUSE_SECRET_KEY: Optional[str] = os.getenv("LANGFUSE_SECRET_KEY")
    LANGFUSE_HOST: str = os.getenv("LANGFUSE_HOST", "https://cloud.langfuse.com")

# Global settings instance
settings = Settings()
