"""
Application configuration using pydantic-settings.
Every numerical tolerance and search default lives here and can be
overridden through MARGINALS_* environment variables or a local .env file.
"""

import logging

from pydantic_settings import BaseSettings, SettingsConfigDict

logger = logging.getLogger(__name__)


class Settings(BaseSettings):
    """
    Application settings loaded from the environment.

    Tolerances are grouped by the module that consumes them. The qubit cap
    keeps a dense complex128 state below roughly 512 MB at the default of 24.
    """

    model_config = SettingsConfigDict(
        env_prefix="MARGINALS_",
        env_file=".env",
        extra="ignore",
    )

    # State vectors
    max_qubits: int = 24
    norm_tolerance: float = 1e-10
    file_norm_tolerance: float = 1e-8
    unitary_tolerance: float = 1e-10

    # Density matrices and eigensolvers
    hermitian_tolerance: float = 1e-12
    trace_tolerance: float = 1e-10
    psd_tolerance: float = 1e-12
    degeneracy_tolerance: float = 1e-12
    phase_threshold: float = 1e-8
    jacobi_tolerance: float = 1e-12
    jacobi_max_sweeps: int = 100

    # Spectra and synthesis
    feasibility_eps: float = 1e-9
    clamp_window: float = 1e-12
    necessity_slack: float = 1e-12
    synthesis_tolerance: float = 1e-10

    # Certificates
    certificate_slack: float = 1e-9
    identity_tolerance: float = 1e-9
    consistency_tolerance: float = 1e-10

    # Four-qubit search
    search_restarts: int = 100
    search_max_iters: int = 500
    search_step: float = 0.25
    search_tolerance: float = 1e-12
    search_workers: int = 1

    log_level: str = "INFO"

    def log_config_status(self) -> None:
        """Log the active configuration (stdout is reserved for JSON reports)."""
        logger.debug("=" * 60)
        logger.debug("🔧 CONFIGURATION LOADED")
        logger.debug("=" * 60)
        logger.debug(f"Max qubits: {self.max_qubits}")
        logger.debug(f"Norm tolerance: {self.norm_tolerance} (files: {self.file_norm_tolerance})")
        logger.debug(f"Feasibility eps: {self.feasibility_eps}, clamp window: {self.clamp_window}")
        logger.debug(f"Certificate slack: {self.certificate_slack}")
        logger.debug(
            f"Search: restarts={self.search_restarts} max_iters={self.search_max_iters} "
            f"step={self.search_step} workers={self.search_workers}"
        )
        logger.debug("=" * 60)

        if self.max_qubits > 26:
            logger.warning(f"⚠️  max_qubits={self.max_qubits} allows states above 1 GB")


# Global settings instance
settings = Settings()
