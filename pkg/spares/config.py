# spares/config.py

from pydantic_settings import BaseSettings, SettingsConfigDict
from pydantic import Field

class Settings(BaseSettings):
    """
    Application settings loaded from environment variables (prefix SPARES_).
    """
    model_config = SettingsConfigDict(env_file=".env", env_prefix="SPARES_", extra="ignore")

    # App Settings
    APP_NAME: str = "Constellation Spare Strategy Analyzer"
    APP_DESCRIPTION: str = "Markov-chain analysis, Monte Carlo validation and (r,q) optimization of satellite spare strategies"
    APP_VERSION: str = "0.1.0"
    LOG_LEVEL: str = "INFO"

    # Earth Constants
    EARTH_RADIUS_KM: float = Field(6378.137, description="Equatorial Earth radius [km]")
    EARTH_J2: float = Field(1.08263e-3, description="Second zonal harmonic [-]")
    EARTH_MU_KM3_S2: float = Field(398600.4418, description="Earth gravitational parameter [km^3/s^2]")
    SECONDS_PER_DAY: float = 86400.0
    DAYS_PER_YEAR: float = 365.0

    # Solver Settings
    STATIONARY_TOL: float = Field(1e-13, description="L1 change between power iterates that counts as converged")
    STATIONARY_MAX_ITER: int = 100_000
    STOCHASTIC_TOL: float = 1e-12 # Column-sum tolerance for transition matrices
    NORMALIZATION_TOL: float = 1e-9 # Sum-to-one tolerance for distributions
    FIXED_POINT_TOL: float = Field(1e-6, description="Infinity-norm tolerance on (kappa, eta) between coupling iterations")
    FIXED_POINT_MAX_ITER: int = 100

    # Simulation Settings
    SIM_WARMUP_CYCLES: int = 10 # Warmup = this many analytic cycle times when not given
    SIM_BLOCK_STEPS: int = 4096 # Random draws are generated in blocks of this many steps
    SIM_WORKERS: int = 1

    # Optimization Settings
    GA_POPULATION: int = 20
    GA_GENERATIONS: int = 40
    GA_PARENTS_MATING: int = 10
    GA_MUTATION_PROBABILITY: float = 0.25
    GA_SEED: int = 2024
    GA_INFEASIBLE_PENALTY: float = Field(1e6, description="Additive cost penalty for designs violating the shortfall constraint")


settings = Settings()
