# weyl_closure/config.py
import os
import logging
from typing import List, Literal, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, field_validator

# Load environment variables
load_dotenv()

# Configure logging
_handlers: List[logging.Handler] = [logging.StreamHandler()]
if os.getenv("WCLOSE_LOG_FILE"):
    _handlers.append(logging.FileHandler(os.getenv("WCLOSE_LOG_FILE")))

logging.basicConfig(
    level=os.getenv("WCLOSE_LOG_LEVEL", "WARNING").upper(),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    handlers=_handlers
)
logger = logging.getLogger(__name__)

BENCHMARK_PRIME = 536870909


class EngineBudget(BaseModel):
    """Resource caps for a single Gröbner basis run"""
    max_pairs: int = Field(int(os.getenv("WCLOSE_MAX_PAIRS", "1000000")), description="Maximum number of S-pairs processed")
    max_terms: int = Field(int(os.getenv("WCLOSE_MAX_TERMS", "50000000")), description="Maximum total number of terms stored in the basis")
    timeout: float = Field(float(os.getenv("WCLOSE_TIMEOUT", "1800")), description="Wall-clock limit in seconds")
    max_degree: Optional[int] = Field(None, description="Maximum total degree of a basis element")
    max_coeff_bits: Optional[int] = Field(None, description="Maximum coefficient size in bits")

    @field_validator("max_pairs", "max_terms")
    @classmethod
    def _positive(cls, value: int) -> int:
        if value < 1:
            raise ValueError("budget caps must be positive")
        return value


CriterionName = Literal["holonomic", "stable-and-holonomic", "holonomic-plus-extra"]


class ClosureConfig(BaseModel):
    """Parameters of a partial Weyl closure run"""
    order: Optional[str] = Field(None, description="Inner order syntax; T elimination is always layered on top")
    position: Literal["pot", "top"] = Field("pot", description="Module layer of the inner order")
    criterion: CriterionName = Field("holonomic", description="Stopping criterion")
    extra: int = Field(0, description="h for the holonomic-plus-extra criterion")
    max_T_degree: int = Field(int(os.getenv("WCLOSE_MAX_T_DEGREE", "12")), description="Cap on the truncation degree s")
    budget: EngineBudget = Field(default_factory=EngineBudget, description="Budget passed to every Gröbner basis run")
    seed_previous: bool = Field(True, description="Feed the previous basis into the next iteration")
    verify_input: bool = Field(False, description="Check finite rank before running")
    k_max: int = Field(int(os.getenv("WCLOSE_K_MAX", "20")), description="Largest power of f tried when certifying")
    debug_monotonicity: bool = Field(os.getenv("WCLOSE_DEBUG", "False").lower() == "true", description="Scan two extra T powers to confirm deg_T monotonicity")

    @field_validator("max_T_degree")
    @classmethod
    def _cap_positive(cls, value: int) -> int:
        if value < 1:
            raise ValueError("max_T_degree must be at least 1")
        return value

    @field_validator("extra", "k_max")
    @classmethod
    def _non_negative(cls, value: int) -> int:
        if value < 0:
            raise ValueError("must be non-negative")
        return value


class AppConfig(BaseModel):
    """Application configuration"""
    field: str = Field(os.getenv("WCLOSE_FIELD", "QQ"), description="Default coefficient field syntax")
    jobs: int = Field(int(os.getenv("WCLOSE_JOBS", "1")), description="Parallel bench instances")
    data_dir: str = Field(os.getenv("WCLOSE_DATA_DIR", "./data"), description="Directory for traces and bench output")
    debug: bool = Field(os.getenv("WCLOSE_DEBUG", "False").lower() == "true", description="Debug mode")
    budget: EngineBudget = Field(default_factory=EngineBudget)
    closure: ClosureConfig = Field(default_factory=ClosureConfig)

    def validate_settings(self) -> List[str]:
        """Return a list of problems with the current settings"""
        problems = []
        from weyl_closure.domains import FieldSpec

        try:
            FieldSpec.parse(self.field)
        except ValueError as e:
            problems.append(f"WCLOSE_FIELD: {str(e)}")
        if self.jobs < 1:
            problems.append("WCLOSE_JOBS must be at least 1")
        return problems

    @classmethod
    def load_config(cls) -> 'AppConfig':
        """Load configuration from environment variables"""
        config = cls()
        problems = config.validate_settings()

        if problems:
            logger.warning(f"Configuration problems: {'; '.join(problems)}")

        if config.debug:
            logging.getLogger("weyl_closure").setLevel(logging.DEBUG)

        return config
