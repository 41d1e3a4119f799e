# spares/schemas.py

import math
from typing import Any, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, computed_field, field_validator, model_validator

from spares.config import settings
from spares.exceptions.custom_exceptions import DimensionMismatchException, InvalidParameterException

# --- Generic Response Schemas ---
class MessageResponse(BaseModel):
    """
    Generic response model for simple messages.
    """
    message: str

class ErrorResponse(BaseModel):
    """
    Standardized error document printed to stderr by the CLI.
    """
    code: str = Field(..., description="A unique code for the error type")
    message: str = Field(..., description="A human-readable error message")
    details: Optional[dict] = Field(None, description="Optional additional details about the error")


def _read_only_vector(value: Any, dtype: type = float) -> np.ndarray:
    arr = np.array(value, dtype=dtype)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("expected a non-empty one-dimensional vector")
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector entries must be finite")
    arr.setflags(write=False)
    return arr

# --- Distribution Schemas ---
class StateDistribution(BaseModel):
    """
    Probability vector over stock levels, highest level first:
    probs[i] = P(X = level_max - i). Relative vectors used mid-derivation
    are built with normalized=False and skip the sum-to-one check.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    probs: np.ndarray = Field(..., description="Probabilities in descending-level order")
    normalized: bool = True

    @field_validator("probs", mode="before")
    @classmethod
    def _coerce_probs(cls, value: Any) -> np.ndarray:
        return _read_only_vector(value)

    @model_validator(mode="after")
    def _check_mass(self) -> "StateDistribution":
        if np.any(self.probs < -settings.STOCHASTIC_TOL):
            raise ValueError(f"negative probability {self.probs.min():.3e}")
        if self.normalized and abs(float(self.probs.sum()) - 1.0) > settings.NORMALIZATION_TOL:
            raise ValueError(f"probabilities sum to {self.probs.sum():.12f}, not 1")
        return self

    @classmethod
    def from_vector(cls, vector: Any, normalize: bool = True) -> "StateDistribution":
        """
        Builds a distribution from a computed vector, clearing round-off negatives
        and (optionally) rescaling to unit mass.
        """
        arr = np.clip(np.asarray(vector, dtype=float), 0.0, None)
        if normalize:
            total = float(arr.sum())
            if total <= 0.0:
                raise InvalidParameterException("Cannot normalize a vector with zero mass.")
            arr = arr / total
        return cls(probs=arr, normalized=normalize)

    @classmethod
    def from_ascending(cls, values: Any, normalize: bool = True) -> "StateDistribution":
        return cls.from_vector(np.asarray(values, dtype=float)[::-1], normalize=normalize)

    @classmethod
    def point_mass(cls, level: int, level_max: int) -> "StateDistribution":
        if not 0 <= level <= level_max:
            raise InvalidParameterException(f"Level {level} outside 0..{level_max}.")
        probs = np.zeros(level_max + 1)
        probs[level_max - level] = 1.0
        return cls(probs=probs)

    @property
    def level_max(self) -> int:
        return int(self.probs.size - 1)

    @property
    def levels(self) -> np.ndarray:
        return np.arange(self.level_max, -1, -1)

    def prob(self, level: int) -> float:
        if not 0 <= level <= self.level_max:
            return 0.0
        return float(self.probs[self.level_max - level])

    def ascending(self) -> np.ndarray:
        return self.probs[::-1].copy()

    def mean_level(self) -> float:
        return float(self.levels @ self.probs / self.probs.sum())

    def prob_below(self, y: int) -> float:
        """P(X < y): mass on levels 0..y-1."""
        if not 0 <= y <= self.level_max + 1:
            raise InvalidParameterException(f"Threshold {y} outside 0..{self.level_max + 1}.")
        return float(self.ascending()[:y].sum())

    def survival(self) -> np.ndarray:
        """P(X >= j) for j = 0..level_max."""
        return np.cumsum(self.probs)[::-1].copy()

# --- Failure and Lead Time Schemas ---
class FailureModel(BaseModel):
    """
    Per-step Poisson failure process of one plane.
    """
    model_config = ConfigDict(frozen=True)

    lambda_sat_per_step: float = Field(..., ge=0.0, description="Failures per operating satellite per T_mc")
    n_sat: int = Field(..., ge=1, description="Nominal number of operating satellites")
    n_bar: int = Field(..., ge=1, description="Highest stock level, r + q")
    t_mc: float = Field(1.0, gt=0.0, description="Markov step [day]")

    @model_validator(mode="after")
    def _check_levels(self) -> "FailureModel":
        if self.n_bar < self.n_sat:
            raise ValueError(f"n_bar ({self.n_bar}) must be >= n_sat ({self.n_sat})")
        return self

    @classmethod
    def from_annual_rate(cls, lambda_per_year: float, n_sat: int, n_bar: int, t_mc: float = 1.0) -> "FailureModel":
        return cls(
            lambda_sat_per_step=lambda_per_year * t_mc / settings.DAYS_PER_YEAR,
            n_sat=n_sat, n_bar=n_bar, t_mc=t_mc,
        )

    def with_n_bar(self, n_bar: int) -> "FailureModel":
        return FailureModel(**{**self.model_dump(), "n_bar": n_bar})

class LeadTimeModel(BaseModel):
    """
    Shifted-exponential launch lead time: constant offset t_lv plus Exp(mu_lv).
    """
    model_config = ConfigDict(frozen=True)

    mu_lv: float = Field(..., gt=0.0, description="Rate of the exponential tail [1/day]")
    t_lv: float = Field(..., ge=0.0, description="Constant lead time offset [day]")
    t_mc: float = Field(1.0, gt=0.0, description="Markov step [day]")

    @model_validator(mode="after")
    def _check_offset(self) -> "LeadTimeModel":
        ratio = self.t_lv / self.t_mc
        if abs(ratio - round(ratio)) > 1e-9:
            raise ValueError(f"t_lv ({self.t_lv}) must be an integer multiple of t_mc ({self.t_mc})")
        return self

    @classmethod
    def from_mean(cls, mean_exp_days: float, t_lv: float, t_mc: float = 1.0) -> "LeadTimeModel":
        return cls(mu_lv=1.0 / mean_exp_days, t_lv=t_lv, t_mc=t_mc)

    @property
    def m(self) -> int:
        """Offset length in steps."""
        return int(round(self.t_lv / self.t_mc))

    @property
    def step_survival(self) -> float:
        """e^(-mu T_mc): probability the exponential tail outlasts one more step."""
        return math.exp(-self.mu_lv * self.t_mc)

def _steps(period: float, t_mc: float, name: str) -> int:
    ratio = period / t_mc
    if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
        raise ValueError(f"{name} ({period}) must be a positive integer multiple of t_mc ({t_mc})")
    return int(round(ratio))

# --- Policy Schemas ---
class DirectPolicy(BaseModel):
    """
    Continuous-review (r,q) policy of a plane resupplied straight from the ground.
    """
    model_config = ConfigDict(frozen=True)

    r: int = Field(..., ge=0, description="Reorder level [satellites]")
    q: int = Field(..., ge=1, description="Order size [satellites]")
    failure: FailureModel
    lead: LeadTimeModel

    @model_validator(mode="after")
    def _check_consistency(self) -> "DirectPolicy":
        if self.failure.n_bar != self.r + self.q:
            raise ValueError(f"failure.n_bar ({self.failure.n_bar}) must equal r + q ({self.r + self.q})")
        if not math.isclose(self.failure.t_mc, self.lead.t_mc):
            raise ValueError("failure and lead time models must share t_mc")
        return self

    @classmethod
    def build(cls, r: int, q: int, lambda_per_year: float, n_sat: int,
              mean_lead_days: float, t_lv: float, t_mc: float = 1.0) -> "DirectPolicy":
        return cls(
            r=r, q=q,
            failure=FailureModel.from_annual_rate(lambda_per_year, n_sat, r + q, t_mc),
            lead=LeadTimeModel.from_mean(mean_lead_days, t_lv, t_mc),
        )

    @property
    def n_bar(self) -> int:
        return self.r + self.q

    def with_rq(self, r: int, q: int) -> "DirectPolicy":
        return DirectPolicy(r=r, q=q, failure=self.failure.with_n_bar(r + q), lead=self.lead)

class IndirectPolicy(BaseModel):
    """
    Periodic-review policy pair: planes (r_i, q_i, T_plane) in satellites and
    parking orbits (r_p, q_p, T_park) in batches of q_i satellites.
    """
    model_config = ConfigDict(frozen=True)

    r_i: int = Field(..., ge=0)
    q_i: int = Field(..., ge=1)
    r_p: int = Field(..., ge=0, description="Parking reorder level [batches]")
    q_p: int = Field(..., ge=1, description="Parking order size [batches]")
    failure: FailureModel
    lead: LeadTimeModel
    t_plane: float = Field(..., gt=0.0, description="Contact period seen by a plane [day]")
    t_park: float = Field(..., gt=0.0, description="Contact period seen by a parking orbit [day]")
    t_mc: float = Field(1.0, gt=0.0)

    @model_validator(mode="after")
    def _check_consistency(self) -> "IndirectPolicy":
        if self.failure.n_bar != self.r_i + self.q_i:
            raise ValueError(f"failure.n_bar ({self.failure.n_bar}) must equal r_i + q_i ({self.r_i + self.q_i})")
        if not (math.isclose(self.failure.t_mc, self.t_mc) and math.isclose(self.lead.t_mc, self.t_mc)):
            raise ValueError("failure and lead time models must share t_mc")
        _steps(self.t_plane, self.t_mc, "t_plane")
        _steps(self.t_park, self.t_mc, "t_park")
        return self

    @classmethod
    def build(cls, r_i: int, q_i: int, r_p: int, q_p: int, lambda_per_year: float, n_sat: int,
              mean_lead_days: float, t_lv: float, t_plane: float, t_park: float,
              t_mc: float = 1.0) -> "IndirectPolicy":
        return cls(
            r_i=r_i, q_i=q_i, r_p=r_p, q_p=q_p,
            failure=FailureModel.from_annual_rate(lambda_per_year, n_sat, r_i + q_i, t_mc),
            lead=LeadTimeModel.from_mean(mean_lead_days, t_lv, t_mc),
            t_plane=t_plane, t_park=t_park, t_mc=t_mc,
        )

    @property
    def n_bar_i(self) -> int:
        return self.r_i + self.q_i

    @property
    def n_bar_p(self) -> int:
        return self.r_p + self.q_p

    @property
    def k_i(self) -> int:
        return _steps(self.t_plane, self.t_mc, "t_plane")

    @property
    def k_p(self) -> int:
        return _steps(self.t_park, self.t_mc, "t_park")

# --- Orbit Schemas ---
class OrbitGeometry(BaseModel):
    """
    Circular orbit used for J2 nodal-drift evaluation.
    """
    model_config = ConfigDict(frozen=True)

    semi_major_axis: float = Field(..., gt=0.0, description="Semi-major axis [km]")
    inclination: float = Field(..., ge=0.0, le=math.pi, description="Inclination [rad]")
    earth_radius: float = Field(default_factory=lambda: settings.EARTH_RADIUS_KM, gt=0.0)
    j2: float = Field(default_factory=lambda: settings.EARTH_J2)
    mu_earth: float = Field(default_factory=lambda: settings.EARTH_MU_KM3_S2, gt=0.0)

    @model_validator(mode="after")
    def _check_altitude(self) -> "OrbitGeometry":
        if self.semi_major_axis <= self.earth_radius:
            raise ValueError(f"semi_major_axis ({self.semi_major_axis} km) must exceed the Earth radius ({self.earth_radius} km)")
        return self

class ContactGeometry(BaseModel):
    """
    Constellation planes and parking orbits sharing one inclination.
    """
    model_config = ConfigDict(frozen=True)

    n_planes: int = Field(..., ge=1)
    n_park: int = Field(..., ge=1)
    plane_orbit: OrbitGeometry
    park_orbit: OrbitGeometry

    @model_validator(mode="after")
    def _check_orbits(self) -> "ContactGeometry":
        if not math.isclose(self.plane_orbit.inclination, self.park_orbit.inclination, abs_tol=1e-12):
            raise ValueError("parking orbits must share the constellation inclination")
        if math.isclose(self.plane_orbit.semi_major_axis, self.park_orbit.semi_major_axis, abs_tol=1e-9):
            raise ValueError("parking orbit semi-major axis must differ from the constellation's")
        return self

# --- Coupling Schemas ---
class CouplingState(BaseModel):
    """
    Quantities exchanged between the in-plane and parking chains.
    kappa[j] = P(parking holds at least j batches); eta[d] = P(a plane asks for d batches).
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    kappa: np.ndarray
    eta: np.ndarray

    @field_validator("kappa", "eta", mode="before")
    @classmethod
    def _coerce(cls, value: Any) -> np.ndarray:
        return _read_only_vector(value)

    @model_validator(mode="after")
    def _check(self) -> "CouplingState":
        tol = settings.STOCHASTIC_TOL
        if abs(self.kappa[0] - 1.0) > tol:
            raise ValueError("kappa[0] must be 1")
        if np.any(np.diff(self.kappa) > tol) or np.any(self.kappa < -tol) or np.any(self.kappa > 1 + tol):
            raise ValueError("kappa must be a nonincreasing sequence in [0, 1]")
        if np.any(self.eta < -tol) or abs(float(self.eta.sum()) - 1.0) > settings.NORMALIZATION_TOL:
            raise ValueError("eta must be a probability vector")
        return self

# --- Result Schemas ---
class DirectResult(BaseModel):
    """
    Long-run distributions of a direct-resupply plane.
    t_np and t_wp are in steps, t_cycle in days. A degenerate result (no failures)
    leaves the reorder-side distributions undefined and t_np infinite.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    pi_q: StateDistribution
    pi_r: Optional[StateDistribution] = None
    pi_np: StateDistribution
    pi_wp: Optional[StateDistribution] = None
    pi_dr: StateDistribution
    t_np: float
    t_wp: float
    t_cycle: float
    degenerate: bool = False

    @model_validator(mode="after")
    def _check_periods(self) -> "DirectResult":
        if not self.degenerate and not (self.t_np > 0 and self.t_wp > 0):
            raise ValueError("period lengths must be positive")
        return self

class InplaneSolution(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    pi_q_i: StateDistribution
    pi_r_i: StateDistribution
    pi_ir_i: StateDistribution
    eta: np.ndarray
    degenerate: bool = False

class ParkingSolution(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    pi_q_p: StateDistribution
    pi_r_p: Optional[StateDistribution] = None
    pi_np_p: StateDistribution
    pi_wp_p: Optional[StateDistribution] = None
    pi_ir_p: StateDistribution
    t_np_p: float
    t_wp_p: float
    t_cycle_p: float
    degenerate: bool = False

class IndirectResult(BaseModel):
    """
    Converged output of the coupled in-plane / parking fixed point.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    pi_ir_i: StateDistribution
    pi_ir_p: StateDistribution
    pi_q_i: StateDistribution
    pi_r_i: StateDistribution
    pi_q_p: StateDistribution
    pi_r_p: Optional[StateDistribution] = None
    coupling: CouplingState
    iterations: int
    residual: float
    residual_trace: list[float] = Field(default_factory=list)
    t_cycle_p: float
    degenerate: bool = False

# --- Simulation Schemas ---
SamplingMode = Literal["per-step", "at-reorder", "at-replenishment"]

class EmpiricalDistribution(BaseModel):
    """
    Histogram of simulated stock levels, highest level first like StateDistribution.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    counts: np.ndarray
    samples: int = Field(..., ge=0)
    sampling_mode: SamplingMode

    @field_validator("counts", mode="before")
    @classmethod
    def _coerce_counts(cls, value: Any) -> np.ndarray:
        return _read_only_vector(value, dtype=np.int64)

    @model_validator(mode="after")
    def _check_counts(self) -> "EmpiricalDistribution":
        if np.any(self.counts < 0):
            raise ValueError("counts must be nonnegative")
        if int(self.counts.sum()) != self.samples:
            raise ValueError(f"counts sum to {int(self.counts.sum())}, expected {self.samples}")
        return self

    @classmethod
    def from_ascending_counts(cls, counts: Any, sampling_mode: SamplingMode) -> "EmpiricalDistribution":
        arr = np.asarray(counts, dtype=np.int64)[::-1]
        return cls(counts=arr, samples=int(arr.sum()), sampling_mode=sampling_mode)

    @property
    def level_max(self) -> int:
        return int(self.counts.size - 1)

    def to_distribution(self) -> StateDistribution:
        if self.samples == 0:
            raise InvalidParameterException(f"No samples recorded for the '{self.sampling_mode}' histogram.")
        return StateDistribution.from_vector(self.counts / self.samples)

    def merge(self, other: "EmpiricalDistribution") -> "EmpiricalDistribution":
        if other.counts.size != self.counts.size or other.sampling_mode != self.sampling_mode:
            raise DimensionMismatchException("Histograms with different level ranges or sampling modes cannot be merged.")
        return EmpiricalDistribution(counts=self.counts + other.counts, samples=self.samples + other.samples,
                                     sampling_mode=self.sampling_mode)

class ComparisonMetrics(BaseModel):
    """
    Analytic versus empirical distance. relative_error is per level, highest first,
    and zero where the analytic probability is zero.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    tv: float
    max_abs: float
    relative_error: np.ndarray

class SimulationConfig(BaseModel):
    """
    Monte Carlo run description. horizon and warmup are in days.
    """
    model_config = ConfigDict(frozen=True)

    strategy: Literal["direct", "indirect"]
    policy: Union[DirectPolicy, IndirectPolicy]
    n_planes: int = Field(..., ge=1)
    n_park: int = Field(1, ge=1)
    horizon: float = Field(..., gt=0.0)
    warmup: float = Field(0.0, ge=0.0)
    seed: int = Field(0, ge=0, lt=2**64)
    trials: int = Field(1, ge=1)
    contact_phase_steps: int = Field(0, ge=0, description="Offset of the round-robin contact schedule [steps]")

    @model_validator(mode="after")
    def _check(self) -> "SimulationConfig":
        if self.horizon <= self.warmup:
            raise ValueError(f"horizon ({self.horizon}) must exceed warmup ({self.warmup})")
        expected = DirectPolicy if self.strategy == "direct" else IndirectPolicy
        if not isinstance(self.policy, expected):
            raise ValueError(f"strategy '{self.strategy}' needs a {expected.__name__}")
        if isinstance(self.policy, IndirectPolicy):
            if self.n_planes * self.policy.k_p != self.n_park * self.policy.k_i:
                raise ValueError("contact schedule needs t_plane * n_park == t_park * n_planes")
        return self

    @property
    def t_mc(self) -> float:
        return self.policy.failure.t_mc

    @property
    def horizon_steps(self) -> int:
        return int(math.floor(self.horizon / self.t_mc + 1e-9))

    @property
    def warmup_steps(self) -> int:
        return int(math.ceil(self.warmup / self.t_mc - 1e-9))

# --- Optimization Schemas ---
class CostParams(BaseModel):
    """
    Cost model of the direct strategy. Prices per satellite; holding per satellite-year.
    """
    model_config = ConfigDict(frozen=True)

    p_build: float = Field(..., ge=0.0)
    p_launch: float = Field(..., ge=0.0)
    p_holding: float = Field(..., ge=0.0)
    gamma: float = Field(..., ge=0.0, lt=1.0, description="Full-capacity launch discount")
    q_max: int = Field(..., ge=1, description="Launch vehicle capacity [satellites]")
    xi: float = Field(..., gt=0.0, le=1.0, description="Allowed long-run P(X < N_sat)")
    n_planes: int = Field(..., ge=1)

class DesignPoint(BaseModel):
    """
    One evaluated (r,q) design; costs per year. c_total is derived from the
    three components and serialized alongside them.
    """
    model_config = ConfigDict(frozen=True)

    r: int
    q: int
    feasible: bool
    c_build: float
    c_launch: float
    c_holding: float
    shortfall: Optional[float] = None
    t_cycle: Optional[float] = Field(None, description="Replenishment cycle [day]")
    status: Literal["ok", "out_of_bounds", "degenerate"] = "ok"
    reason: Optional[str] = None

    @computed_field
    @property
    def c_total(self) -> float:
        return self.c_build + self.c_launch + self.c_holding

class GAParams(BaseModel):
    population: int = Field(default_factory=lambda: settings.GA_POPULATION, ge=4)
    generations: int = Field(default_factory=lambda: settings.GA_GENERATIONS, ge=1)
    parents_mating: int = Field(default_factory=lambda: settings.GA_PARENTS_MATING, ge=2)
    mutation_probability: float = Field(default_factory=lambda: settings.GA_MUTATION_PROBABILITY, ge=0.0, le=1.0)
    seed: int = Field(default_factory=lambda: settings.GA_SEED, ge=0)
    initial_population: Optional[list[tuple[int, int]]] = None

    @model_validator(mode="after")
    def _check_parents(self) -> "GAParams":
        if self.parents_mating > self.population:
            raise ValueError("parents_mating cannot exceed population")
        if self.initial_population is not None and len(self.initial_population) != self.population:
            raise ValueError("initial_population must hold exactly `population` designs")
        return self

# --- Scenario File Schemas ---
class ScenarioOrbit(BaseModel):
    model_config = ConfigDict(extra="forbid")

    semi_major_axis_km: float = Field(..., gt=0.0)
    inclination_deg: float = Field(..., ge=0.0, le=180.0)

class ConstellationBlock(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n_planes: int = Field(..., ge=1)
    n_sats: int = Field(..., ge=1, description="Nominal operating satellites per plane")
    n_park: Optional[int] = Field(None, ge=1)
    t_plane: Optional[float] = Field(None, gt=0.0, description="Explicit plane contact period [day]")
    t_park: Optional[float] = Field(None, gt=0.0, description="Explicit parking contact period [day]")
    plane_orbit: Optional[ScenarioOrbit] = None
    park_orbit: Optional[ScenarioOrbit] = None

class FailureBlock(BaseModel):
    model_config = ConfigDict(extra="forbid")

    lambda_per_year: float = Field(..., ge=0.0, description="Failures per satellite per year")
    t_mc: float = Field(1.0, gt=0.0, description="Markov step [day]")

class LeadTimeBlock(BaseModel):
    model_config = ConfigDict(extra="forbid")

    mean_exp_days: float = Field(..., gt=0.0, description="Mean of the exponential tail, 1/mu [day]")
    t_lv: float = Field(..., ge=0.0, description="Constant offset [day]")

class PolicyBlock(BaseModel):
    model_config = ConfigDict(extra="forbid")

    r: int = Field(..., ge=0)
    q: int = Field(..., ge=1)
    r_p: Optional[int] = Field(None, ge=0)
    q_p: Optional[int] = Field(None, ge=1)

class CostBlock(BaseModel):
    model_config = ConfigDict(extra="forbid")

    p_build: float = Field(..., ge=0.0)
    p_launch: float = Field(..., ge=0.0)
    p_holding: float = Field(..., ge=0.0)
    gamma: float = Field(..., ge=0.0, lt=1.0)
    q_max: int = Field(..., ge=1)
    xi: float = Field(..., gt=0.0, le=1.0)

class GABlock(BaseModel):
    model_config = ConfigDict(extra="forbid")

    enabled: bool = True
    population: Optional[int] = Field(None, ge=4)
    generations: Optional[int] = Field(None, ge=1)
    mutation_probability: Optional[float] = Field(None, ge=0.0, le=1.0)
    seed: Optional[int] = Field(None, ge=0)

class OptimizationBlock(BaseModel):
    model_config = ConfigDict(extra="forbid")

    r_range: Optional[tuple[int, int]] = None
    q_range: Optional[tuple[int, int]] = None
    ga: Optional[GABlock] = None

    @field_validator("r_range", "q_range")
    @classmethod
    def _ordered(cls, value: Optional[tuple[int, int]]) -> Optional[tuple[int, int]]:
        if value is not None and value[0] > value[1]:
            raise ValueError("range lower bound exceeds upper bound")
        return value

class SimulationBlock(BaseModel):
    model_config = ConfigDict(extra="forbid")

    horizon_days: float = Field(..., gt=0.0)
    warmup_days: Optional[float] = Field(None, ge=0.0, description="Defaults to a multiple of the analytic cycle time")
    seed: int = Field(0, ge=0, lt=2**64)
    trials: int = Field(1, ge=1)
    contact_phase_steps: int = Field(0, ge=0)

class ScenarioFile(BaseModel):
    """
    Top-level scenario document.
    """
    model_config = ConfigDict(extra="forbid")

    strategy: Literal["direct", "indirect"]
    name: Optional[str] = None
    constellation: ConstellationBlock
    failure: FailureBlock
    lead_time: LeadTimeBlock
    policy: PolicyBlock
    costs: Optional[CostBlock] = None
    optimization: Optional[OptimizationBlock] = None
    simulation: Optional[SimulationBlock] = None

    @model_validator(mode="after")
    def _check_indirect_inputs(self) -> "ScenarioFile":
        if self.strategy != "indirect":
            return self
        missing = [name for name, value in (("policy.r_p", self.policy.r_p), ("policy.q_p", self.policy.q_p),
                                            ("constellation.n_park", self.constellation.n_park)) if value is None]
        if missing:
            raise ValueError(f"indirect strategy requires {', '.join(missing)}")
        c = self.constellation
        explicit = c.t_plane is not None and c.t_park is not None
        derived = c.plane_orbit is not None and c.park_orbit is not None
        if not (explicit or derived):
            raise ValueError("indirect strategy requires t_plane and t_park, or plane_orbit and park_orbit")
        return self

# --- Report Schemas ---
class TableRef(BaseModel):
    name: str
    file: Optional[str] = None
    units: str
    level_order: Literal["ascending"] = "ascending"
    columns: list[str] = Field(default_factory=list)

class Provenance(BaseModel):
    tool_version: str
    scenario_hash: str
    scenario_path: Optional[str] = None
    seed: Optional[int] = None
    run_id: Optional[str] = None

class ReportBundle(BaseModel):
    """
    Machine-readable summary of one command. Distributions inside `analysis`,
    `simulation` and `comparison` are listed by ascending level.
    """
    command: str
    strategy: str
    provenance: Provenance
    analysis: dict[str, Any] = Field(default_factory=dict)
    simulation: dict[str, Any] = Field(default_factory=dict)
    comparison: dict[str, Any] = Field(default_factory=dict)
    optimization: dict[str, Any] = Field(default_factory=dict)
    tables: list[TableRef] = Field(default_factory=list)
    timings_ms: dict[str, float] = Field(default_factory=dict)

class CommandOutput(BaseModel):
    """
    Sections and tables produced by a service call before the report repository
    writes them. `tables` maps a table name to a pandas DataFrame and `units`
    gives the unit of each table's values.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    analysis: dict[str, Any] = Field(default_factory=dict)
    simulation: dict[str, Any] = Field(default_factory=dict)
    comparison: dict[str, Any] = Field(default_factory=dict)
    optimization: dict[str, Any] = Field(default_factory=dict)
    tables: dict[str, Any] = Field(default_factory=dict)
    units: dict[str, str] = Field(default_factory=dict)
    timings_ms: dict[str, float] = Field(default_factory=dict)
