"""Pydantic configuration models with full validation."""

from __future__ import annotations

from enum import StrEnum

from pydantic import BaseModel, Field, field_validator, model_validator


class DataSource(StrEnum):
    SYNTHETIC = "synthetic"
    FILES = "files"


class UnfoldMode(StrEnum):
    FULL = "full"
    ASYMMETRIC = "asymmetric"


class OrderKind(StrEnum):
    AS_LOADED = "as_loaded"
    RANDOM_SHUFFLE = "random_shuffle"
    FIXED_BY_FEATURE = "fixed_by_feature"


class VisitOrder(StrEnum):
    LOOP = "loop"
    UNIFORM_RANDOM = "uniform_random"


class OutputMode(StrEnum):
    CLASSIFICATION = "classification"
    REGRESSION = "regression"


class BaselineName(StrEnum):
    MAJORITY = "majority"
    KOS = "kos"
    EM = "em"
    AVG = "avg"
    EM_GRADES = "em_grades"
    PROPORTIONAL = "proportional"


# ── Synthetic data ───────────────────────────────────────
class IndicatorSpec(BaseModel):
    enabled: bool = False
    p_true_given_reliable: float = Field(ge=0.0, le=1.0, default=0.9)
    p_true_given_unreliable: float = Field(ge=0.0, le=1.0, default=0.4)


class SynthSpec(BaseModel):
    n_items: int = Field(ge=1, default=3000)
    n_users: int = Field(ge=1, default=3000)
    p_reliable: float = Field(ge=0.0, le=1.0, default=0.6)
    votes_per_item: int = Field(ge=1, default=3)
    class_balance: float = Field(ge=0.0, le=1.0, default=0.5)
    seed: int | None = None
    indicator: IndicatorSpec = Field(default_factory=IndicatorSpec)

    @model_validator(mode="after")
    def check_votes(self) -> SynthSpec:
        if self.votes_per_item > self.n_users:
            raise ValueError(
                f"votes_per_item ({self.votes_per_item}) must be <= n_users ({self.n_users})"
            )
        return self


# ── Data ─────────────────────────────────────────────────
class DataConfig(BaseModel):
    source: DataSource = DataSource.SYNTHETIC
    synth: SynthSpec = Field(default_factory=SynthSpec)
    edges_path: str | None = None
    labels_path: str | None = None
    bidirectional: bool = True
    standardize: bool = False
    n_train: int = Field(ge=1, default=1000)

    @model_validator(mode="after")
    def check_paths(self) -> DataConfig:
        if self.source == DataSource.FILES and not (self.edges_path and self.labels_path):
            raise ValueError("data.source=files requires edges_path and labels_path")
        return self


# ── Model ────────────────────────────────────────────────
class ModelConfig(BaseModel):
    depth: int = Field(ge=1, le=8, default=1)
    level_sizes: list[int] = Field(default=[2])
    output_mode: OutputMode = OutputMode.CLASSIFICATION

    @field_validator("level_sizes")
    @classmethod
    def validate_sizes(cls, v: list[int]) -> list[int]:
        if not all(k >= 1 for k in v):
            raise ValueError("All level sizes must be positive integers")
        return v

    @model_validator(mode="after")
    def check_depth(self) -> ModelConfig:
        if len(self.level_sizes) != self.depth:
            raise ValueError(
                f"level_sizes has {len(self.level_sizes)} entries, expected depth={self.depth}"
            )
        if self.output_mode == OutputMode.CLASSIFICATION and self.level_sizes[0] < 2:
            raise ValueError("Classification needs level_sizes[0] (class count) >= 2")
        return self


# ── Training ─────────────────────────────────────────────
class ChildOrderConfig(BaseModel):
    policy: OrderKind = OrderKind.RANDOM_SHUFFLE
    feature_index: int = Field(ge=0, default=0)
    ascending: bool = True


class OptimizerConfig(BaseModel):
    rho: float = Field(gt=0.0, lt=1.0, default=0.95)
    epsilon: float = Field(gt=0.0, default=1e-6)
    scales: list[float] | None = None  # one per level, defaults to 1.0

    @field_validator("scales")
    @classmethod
    def validate_scales(cls, v: list[float] | None) -> list[float] | None:
        if v is not None and not all(s > 0 for s in v):
            raise ValueError("All learning scales must be > 0")
        return v

    def scale_for(self, level: int) -> float:
        if self.scales is None:
            return 1.0
        return self.scales[level]


class TrainConfig(BaseModel):
    unfolding: UnfoldMode = UnfoldMode.ASYMMETRIC
    child_order: ChildOrderConfig = Field(default_factory=ChildOrderConfig)
    optimizer: OptimizerConfig = Field(default_factory=OptimizerConfig)
    epochs: int = Field(ge=1, default=20)
    eval_every: int = Field(ge=1, default=1)
    visit_order: VisitOrder = VisitOrder.LOOP
    seed: int = 0


# ── Baselines ────────────────────────────────────────────
class BaselineConfig(BaseModel):
    name: BaselineName = BaselineName.EM
    vote_feature: int = Field(ge=0, default=0)
    kos_iterations: int = Field(ge=1, default=10)
    em_alpha: float = Field(gt=0.0, default=1.2)
    em_beta: float = Field(gt=0.0, default=1.0)
    em_iterations: int = Field(ge=1, default=50)
    grade_iterations: int = Field(ge=1, default=20)
    var_floor: float = Field(gt=0.0, default=0.05)


# ── Logging ──────────────────────────────────────────────
class FileLogConfig(BaseModel):
    enabled: bool = True
    path: str
    level: str = "INFO"
    rotation: str = "50 MB"
    retention: str = "30 days"


class FilesConfig(BaseModel):
    main: FileLogConfig = Field(default_factory=lambda: FileLogConfig(path="logs/mlsl.log"))
    metrics: FileLogConfig = Field(default_factory=lambda: FileLogConfig(path="logs/metrics.json", retention="7 days"))
    errors: FileLogConfig = Field(default_factory=lambda: FileLogConfig(path="logs/errors.log", level="WARNING", retention="90 days"))


class ConsoleConfig(BaseModel):
    enabled: bool = True
    colorize: bool = True


class LoggingConfig(BaseModel):
    level: str = "INFO"
    console: ConsoleConfig = Field(default_factory=ConsoleConfig)
    files: FilesConfig = Field(default_factory=FilesConfig)

    @field_validator("level")
    @classmethod
    def validate_level(cls, v: str) -> str:
        allowed = {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}
        if v.upper() not in allowed:
            raise ValueError(f"Invalid log level: {v}. Must be one of {allowed}")
        return v.upper()


# ── Root Config ──────────────────────────────────────────
class RunConfig(BaseModel):
    seed: int = 0
    output_dir: str = "runs/default"
    logging: LoggingConfig = Field(default_factory=LoggingConfig)
    data: DataConfig = Field(default_factory=DataConfig)
    model: ModelConfig = Field(default_factory=ModelConfig)
    train: TrainConfig = Field(default_factory=TrainConfig)
    baseline: BaselineConfig = Field(default_factory=BaselineConfig)

    @model_validator(mode="after")
    def sync_levels(self) -> RunConfig:
        scales = self.train.optimizer.scales
        if scales is not None and len(scales) != self.model.depth:
            raise ValueError(
                f"train.optimizer.scales has {len(scales)} entries, expected depth={self.model.depth}"
            )
        return self

    def resolved_train(self) -> TrainConfig:
        """TrainConfig carrying the master seed."""
        return self.train.model_copy(update={"seed": self.seed})

    def resolved_synth(self) -> SynthSpec:
        """SynthSpec whose seed falls back to the master seed."""
        if self.data.synth.seed is not None:
            return self.data.synth
        return self.data.synth.model_copy(update={"seed": self.seed})
