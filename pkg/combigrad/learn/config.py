"""
Configuración de experimentos: documento JSON validado con pydantic, más
los presets por familia.
"""
import hashlib
import json
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from combigrad.errors import ConfigError

# C_k del término repelente por número de ciudades
REPELLENT_C_K = {5: 2.0, 10: 3.0, 20: 6.0, 40: 20.0}

# ruido de features cuando el documento no trae "noise"
FEATURE_NOISE = {"sp": 0.1, "tsp": 0.0, "pm": 0.0}


class TrainConfig(BaseModel):
    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    family: Literal["sp", "tsp", "pm"]
    k: int = Field(..., ge=2)
    lam: float = Field(..., alias="lambda", gt=0)
    lr: float = Field(1e-3, gt=0)
    betas: Tuple[float, float] = (0.9, 0.999)
    eps: float = Field(1e-8, gt=0)
    epochs: int = Field(10, ge=1)
    batch: int = Field(32, ge=1)
    seed: int = 0
    schedule: List[int] = Field(default_factory=list)
    repellent_window: Optional[Tuple[int, int]] = None
    c_k: float = Field(0.0, ge=0)

    train_size: int = Field(1000, ge=1)
    test_size: int = Field(200, ge=0)
    solver: Literal["exact", "approx"] = "exact"
    connectivity: Literal[4, 8] = 8
    n_terrain_types: int = Field(5, ge=2)
    noise: Optional[float] = Field(None, ge=0)
    pool: int = Field(100, ge=3)
    flag_dim: Optional[int] = Field(None, ge=1)
    hidden: int = Field(0, ge=0)
    weight_floor: float = Field(1e-3, gt=0)

    @model_validator(mode="after")
    def _check_family(self):
        if self.family == "pm" and self.k % 2:
            raise ValueError("matching needs an even k")
        if self.family == "tsp" and self.pool < self.k:
            raise ValueError("city pool must be at least k")
        if self.solver == "approx" and self.family != "tsp":
            raise ValueError("the approximate solver only exists for tsp")
        if self.repellent_window is not None and self.repellent_window[0] > self.repellent_window[1]:
            raise ValueError("repellent_window must be (start, end) with start <= end")
        return self

    def to_json_dict(self) -> Dict[str, Any]:
        return json.loads(self.model_dump_json(by_alias=True))

    def config_hash(self) -> str:
        payload = json.dumps(self.to_json_dict(), sort_keys=True)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def feature_noise(self) -> float:
        return FEATURE_NOISE[self.family] if self.noise is None else self.noise

    def repellent_active(self, epoch: int) -> bool:
        if self.repellent_window is None or self.c_k <= 0:
            return False
        start, end = self.repellent_window
        return start <= epoch < end


def preset(family: str, k: int, **overrides: Any) -> TrainConfig:
    """
    Hiperparámetros publicados (lambda, schedule, batch, épocas, Adam de
    TSP, ventana repelente). Los learning rates son más altos porque los
    extractores acá son afines y chicos.
    """
    if family == "sp":
        base: Dict[str, Any] = dict(lam=20.0, lr=5e-2, epochs=50, batch=70, schedule=[30, 40])
    elif family == "pm":
        base = dict(lam=10.0, lr=5e-2, epochs=50, batch=70, schedule=[30, 40])
    elif family == "tsp":
        base = dict(
            lam=20.0,
            lr=1e-2,
            betas=(0.5, 0.999),
            eps=1e-3,
            epochs=100,
            batch=50,
            schedule=[80, 90],
            repellent_window=(15, 30),
            c_k=REPELLENT_C_K.get(k, 2.0),
        )
    else:
        raise ConfigError(f"unknown family {family!r}", family=family)
    if "lambda" in overrides:
        overrides["lam"] = overrides.pop("lambda")
    base.update(family=family, k=k)
    base.update(overrides)
    return _validate(base)


def _validate(data: Dict[str, Any]) -> TrainConfig:
    try:
        return TrainConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError("invalid training config", errors=json.loads(e.json())) from e


def load_config(source: Union[str, Path, Dict[str, Any]]) -> TrainConfig:
    """
    Carga un TrainConfig desde un dict o un archivo JSON. Si el documento
    trae "preset": true, los campos presentes pisan al preset de su
    family/k.
    """
    if isinstance(source, dict):
        data = dict(source)
    else:
        try:
            data = json.loads(Path(source).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config: {e}", path=str(source)) from e
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")

    if data.get("preset"):
        data.pop("preset")
        family, k = data.pop("family", None), data.pop("k", None)
        if family is None or k is None:
            raise ConfigError("a preset config needs family and k")
        return preset(family, int(k), **data)
    return _validate(data)
