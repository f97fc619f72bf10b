"""
Файл конфігурації прогону

Формат - рядки key = value (як .env), коментарі через #:

    command = count
    eps = 1
    mu = 1
    eps_hat = 4
    mu_hat = 2
    radius = 1
    t_max = 40

Розбір робить python-dotenv (parse_stream), тому кожна помилка знає свій
рядок. Всі числові параметри живуть тут, не в прапорцях CLI.
"""
from __future__ import annotations

import io
from pathlib import Path
from typing import Dict, List, Literal, Optional

from dotenv.parser import parse_stream
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from telab.errors import ConfigError, LabError
from telab.models.media import MediaConfig, validate_media
from telab.models.mode import ModeId, Polarization, mode_list
from telab.models.spectral import (
    SearchRegion,
    SectorSpec,
    SpectralParameter,
    ray_point,
    validate_k,
)

Command = Literal["scan", "count", "verify", "dispersion"]


def _split_list(value):
    if isinstance(value, str):
        return [item.strip() for item in value.split(",") if item.strip()]
    return value


class RunConfigFile(BaseModel):
    """Плоска схема файлу: одне поле - один ключ"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    command: Command = "verify"
    eps: float
    mu: float
    eps_hat: float
    mu_hat: float
    radius: float = 1.0
    validate_media: bool = Field(default=True, alias="validate")
    # спектральний параметр
    gamma: float = 1.0
    k_abs: Optional[float] = None
    k_arg_degrees: float = 45.0
    k_min: Optional[float] = None
    # дискретизація
    seed: int = 0
    grid_size: int = Field(default=64, ge=8, le=256)
    n_min: int = Field(default=1, ge=1)
    n_max: int = Field(default=3, ge=1)
    polarizations: List[Polarization] = [Polarization.TE, Polarization.TM]
    # область пошуку / відрізок трасування
    re_min: Optional[float] = None
    re_max: Optional[float] = None
    im_min: Optional[float] = None
    im_max: Optional[float] = None
    contour_samples: int = Field(default=64, ge=8)
    max_depth: int = Field(default=24, ge=1)
    samples: int = Field(default=100, ge=2)
    # підрахунок
    t_max: float = Field(default=40.0, gt=0)
    t_points: int = Field(default=40, ge=2)
    margin: float = Field(default=1.3, gt=0)
    audit_gamma: float = Field(default=0.5, gt=0, le=2)
    omega0: float = Field(default=10.0, gt=0)
    # розгортки
    k_magnitudes: List[float] = [10.0, 20.0, 40.0, 80.0]
    probe_radii: List[float] = [10.0, 20.0, 40.0, 80.0, 160.0]

    _lists = field_validator("polarizations", "k_magnitudes", "probe_radii", mode="before")(
        _split_list
    )


class RunConfig(BaseModel):
    """Провалідована конфігурація прогону"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    command: Command
    media: MediaConfig
    spectral: SpectralParameter
    seed: int
    grid_size: int
    modes: List[ModeId]
    region: Optional[SearchRegion]
    contour_samples: int
    max_depth: int
    samples: int
    t_max: float
    t_points: int
    margin: float
    sector: SectorSpec
    k_magnitudes: List[float]
    probe_radii: List[float]
    media_validated: bool
    echo: Dict[str, object]
    output_dir: Optional[Path] = None

    def with_seed(self, seed: int) -> "RunConfig":
        echo = dict(self.echo)
        echo["seed"] = seed
        return self.model_copy(update={"seed": seed, "echo": echo})

    def with_output(self, output_dir: Path | str) -> "RunConfig":
        return self.model_copy(update={"output_dir": Path(output_dir)})


# ============= РОЗБІР =============


def _read_bindings(text: str) -> tuple:
    values: Dict[str, str] = {}
    lines: Dict[str, int] = {}
    for binding in parse_stream(io.StringIO(text)):
        line = binding.original.line
        if binding.error:
            raise ConfigError("malformed line", line=line)
        if binding.key is None:
            # порожній рядок або коментар
            continue
        key = binding.key.strip().lower()
        if key in values:
            raise ConfigError(f"duplicate key (first on line {lines[key]})", key=key, line=line)
        if binding.value is None:
            raise ConfigError("missing value", key=key, line=line)
        values[key] = binding.value
        lines[key] = line
    return values, lines


def _attach_line(err: LabError, key: str, lines: Dict[str, int]) -> LabError:
    err.details.setdefault("key", key)
    err.details.setdefault("line", lines.get(key))
    return err


def parse_run_config(text: str, seed: Optional[int] = None) -> RunConfig:
    """
    Raises:
        ConfigError: синтаксис, невідомий/повторений ключ, невалідне значення
        NonElliptic, ConditionHViolated, SectorViolation, MagnitudeTooSmall,
        RegionError: доменна валідація (з key/line у details)
    """
    values, lines = _read_bindings(text)
    if seed is not None:
        values["seed"] = str(seed)

    try:
        raw = RunConfigFile.model_validate(values)
    except ValidationError as exc:
        first = exc.errors()[0]
        key = str(first["loc"][0]) if first["loc"] else None
        raise ConfigError(first["msg"], key=key, line=lines.get(key)) from None

    if raw.n_max < raw.n_min:
        raise ConfigError("n_max < n_min", key="n_max", line=lines.get("n_max"))

    # ---- середовища ----
    try:
        if raw.validate_media:
            media = validate_media(raw.eps, raw.mu, raw.eps_hat, raw.mu_hat, raw.radius)
        else:
            media = MediaConfig.unchecked(raw.eps, raw.mu, raw.eps_hat, raw.mu_hat, raw.radius)
    except LabError as err:
        key = err.details.get("field") or {"eps/mu": "eps"}.get(
            err.details.get("clause"), err.details.get("clause")
        )
        raise _attach_line(err, key, lines)

    # ---- k ----
    k_abs = raw.k_abs if raw.k_abs is not None else media.default_k_abs()
    k_min = raw.k_min if raw.k_min is not None else media.default_k_min()
    try:
        spectral = validate_k(ray_point(k_abs, raw.k_arg_degrees), raw.gamma, k_min)
    except LabError as err:
        raise _attach_line(err, "k_arg_degrees" if "ratio" in err.details else "k_abs", lines)

    # ---- область ----
    region = None
    bounds = (raw.re_min, raw.re_max, raw.im_min, raw.im_max)
    # для dispersion межі задають відрізок трасування, див. segment_from
    wants_region = raw.command == "scan" or any(b is not None for b in bounds)
    if raw.command != "dispersion" and wants_region:
        defaults = (-20.0, 20.0, -20.0, 20.0)
        re_min, re_max, im_min, im_max = (
            d / media.radius if b is None else b for b, d in zip(bounds, defaults)
        )
        try:
            region = SearchRegion.from_bounds(
                re_min,
                re_max,
                im_min,
                im_max,
                radius=media.radius,
                contour_samples=raw.contour_samples,
                max_depth=raw.max_depth,
            )
        except LabError as err:
            raise _attach_line(err, "re_min", lines)

    try:
        sector = SectorSpec(gamma=raw.audit_gamma, omega0=raw.omega0)
    except ValidationError as exc:
        raise ConfigError(exc.errors()[0]["msg"], key="omega0", line=lines.get("omega0")) from None

    echo = raw.model_dump(by_alias=True, mode="json")

    return RunConfig(
        command=raw.command,
        media=media,
        spectral=spectral,
        seed=raw.seed,
        grid_size=raw.grid_size,
        modes=mode_list(raw.n_min, raw.n_max, raw.polarizations),
        region=region,
        contour_samples=raw.contour_samples,
        max_depth=raw.max_depth,
        samples=raw.samples,
        t_max=raw.t_max,
        t_points=raw.t_points,
        margin=raw.margin,
        sector=sector,
        k_magnitudes=raw.k_magnitudes,
        probe_radii=raw.probe_radii,
        media_validated=raw.validate_media,
        echo=echo,
    )


def load_run_config(path: Path | str, seed: Optional[int] = None) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    return parse_run_config(text, seed=seed)


def segment_from(config: RunConfig, raw_echo: Optional[dict] = None) -> tuple:
    """Відрізок трасування дисперсії з re/im меж (за замовчуванням [0.1, 10]/R)"""
    echo = raw_echo or config.echo
    r = config.media.radius
    re_min = echo.get("re_min")
    re_max = echo.get("re_max")
    im_min = echo.get("im_min")
    im_max = echo.get("im_max")
    start = complex(0.1 / r if re_min is None else re_min, 0.0 if im_min is None else im_min)
    stop = complex(10.0 / r if re_max is None else re_max, 0.0 if im_max is None else im_max)
    return start, stop

