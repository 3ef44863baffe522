"""
INI-файлы запусков и сборка конфигураций команд.

Порядок приоритета: флаги CLI > переменные окружения (RUN_SEED, RUN_THREADS)
> секции файла > настройки по умолчанию.
"""
import configparser
import logging
import os
from pathlib import Path
from typing import Any, Dict, List, Optional, Type, TypeVar, Union

from pydantic import BaseModel, ValidationError

from ..exceptions import ConfigError
from ..schemas.run_config import GlobalConfig
from ..services.evolution import geometric_times
from ..services.fields import default_grid

logger = logging.getLogger(__name__)

ModelT = TypeVar("ModelT", bound=BaseModel)

# ключ секции -> поле FieldSpec
FIELD_KEYS = {
    "family": "family",
    "initial": "family",
    "N": "N",
    "amplitude": "amplitude",
    "center": "center",
    "sigma": "sigma",
    "delta": "delta",
    "lam": "lam",
    "bubble_p": "p",
    "radius": "radius",
    "scale": "scale",
    "shape": "shape",
    "input": "path",
}
GRID_KEYS = ("L", "n")
LIST_KEYS = {"center", "probes", "epsilons", "T_list", "q_list", "checks"}
ENV_OVERRIDES = {"seed": "RUN_SEED", "threads": "RUN_THREADS"}


def load_ini(path: Union[str, Path]) -> Dict[str, Dict[str, str]]:
    """Секции INI как словари строк; ключи сохраняют регистр"""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"Config file not found: {path}", field="config")
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as e:
        raise ConfigError(f"Malformed config file {path}: {e}", field="config")
    sections = {name: dict(parser.items(name)) for name in parser.sections()}
    logger.debug(f"Loaded config {path}: sections={list(sections)}")
    return sections


def parse_times(value: Union[str, List[float]], field: str = "times") -> List[float]:
    """'geom:start:end:count' или список через запятую"""
    if isinstance(value, list):
        return [float(v) for v in value]
    text = str(value).strip()
    if text.startswith("geom:"):
        parts = text.split(":")
        if len(parts) != 4:
            raise ConfigError(f"Expected geom:start:end:count, got {text!r}", field=field)
        try:
            start, end, count = float(parts[1]), float(parts[2]), int(parts[3])
        except ValueError:
            raise ConfigError(f"Invalid geometric grid {text!r}", field=field)
        try:
            return geometric_times(start, end, count)
        except ConfigError as e:
            raise ConfigError(e.message, field=field)
    try:
        return [float(v) for v in _split(text, field)]
    except ValueError:
        raise ConfigError(f"Invalid time list {text!r}", field=field)


def _split(text: str, field: str) -> List[str]:
    items = [item.strip() for item in text.split(",") if item.strip()]
    if not items:
        raise ConfigError(f"Empty list for {field}", field=field)
    return items


def _normalize(section: str, data: Dict[str, Any]) -> Dict[str, Any]:
    out: Dict[str, Any] = {}
    for key, value in data.items():
        if isinstance(value, str) and key == "times":
            out[key] = parse_times(value, f"{section}.times")
        elif isinstance(value, str) and key in LIST_KEYS:
            out[key] = _split(value, f"{section}.{key}") if value.strip() else []
        else:
            out[key] = value
    return out


def _field_data(data: Dict[str, Any]) -> Dict[str, Any]:
    """Выделяет из плоской секции ключи поля и сетки"""
    spec: Dict[str, Any] = {}
    for key, target in FIELD_KEYS.items():
        if key in data:
            spec[target] = data.pop(key)
    grid = {k: data.pop(k) for k in GRID_KEYS if k in data}
    if grid:
        try:
            N = int(spec.get("N", 1))
        except (TypeError, ValueError):
            N = 1
        fallback = default_grid(N) if 1 <= N <= 3 else None
        spec["grid"] = {
            "L": grid.get("L", fallback.L if fallback else None),
            "n": grid.get("n", fallback.n if fallback else None),
        }
    return spec


def _error_field(section: str, loc: tuple) -> str:
    if loc and loc[0] == "field":
        reverse = {v: k for k, v in FIELD_KEYS.items() if k != "initial"}
        inner = loc[1:] if len(loc) > 1 else ("family",)
        if inner[0] == "grid":
            return f"{section}.{inner[1] if len(inner) > 1 else 'L'}"
        return f"{section}.{reverse.get(str(inner[0]), inner[0])}"
    return f"{section}." + ".".join(str(part) for part in loc if not isinstance(part, int)) if loc else section


def validate_section(model: Type[ModelT], section: str, data: Dict[str, Any], with_field: bool = False) -> ModelT:
    """
    Проверяет плоскую секцию моделью; ошибка становится ConfigError
    с именем поля вида 'section.key'.
    """
    flat = _normalize(section, {k: v for k, v in data.items() if v is not None})
    if with_field:
        flat["field"] = _field_data(flat)
    try:
        return model.model_validate(flat)
    except ValidationError as e:
        first = e.errors()[0]
        field = _error_field(section, tuple(first.get("loc", ())))
        raise ConfigError(f"Invalid {field}: {first.get('msg')}", field=field, details={"errors": len(e.errors())})


def merge_sections(file_section: Optional[Dict[str, Any]], overrides: Dict[str, Any]) -> Dict[str, Any]:
    """Флаги, заданные явно (не None), перекрывают значения файла"""
    merged = dict(file_section or {})
    merged.update({k: v for k, v in overrides.items() if v is not None})
    return merged


def resolve_global(file_global: Optional[Dict[str, Any]], overrides: Dict[str, Any]) -> GlobalConfig:
    """Файл, затем переменные окружения, затем флаги"""
    data = dict(file_global or {})
    for key, env in ENV_OVERRIDES.items():
        if env in os.environ:
            data[key] = os.environ[env]
    data.update({k: v for k, v in overrides.items() if v is not None})
    return validate_section(GlobalConfig, "global", data)
