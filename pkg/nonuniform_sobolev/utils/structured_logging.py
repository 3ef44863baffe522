"""
Логирование CLI и API: человекочитаемый формат или JSON-строки.

JSON-строка содержит уровень, логгер, сообщение, имя прогона (для логгеров
nonuniform_sobolev.run.*) и контекст, переданный через log_event.
"""
import json
import logging
from datetime import datetime, timezone
from typing import Any, Dict, Optional

RUN_LOGGER_PREFIX = "nonuniform_sobolev.run."
PLAIN_FORMAT = "%(asctime)s [%(levelname)s] [%(name)s] %(message)s"

# стандартные атрибуты LogRecord, которые не попадают в extra
_RECORD_ATTRS = frozenset(vars(logging.LogRecord("", 0, "", 0, "", (), None))) | {"message", "asctime"}


def _json_default(value: Any) -> Any:
    # numpy-скаляры и массивы без импорта numpy
    if hasattr(value, "tolist"):
        return value.tolist()
    return str(value)


class StructuredFormatter(logging.Formatter):
    """Одна JSON-строка на запись"""

    def format(self, record: logging.LogRecord) -> str:
        entry: Dict[str, Any] = {
            "timestamp": datetime.fromtimestamp(record.created, timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }
        if record.name.startswith(RUN_LOGGER_PREFIX):
            entry["run"] = record.name[len(RUN_LOGGER_PREFIX):]

        context = getattr(record, "context", None)
        if context:
            entry["context"] = context

        extra = {k: v for k, v in record.__dict__.items() if k not in _RECORD_ATTRS and k != "context"}
        if extra:
            entry["extra"] = extra

        if record.exc_info:
            entry["exception"] = self.formatException(record.exc_info)

        return json.dumps(entry, ensure_ascii=False, default=_json_default)


def configure_logging(level: str = "INFO", fmt: str = "plain") -> None:
    """
    Настраивает корневой логгер для CLI и API.

    Args:
        level: Имя уровня (INFO, DEBUG, ...)
        fmt: plain - человекочитаемый формат, json - StructuredFormatter
    """
    root = logging.getLogger()
    root.setLevel(getattr(logging, level.upper(), logging.INFO))
    for handler in list(root.handlers):
        root.removeHandler(handler)
    handler = logging.StreamHandler()
    if fmt == "json":
        handler.setFormatter(StructuredFormatter())
    else:
        handler.setFormatter(logging.Formatter(PLAIN_FORMAT, datefmt="%Y-%m-%d %H:%M:%S"))
    root.addHandler(handler)


def log_event(
    logger: logging.Logger,
    level: int,
    message: str,
    context: Optional[Dict[str, Any]] = None,
) -> None:
    """
    Сообщение с контекстом: пары key=value дописываются к тексту,
    JSON-формат дополнительно получает их в поле context.
    """
    if not logger.isEnabledFor(level):
        return
    context = dict(context or {})
    suffix = " ".join(f"{k}={v}" for k, v in context.items())
    logger.log(level, f"{message} ({suffix})" if suffix else message, extra={"context": context})
