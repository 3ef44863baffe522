"""
Запись и чтение полей и отчетов.

Бинарный контейнер сеточного поля: заголовок N, L (float64 LE), n (int64 LE),
затем n^N комплексных чисел complex128 LE в порядке row-major.
"""
import csv
import io
import json
import logging
import math
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Union

import numpy as np

from ..exceptions import PreconditionError, SerializationError
from ..services.fields import GridSpec, SampledField

logger = logging.getLogger(__name__)

HEADER_BYTES = 24
PathLike = Union[str, Path]


def encode_field(field: SampledField) -> bytes:
    grid = field.grid
    header = np.array([grid.N, grid.L], dtype="<f8").tobytes() + np.array([grid.n], dtype="<i8").tobytes()
    return header + np.ascontiguousarray(field.values, dtype="<c16").tobytes()


def decode_field(payload: bytes) -> SampledField:
    """
    Raises:
        SerializationError: короткий заголовок, неверный размер или
            параметры сетки вне допустимых
    """
    if len(payload) < HEADER_BYTES:
        raise SerializationError("Field container shorter than its header", details={"size": len(payload)})
    N_raw, L = np.frombuffer(payload[:16], dtype="<f8")
    n = int(np.frombuffer(payload[16:24], dtype="<i8")[0])
    if not float(N_raw).is_integer() or n <= 0:
        raise SerializationError("Corrupt field header", details={"N": float(N_raw), "n": n})
    N = int(N_raw)
    expected = HEADER_BYTES + 16 * n ** N if 0 < N <= 3 else -1
    if len(payload) != expected:
        raise SerializationError(
            "Field container size does not match its header",
            details={"N": N, "n": n, "size": len(payload), "expected": expected},
        )
    try:
        grid = GridSpec(N, float(L), n)
        values = np.frombuffer(payload[HEADER_BYTES:], dtype="<c16").reshape(grid.shape)
        return SampledField(grid, values.copy())
    except PreconditionError as e:
        raise SerializationError(f"Invalid field container: {e.message}", details=e.details)


def write_field(field: SampledField, path: PathLike) -> Path:
    path = Path(path)
    path.write_bytes(encode_field(field))
    logger.debug(f"Field written: {path} (N={field.grid.N}, n={field.grid.n})")
    return path


def read_field(path: PathLike) -> SampledField:
    path = Path(path)
    if not path.is_file():
        raise SerializationError(f"Field file not found: {path}", details={"path": str(path)})
    return decode_field(path.read_bytes())


def export_csv(field: SampledField, path: Optional[PathLike] = None) -> str:
    """Одномерное поле в CSV: x, re, im"""
    if field.grid.N != 1:
        raise PreconditionError(f"CSV export is one-dimensional, got N={field.grid.N}", inequality="N = 1")
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["x", "re", "im"])
    for x, v in zip(field.grid.axis(), field.values):
        writer.writerow([repr(float(x)), repr(float(v.real)), repr(float(v.imag))])
    text = buffer.getvalue()
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


# ============================================================================
# Отчеты
# ============================================================================

def timestamp() -> str:
    return datetime.now(timezone.utc).replace(microsecond=0).isoformat()


def make_json_safe(obj: Any) -> Any:
    """Приводит вложенные значения к типам JSON; inf/nan становятся null"""
    if isinstance(obj, dict):
        return {str(k): make_json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [make_json_safe(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return make_json_safe(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return value if math.isfinite(value) else None
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def render_json(payload: Dict[str, Any], with_timestamp: bool = False) -> str:
    body = make_json_safe(payload)
    if with_timestamp:
        body["generated_at"] = timestamp()
    return json.dumps(body, indent=2, ensure_ascii=False) + "\n"


def _csv_cell(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value) if math.isfinite(value) else ""
    return "" if value is None else str(value)


def render_csv(
    columns: List[str],
    rows: Iterable[Dict[str, Any]],
    comments: Iterable[str] = (),
    with_timestamp: bool = False,
) -> str:
    """CSV (RFC 4180) с комментариями '# ...' над заголовком"""
    buffer = io.StringIO()
    for line in comments:
        buffer.write(f"# {line}\n")
    if with_timestamp:
        buffer.write(f"# generated_at: {timestamp()}\n")
    writer = csv.writer(buffer, lineterminator="\r\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_csv_cell(row.get(c)) for c in columns])
    return buffer.getvalue()


def write_text(text: str, path: Optional[PathLike]) -> None:
    """Пишет в файл или, если путь не задан, в stdout"""
    if path is None:
        print(text, end="")
        return
    Path(path).write_text(text, encoding="utf-8", newline="")
    logger.info(f"✓ Report written: {path}")
