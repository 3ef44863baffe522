"""Роуты численных норм и полунорм"""
import logging
from typing import Optional

from fastapi import APIRouter, Query
from fastapi.concurrency import run_in_threadpool

from ..schemas.run_config import GlobalConfig, NormConfig, NormKind, NormParams
from ..services.runs import config_echo, evaluate_norm
from ..utils.serialization import make_json_safe
from ..utils.structured_logging import log_event

logger = logging.getLogger(__name__)

router = APIRouter()


@router.post("/{kind}")
async def compute_norm(
    kind: NormKind,
    params: NormParams,
    seed: Optional[int] = Query(default=None),
    threads: Optional[int] = Query(default=None, ge=1),
):
    """
    Норма указанного вида для поля из тела запроса.

    Квадратуры выполняются в пуле потоков, чтобы не блокировать цикл событий.
    """
    g = GlobalConfig(**{k: v for k, v in {"seed": seed, "threads": threads}.items() if v is not None})
    cfg = NormConfig(kind=kind, **params.model_dump())
    result = await run_in_threadpool(evaluate_norm, cfg, g)
    log_event(logger, logging.INFO, f"norms/{kind} computed", {
        "value": result.get("value"),
        "classification": result.get("classification"),
        "method": result.get("method"),
    })
    return make_json_safe({"config_echo": config_echo("norm", g, cfg), "kind": kind, "result": result})
