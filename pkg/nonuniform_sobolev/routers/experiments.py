"""
Роуты экспериментов: теплопроводность, сходимость дисперсионного
пропагатора и наборы проверок.
"""
import logging
from typing import Optional

from fastapi import APIRouter, Query
from fastapi.concurrency import run_in_threadpool

from ..schemas.run_config import GlobalConfig, HeatConfig, SchrodingerConfig, VerifyConfig
from ..schemas.verify import SuiteConfig
from ..services.runs import run_heat, run_schrodinger
from ..services.verify import run_suite_async
from ..utils.serialization import make_json_safe
from ..utils.structured_logging import log_event

logger = logging.getLogger(__name__)

router = APIRouter()


def _global(seed: Optional[int], threads: Optional[int]) -> GlobalConfig:
    overrides = {"seed": seed, "threads": threads}
    return GlobalConfig(**{k: v for k, v in overrides.items() if v is not None})


@router.post("/heat")
async def heat_experiment(
    config: HeatConfig,
    seed: Optional[int] = Query(default=None),
    threads: Optional[int] = Query(default=None, ge=1),
):
    """Энергетические оценки для уравнения теплопроводности"""
    report = await run_in_threadpool(run_heat, config, _global(seed, threads))
    return make_json_safe(report.model_dump(exclude={"generated_at"}))


@router.post("/schrodinger")
async def schrodinger_experiment(
    config: SchrodingerConfig,
    seed: Optional[int] = Query(default=None),
    threads: Optional[int] = Query(default=None, ge=1),
):
    """Поточечная сходимость при t → 0 в пробных точках"""
    report = await run_in_threadpool(run_schrodinger, config, _global(seed, threads))
    return make_json_safe(report.model_dump(exclude={"generated_at"}))


@router.post("/verify")
async def verify_suite(
    config: Optional[VerifyConfig] = None,
    seed: Optional[int] = Query(default=None),
    threads: Optional[int] = Query(default=None, ge=1),
):
    """
    Набор проверок. Провал проверки не меняет HTTP-статус: результат
    возвращается в outcomes и summary.
    """
    config = config or VerifyConfig()
    g = _global(seed, threads)
    report = await run_suite_async(SuiteConfig(suite=config.suite, checks=config.checks, seed=g.seed, threads=g.threads))
    log_event(logger, logging.INFO, "verify suite finished", report.summary.model_dump(by_alias=True))
    return report.to_json_dict()
