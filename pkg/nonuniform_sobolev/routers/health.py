"""Роуты для проверки здоровья сервиса"""
from fastapi import APIRouter

from .. import __version__
from ..config import settings
from ..services.verify import list_checks

router = APIRouter()


@router.get("/health")
async def health():
    """Базовая проверка здоровья сервиса"""
    return {
        "status": "ok",
        "version": __version__,
        "env": settings.ENV,
        "seed": settings.RUN_SEED,
        "threads": settings.RUN_THREADS,
    }


@router.get("/health/checks")
async def health_checks():
    """Зарегистрированные проверки свойств и приемки"""
    try:
        names = list_checks()
        return {
            "checks_count": len(names),
            "acceptance": [n for n in names if n.startswith("acceptance.")],
            "property": [n for n in names if not n.startswith("acceptance.")],
        }
    except Exception as e:
        return {"checks_count": 0, "error": str(e)}
