"""
Главный файл FastAPI приложения.

HTTP-доступ к исчислению показателей, численным нормам, экспериментам
и наборам проверок.
"""
import logging
from contextlib import asynccontextmanager

from fastapi import FastAPI, Request, status
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from . import __version__
from .config import settings
from .exceptions import (
    ConfigError,
    DomainError,
    PreconditionError,
    SerializationError,
    SobolevError,
    UnsupportedDerivativeError,
)
from .routers import experiments, health, indices, norms
from .services.verify import list_checks
from .utils.structured_logging import configure_logging

logger = logging.getLogger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI):
    """
    При старте настраивает логирование и регистрирует встроенные проверки.
    """
    # Startup
    print("🚀 Запуск приложения...")
    configure_logging(settings.LOG_LEVEL, settings.LOG_FORMAT)
    try:
        checks = list_checks()
        print(f"✓ Зарегистрировано проверок: {len(checks)}")
    except Exception as e:
        logger.error(f"Failed to register checks: {e}", exc_info=True)
        print(f"⚠️  Предупреждение: проверки не зарегистрированы: {e}")
    print(f"ℹ️  seed={settings.RUN_SEED}, threads={settings.RUN_THREADS}")

    yield

    # Shutdown
    print("🛑 Остановка приложения...")


app = FastAPI(
    title="Nonuniform Sobolev API",
    description="""
    Неоднородные пространства Соболева W_s^{p⃗}.

    ## Исчисление показателей
    `POST /api/indices/{operation}`: точные вердикты вложений, плотности,
    сходимости; рациональные числа передаются строками ("3/2").

    ## Нормы
    `POST /api/norms/{kind}`: L^p, Гальярдо, направленные полунормы,
    норма W_s^{p⃗}, H^s по Фурье и весовая норма Фурье.

    ## Эксперименты
    `POST /api/experiments/heat`, `/schrodinger`, `/verify`.
    """,
    version=__version__,
    lifespan=lifespan,
    docs_url="/docs",
    redoc_url="/redoc",
    openapi_url="/openapi.json",
)


def _error_body(exc: SobolevError) -> dict:
    return {"detail": exc.message, "details": exc.details}


@app.exception_handler(RequestValidationError)
async def validation_exception_handler(request: Request, exc: RequestValidationError):
    """Обработчик ошибок валидации Pydantic"""
    errors = [
        {"type": e.get("type"), "loc": list(e.get("loc", ())), "msg": e.get("msg")}
        for e in exc.errors()
    ]
    logger.warning(f"Validation error: {errors}")
    return JSONResponse(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, content={"detail": errors})


@app.exception_handler(PreconditionError)
async def precondition_error_handler(request: Request, exc: PreconditionError):
    """Нарушено предусловие: в details указано неравенство"""
    logger.warning(f"Precondition violated ({exc.inequality}): {exc.message}")
    return JSONResponse(status_code=status.HTTP_400_BAD_REQUEST, content=_error_body(exc))


@app.exception_handler(DomainError)
async def domain_error_handler(request: Request, exc: DomainError):
    logger.warning(f"Domain error: {exc.message}")
    return JSONResponse(status_code=status.HTTP_400_BAD_REQUEST, content=_error_body(exc))


@app.exception_handler(SerializationError)
async def serialization_error_handler(request: Request, exc: SerializationError):
    logger.warning(f"Serialization error: {exc.message}")
    return JSONResponse(status_code=status.HTTP_400_BAD_REQUEST, content=_error_body(exc))


@app.exception_handler(ConfigError)
async def config_error_handler(request: Request, exc: ConfigError):
    """Ошибка конфигурации: в details указано поле"""
    logger.warning(f"Config error ({exc.field}): {exc.message}")
    return JSONResponse(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, content=_error_body(exc))


@app.exception_handler(UnsupportedDerivativeError)
async def unsupported_derivative_handler(request: Request, exc: UnsupportedDerivativeError):
    logger.warning(f"Unsupported derivative: {exc.message}")
    return JSONResponse(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, content=_error_body(exc))


@app.exception_handler(SobolevError)
async def sobolev_error_handler(request: Request, exc: SobolevError):
    """Обработчик общих ошибок вычислений"""
    logger.error(f"Computation error: {exc.message}", exc_info=True)
    return JSONResponse(status_code=status.HTTP_500_INTERNAL_SERVER_ERROR, content=_error_body(exc))


@app.exception_handler(Exception)
async def general_exception_handler(request: Request, exc: Exception):
    """Глобальный обработчик исключений"""
    logger.error(f"Unhandled exception: {exc}", exc_info=True)
    return JSONResponse(
        status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
        content={"detail": f"Internal server error: {str(exc)}"},
    )

# Подключаем роуты
app.include_router(health.router, prefix="/api", tags=["health"])
app.include_router(indices.router, prefix="/api/indices", tags=["indices"])
app.include_router(norms.router, prefix="/api/norms", tags=["norms"])
app.include_router(experiments.router, prefix="/api/experiments", tags=["experiments"])


@app.get("/")
async def root():
    """Корневой endpoint"""
    return {
        "service": "Nonuniform Sobolev",
        "version": __version__,
        "status": "running",
    }


if __name__ == "__main__":
    import uvicorn
    uvicorn.run(
        "nonuniform_sobolev.main:app",
        host=settings.APP_HOST,
        port=settings.APP_PORT,
        reload=settings.DEBUG,
    )
