from typing import Optional
from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Настройки приложения из переменных окружения"""

    # Application
    APP_HOST: str = "0.0.0.0"
    APP_PORT: int = 7070
    ENV: str = "dev"
    DEBUG: bool = False

    # Logging
    LOG_LEVEL: str = Field(default="INFO", description="Уровень логирования")
    LOG_FORMAT: str = Field(default="plain", description="Формат логов: plain или json")

    # Воспроизводимость
    RUN_SEED: int = Field(default=20240501, description="Seed для Монте-Карло по умолчанию")
    RUN_THREADS: int = Field(default=1, description="Бюджет потоков для вычислений")

    # Вывод
    OUTPUT_FORMAT: str = Field(default="json", description="Формат отчетов по умолчанию: csv или json")
    REPORT_TIMESTAMPS: bool = Field(default=True, description="Добавлять ли метку времени в отчеты")

    # Классификация сходимости несобственных интегралов
    CONVERGENCE_DECAY_FACTOR: float = Field(default=2.0, description="Минимальный коэффициент убывания приращений на удвоение радиуса")
    CONVERGENCE_TAIL_TOLERANCE: Optional[float] = Field(default=1e-2, description="Порог относительного хвоста")
    SEMINORM_DECAY_FACTOR: float = Field(default=2.0 ** 0.05, description="Коэффициент убывания для степенных хвостов полунорм")

    # Монте-Карло
    MC_SAMPLES: int = Field(default=20000, description="Число выборок по умолчанию")
    MC_BLOCK_SIZE: int = Field(default=4096, description="Размер блока выборок (один поток ГСЧ на блок)")

    # Эволюция
    WRAPAROUND_BUDGET: float = Field(default=1e-10, description="Допустимая масса данных вне |x| < L/2")

    # Проверки
    MEMBERSHIP_BAND: float = Field(default=0.1, description="Ширина пограничной полосы |p1(δ+s)−N|")
    CHECK_TOLERANCE: float = Field(default=1e-2, description="Относительный допуск неравенств")

    model_config = SettingsConfigDict(env_file=".env", case_sensitive=True, extra="ignore")


@lru_cache()
def get_settings() -> Settings:
    """Получить настройки (кэшируется)"""
    return Settings()


settings = get_settings()
