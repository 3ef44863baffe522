"""Общие фикстуры тестов"""
import logging
import math

import pytest

from nonuniform_sobolev.services.fields import Gaussian, GridSpec, default_grid


@pytest.fixture
def grid1() -> GridSpec:
    return default_grid(1)


@pytest.fixture
def small_grid1() -> GridSpec:
    return GridSpec(1, 16.0, 256)


@pytest.fixture
def gaussian1() -> Gaussian:
    return Gaussian.create(N=1)


@pytest.fixture
def gaussian_l2() -> float:
    """‖e^{−x²}‖_{L²(ℝ)} = (π/2)^{1/4}"""
    return (math.pi / 2.0) ** 0.25


@pytest.fixture
def write_ini(tmp_path):
    """Записывает INI-файл запуска и возвращает путь"""
    def _write(text: str, name: str = "run.ini"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path
    return _write


@pytest.fixture(autouse=True)
def restore_root_logger():
    """main() и lifespan перенастраивают корневой логгер: убираем их обработчики"""
    root = logging.getLogger()
    level, handlers = root.level, list(root.handlers)
    yield
    for handler in list(root.handlers):
        if handler not in handlers and type(handler) is logging.StreamHandler:
            root.removeHandler(handler)
    root.setLevel(level)
