"""
Запуски по проверенным конфигурациям: общий слой для CLI и HTTP.
"""
import logging
from typing import Any, Dict, Optional

import numpy as np

from ..exceptions import ConfigError
from ..schemas.experiments import ExperimentReport
from ..schemas.run_config import GlobalConfig, HeatConfig, NormConfig, SchrodingerConfig
from ..utils.rationals import parse_exponent, parse_rational, parse_rational_list
from .evolution import HeatRunConfig, SchrodingerRunConfig, convergence_experiment, heat_energy_experiment
from .field_factory import build_field, grid_from_spec
from .fields import SampledField, default_grid, sample
from .norms import (
    QuadratureSpec,
    gagliardo_directional,
    gagliardo_seminorm,
    hs_seminorm_fourier,
    lp_norm,
    nonuniform_norm,
    weighted_fourier_norm,
)

logger = logging.getLogger(__name__)


def config_echo(command: str, g: GlobalConfig, cfg) -> Dict[str, Any]:
    """Эхо конфигурации для отчета; без пути вывода и меток времени"""
    return {
        "command": command,
        "global": {"seed": g.seed, "threads": g.threads, "format": g.format},
        command: cfg.model_dump(mode="json"),
    }


def _field_and_grid(cfg) -> tuple:
    f = build_field(cfg.field)
    if isinstance(f, SampledField):
        return f, f.grid
    return f, grid_from_spec(cfg.field) or default_grid(f.N)


def evaluate_norm(cfg: NormConfig, g: GlobalConfig) -> Dict[str, Any]:
    """JSON-результат одной нормы; форма зависит от cfg.kind"""
    f, grid = _field_and_grid(cfg)
    extra = {"mc_samples": cfg.mc_samples} if cfg.mc_samples else {}
    quad = QuadratureSpec(
        grid=grid,
        scheme=cfg.scheme,
        fractional_method=cfg.fractional_method,
        h_min=cfg.h_min,
        seed=g.seed,
        threads=g.threads,
        **extra,
    )

    def s_value():
        if cfg.s is None:
            raise ConfigError(f"norm {cfg.kind} requires s", field="norm.s")
        return parse_rational(cfg.s, "norm.s")

    if cfg.kind == "nonuniform":
        return nonuniform_norm(f, s_value(), parse_rational_list(cfg.p, "norm.p"), quad).to_json_dict()

    first = parse_exponent(cfg.p.split(",")[0], "norm.p")
    p = float("inf") if first is None else first
    if cfg.kind == "lp":
        return lp_norm(f, p, quad).to_json_dict()
    if cfg.kind == "gagliardo":
        return gagliardo_seminorm(f, s_value(), p, quad).to_json_dict()
    if cfg.kind == "directional":
        return gagliardo_directional(f, s_value(), p, quad).to_json_dict()
    if cfg.kind == "hs-fourier":
        value = hs_seminorm_fourier(f, s_value(), None if isinstance(f, SampledField) else grid)
        return {"value": value, "method": "fourier"}
    if cfg.beta is None:
        raise ConfigError("norm weighted-fourier requires beta", field="norm.beta")
    return weighted_fourier_norm(f, parse_rational(cfg.beta, "norm.beta"), p, quad).to_json_dict()


def run_heat(cfg: HeatConfig, g: GlobalConfig, echo: Optional[Dict[str, Any]] = None) -> ExperimentReport:
    f, grid = _field_and_grid(cfg)
    run = HeatRunConfig(
        grid=grid,
        initial=f,
        s=parse_rational(cfg.s, "heat.s"),
        pvec=parse_rational_list(cfg.p, "heat.p"),
        times=cfg.times,
        T_list=cfg.T_list,
        q_list=[parse_rational(q, "heat.q_list") for q in cfg.q_list],
        include_weighted=cfg.include_weighted,
        quad=QuadratureSpec(grid=grid, seed=g.seed, threads=g.threads),
        echo=echo if echo is not None else config_echo("heat", g, cfg),
    )
    return heat_energy_experiment(run)


def run_schrodinger(cfg: SchrodingerConfig, g: GlobalConfig, echo: Optional[Dict[str, Any]] = None) -> ExperimentReport:
    f, grid = _field_and_grid(cfg)
    if len(cfg.probes) % grid.N:
        raise ConfigError(f"probes must hold N={grid.N} coordinates per point", field="schrodinger.probes")
    run = SchrodingerRunConfig(
        grid=grid,
        initial=sample(f, grid),
        a=parse_rational(cfg.a, "schrodinger.a"),
        times=cfg.times,
        probes=np.array(cfg.probes, dtype=float),
        epsilon_list=cfg.epsilons,
        echo=echo if echo is not None else config_echo("schrodinger", g, cfg),
    )
    return convergence_experiment(run)


def sample_to_grid(cfg) -> SampledField:
    f, grid = _field_and_grid(cfg)
    return sample(f, grid)
