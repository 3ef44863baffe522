"""
Командная строка: python -m nonuniform_sobolev.cli <команда> ...

Команды: indices, norm, heat, schrodinger, verify, sample.
Коды выхода: 0 - успех, 1 - провал проверки verify, 2 - ошибка конфигурации
или нарушенное предусловие.
"""
import argparse
import json
import logging
import sys
from typing import Any, Dict, List, Optional, Tuple

from .config import settings
from .exceptions import SobolevError
from .schemas.experiments import ExperimentReport
from .schemas.indices import INDEX_OPERATIONS, IndexRequest
from .schemas.run_config import GlobalConfig, HeatConfig, NormConfig, SampleConfig, SchrodingerConfig, VerifyConfig
from .schemas.verify import SuiteConfig
from .services.index_commands import run_index_operation
from .services.runs import config_echo, evaluate_norm, run_heat, run_schrodinger, sample_to_grid
from .services.verify import list_checks, run_suite
from .utils.config_file import load_ini, merge_sections, resolve_global, validate_section
from .utils.serialization import export_csv, make_json_safe, render_csv, render_json, write_field, write_text
from .utils.structured_logging import configure_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2

HEAT_COLUMN_DOCS = (
    "t: time",
    "lp[D^a]: L^{p_|a|} norm of the derivative D^a u(t)",
    "gag[D^a]: Gagliardo seminorm [D^a u(t)] of order s - floor(s) with exponent p_ceil(s)",
    "norm_Ws: nonuniform W_s^p norm of u(t)",
    "l2: L^2 norm of u(t)",
    "norm_Ws1, norm_Ws2: weighted-estimate norms W_{s+1}^{r}, W_{s+2}^{r}",
    "monotone[D^a]: lp[D^a](t) <= lp[D^a](0)*(1+1e-3)",
    "l2_nonincreasing: l2(t) <= l2(previous t)",
)

SCHRODINGER_COLUMN_DOCS = (
    "t: time",
    "err_f, err_f1, err_f2: max over probes of |u(t,x) - f(x)| for f and its low/high frequency parts",
    "reg_eps=e: max over probes of |regularized(t) - free(t)| at cutoff e",
)


# ============================================================================
# Парсер
# ============================================================================

def _common(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("run options")
    group.add_argument("--config", help="INI file with [global] and per-command sections")
    group.add_argument("--seed", type=int, help="Monte Carlo seed (overrides RUN_SEED)")
    group.add_argument("--threads", type=int, help="Thread budget (overrides RUN_THREADS)")
    group.add_argument("--format", choices=["csv", "json"], help="Output format")
    group.add_argument("--output", help="Output file; stdout when omitted")
    group.add_argument("--no-timestamp", action="store_true", help="Omit generated_at for byte-identical output")


def _field_options(parser: argparse.ArgumentParser, family_flag: str = "--family") -> None:
    group = parser.add_argument_group("field")
    group.add_argument(family_flag, dest=family_flag.lstrip("-"),
                       choices=["gaussian", "rational-decay", "bubble", "bump", "fourier-bump", "sech", "file"])
    group.add_argument("-N", "--N", dest="N", type=int)
    group.add_argument("--amplitude", type=float)
    group.add_argument("--center", help="comma separated coordinates")
    group.add_argument("--sigma", type=float)
    group.add_argument("--delta", "-delta", type=float)
    group.add_argument("--lam", type=float)
    group.add_argument("--bubble-p", dest="bubble_p", type=float)
    group.add_argument("--radius", type=float)
    group.add_argument("--scale", type=float)
    group.add_argument("--shape", choices=["quintic", "smooth"])
    group.add_argument("--input", help="binary field container (family=file)")
    group.add_argument("--L", dest="L", type=float, help="grid half-width")
    group.add_argument("--n", dest="n", type=int, help="grid points per axis")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nonuniform_sobolev", description="Nonuniform Sobolev space toolkit")
    parser.add_argument("--log-level", default=settings.LOG_LEVEL)
    parser.add_argument("--log-format", choices=["plain", "json"], default=settings.LOG_FORMAT)
    sub = parser.add_subparsers(dest="command", required=True)

    indices = sub.add_parser("indices", help="exact exponent calculus")
    indices.add_argument("operation", choices=INDEX_OPERATIONS)
    indices.add_argument("-N", "--N", dest="N", type=int)
    indices.add_argument("-k", "--k", dest="k", type=int)
    indices.add_argument("-s", "--s", dest="s")
    indices.add_argument("--s-tilde", "-s-tilde", dest="s_tilde")
    indices.add_argument("-p", "--p", dest="p", help="exponent list, e.g. 4,2,2 or 4,3/2")
    indices.add_argument("-a", "--a", dest="a")
    indices.add_argument("-delta", "--delta", dest="delta")
    indices.add_argument("--max-steps", dest="max_steps", type=int, default=200)
    indices.add_argument("--json", action="store_true", help="emit the full verdict with its trace")
    indices.add_argument("--output")

    norm = sub.add_parser("norm", help="numerical norms and seminorms")
    norm.add_argument("kind", choices=["lp", "gagliardo", "directional", "nonuniform", "hs-fourier", "weighted-fourier"])
    _field_options(norm)
    norm.add_argument("-s", "--s", dest="s")
    norm.add_argument("-p", "--p", dest="p")
    norm.add_argument("--beta")
    norm.add_argument("--scheme", choices=["Tensor", "MonteCarlo"])
    norm.add_argument("--fractional-method", dest="fractional_method", choices=["auto", "fourier", "real"])
    norm.add_argument("--mc-samples", dest="mc_samples", type=int)
    norm.add_argument("--h-min", dest="h_min", type=float)
    _common(norm)

    heat = sub.add_parser("heat", help="heat equation energy estimates")
    _field_options(heat, "--initial")
    heat.add_argument("-s", "--s", dest="s")
    heat.add_argument("-p", "--p", dest="p")
    heat.add_argument("--times", help="geom:start:end:count or comma list")
    heat.add_argument("--T", dest="T_list", help="comma list of horizons for time integrals")
    heat.add_argument("--q", dest="q_list", help="comma list of exponents q < 2/(2+varrho)")
    heat.add_argument("--no-weighted", dest="include_weighted", action="store_false", default=None)
    _common(heat)

    schrodinger = sub.add_parser("schrodinger", help="pointwise convergence of the dispersive propagator")
    _field_options(schrodinger, "--initial")
    schrodinger.add_argument("-a", "--a", dest="a")
    schrodinger.add_argument("--times", help="decreasing times, geom:start:end:count or comma list")
    schrodinger.add_argument("--probes", help="comma separated probe coordinates, N per point")
    schrodinger.add_argument("--epsilons", help="comma list of regularization cutoffs (a = 2)")
    _common(schrodinger)

    verify = sub.add_parser("verify", help="property and acceptance checks")
    verify.add_argument("--suite", choices=["acceptance", "all"])
    verify.add_argument("--checks", help="comma separated check names")
    verify.add_argument("--list", dest="list_only", action="store_true", help="print registered check names")
    _common(verify)

    sampler = sub.add_parser("sample", help="sample a field on a grid and write the binary container")
    _field_options(sampler)
    sampler.add_argument("--output", required=True)
    sampler.add_argument("--csv", help="also export N=1 values as CSV")
    return parser


# ============================================================================
# Общие шаги
# ============================================================================

FIELD_DESTS = ("family", "initial", "N", "amplitude", "center", "sigma", "delta", "lam",
               "bubble_p", "radius", "scale", "shape", "input", "L", "n")


def _overrides(args: argparse.Namespace, names) -> Dict[str, Any]:
    return {name: getattr(args, name, None) for name in names}


def _load(args: argparse.Namespace, section: str) -> Tuple[GlobalConfig, Dict[str, Any]]:
    """[global] с приоритетами и секция команды из --config"""
    sections = load_ini(args.config) if args.config else {}
    g = resolve_global(sections.get("global"), {
        "seed": args.seed,
        "threads": args.threads,
        "format": args.format,
        "output": args.output,
        "timestamps": False if args.no_timestamp else None,
    })
    return g, sections.get(section, {})


def _emit_report(report: ExperimentReport, g: GlobalConfig, docs) -> None:
    if g.format == "json":
        payload = report.model_dump(mode="json", exclude={"generated_at"})
        write_text(render_json(payload, g.timestamps), g.output)
        return
    comments = [f"{report.name} report"] + [f"column {d}" for d in docs]
    comments.append("config_echo: " + json.dumps(report.config_echo, sort_keys=True, ensure_ascii=False))
    comments.append("summary: " + json.dumps(make_json_safe(report.summary), sort_keys=True, ensure_ascii=False))
    write_text(render_csv(report.columns, report.rows, comments, g.timestamps), g.output)


# ============================================================================
# Команды
# ============================================================================

def cmd_indices(args: argparse.Namespace) -> int:
    req = IndexRequest(N=args.N, k=args.k, s=args.s, s_tilde=args.s_tilde, p=args.p, a=args.a,
                       delta=args.delta, max_steps=args.max_steps)
    result = run_index_operation(args.operation, req)
    text = render_json(result.model_dump(mode="json")) if args.json else result.text + "\n"
    write_text(text, args.output)
    return EXIT_OK


def cmd_norm(args: argparse.Namespace) -> int:
    g, section = _load(args, "norm")
    options = ("s", "p", "beta", "scheme", "fractional_method", "mc_samples", "h_min")
    data = merge_sections(section, {"kind": args.kind, **_overrides(args, FIELD_DESTS), **_overrides(args, options)})
    cfg = validate_section(NormConfig, "norm", data, with_field=True)
    result = evaluate_norm(cfg, g)
    echo = config_echo("norm", g, cfg)
    if g.format == "json":
        write_text(render_json({"config_echo": echo, "kind": cfg.kind, "result": result}, g.timestamps), g.output)
        return EXIT_OK
    head = {k: v for k, v in result.items() if k != "levels"}
    comments = [
        f"norm {cfg.kind}",
        "column R: outer radius of the level",
        "column value: partial value up to R",
        "result: " + json.dumps(make_json_safe(head), sort_keys=True, ensure_ascii=False),
        "config_echo: " + json.dumps(echo, sort_keys=True, ensure_ascii=False),
    ]
    write_text(render_csv(["R", "value"], result.get("levels", []), comments, g.timestamps), g.output)
    return EXIT_OK


def cmd_heat(args: argparse.Namespace) -> int:
    g, section = _load(args, "heat")
    options = ("s", "p", "times", "T_list", "q_list", "include_weighted")
    data = merge_sections(section, {**_overrides(args, FIELD_DESTS), **_overrides(args, options)})
    cfg = validate_section(HeatConfig, "heat", data, with_field=True)
    _emit_report(run_heat(cfg, g), g, HEAT_COLUMN_DOCS)
    return EXIT_OK


def cmd_schrodinger(args: argparse.Namespace) -> int:
    g, section = _load(args, "schrodinger")
    options = ("a", "times", "probes", "epsilons")
    data = merge_sections(section, {**_overrides(args, FIELD_DESTS), **_overrides(args, options)})
    cfg = validate_section(SchrodingerConfig, "schrodinger", data, with_field=True)
    _emit_report(run_schrodinger(cfg, g), g, SCHRODINGER_COLUMN_DOCS)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    g, section = _load(args, "verify")
    if args.list_only:
        write_text("\n".join(list_checks()) + "\n", g.output)
        return EXIT_OK
    cfg = validate_section(VerifyConfig, "verify", merge_sections(section, _overrides(args, ("suite", "checks"))))
    report = run_suite(SuiteConfig(suite=cfg.suite, checks=cfg.checks, seed=g.seed, threads=g.threads))
    if g.format == "json":
        write_text(render_json(report.to_json_dict(), g.timestamps), g.output)
    else:
        columns = ["name", "status", "tolerance", "measured", "notes"]
        rows = [
            {
                "name": o.name,
                "status": o.status.value,
                "tolerance": o.tolerance,
                "measured": json.dumps(o.measured, sort_keys=True),
                "notes": o.notes,
            }
            for o in report.outcomes
        ]
        summary = json.dumps(report.summary.model_dump(by_alias=True), sort_keys=True)
        write_text(render_csv(columns, rows, ["verify report", f"summary: {summary}"], g.timestamps), g.output)
    return report.exit_code


def cmd_sample(args: argparse.Namespace) -> int:
    cfg = validate_section(SampleConfig, "sample", _overrides(args, FIELD_DESTS), with_field=True)
    field = sample_to_grid(cfg)
    write_field(field, args.output)
    if args.csv:
        export_csv(field, args.csv)
    logger.info(f"✓ Sampled {cfg.field.family} field written: {args.output}")
    return EXIT_OK


COMMANDS = {
    "indices": cmd_indices,
    "norm": cmd_norm,
    "heat": cmd_heat,
    "schrodinger": cmd_schrodinger,
    "verify": cmd_verify,
    "sample": cmd_sample,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level, args.log_format)
    try:
        return COMMANDS[args.command](args)
    except SobolevError as e:
        inequality = getattr(e, "inequality", "")
        field = getattr(e, "field", "")
        suffix = f" [violated: {inequality}]" if inequality else (f" [field: {field}]" if field else "")
        print(f"error: {e.message}{suffix}", file=sys.stderr)
        logger.debug(f"{type(e).__name__}: {e.details}")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
