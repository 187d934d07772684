"""Командная строка bicouple.

    python -m bicouple list-presets
    python -m bicouple run --preset cosine [--out DIR] [--plot] [--kahan] [--jobs N]
    python -m bicouple run --config run.json
    python -m bicouple run --coupling heat --param H=0.1 --m 50 --steps 3000 --d-minus 0.1 --d-plus 1
    python -m bicouple check --preset sqrt-boundary

Коды выхода: 0 все проверки пройдены, 1 нарушен допуск,
2 ошибка конфигурации, 3 разрушение решения или сингулярный поток.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import DEFAULT_JOBS, OUTPUT_DIR
from .errors import BlowUpError, ConfigError, FluxSingularity
from .runner.pipeline import run_pipeline
from .runner.preset_store import PresetStore
from .runner.run_config import load_run

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

# Флаг командной строки → ключ RunConfig
_FLAG_KEYS = {
    "scheme": "scheme",
    "m": "m",
    "dx": "dx",
    "dt": "dt",
    "cfl_fraction": "cfl_fraction",
    "steps": "n_steps",
    "d_minus": "d_minus",
    "d_plus": "d_plus",
    "boundary": "boundary",
    "initial": "initial",
    "audit_every": "audit_every",
    "snapshot_every": "snapshot_every",
    "allow_mixed_boundary": "allow_mixed_boundary",
    "allow_cfl_violation": "allow_cfl_violation",
    "exact_averages": "exact_averages",
}


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--preset", help="Имя пресета (см. list-presets)")
    parser.add_argument("--kahan", action="store_true", help="Компенсированное суммирование массы")
    parser.add_argument("--jobs", type=int, default=DEFAULT_JOBS, help="Параллельных процессов на связи")
    parser.add_argument("--quiet", action="store_true", help="Тихий режим")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bicouple", description="Двухдоменная диффузия с аудитом сохранения массы"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="Запустить пресет или конфигурацию и записать артефакты")
    _add_run_options(run_p)
    run_p.add_argument("--config", help="JSON-файл конфигурации")
    run_p.add_argument("--out", help="Каталог артефактов (по умолчанию $BICOUPLE_OUT/<имя>)")
    run_p.add_argument("--plot", action="store_true", help="Записать profile.svg")
    run_p.add_argument("--name", help="Имя запуска")
    run_p.add_argument("--scheme", choices=["nodal", "fv"], help="Раскладка сетки")
    grid = run_p.add_mutually_exclusive_group()
    grid.add_argument("--m", type=int, help="Узлов/ячеек на поддомен")
    grid.add_argument("--dx", type=float, help="Шаг сетки")
    step = run_p.add_mutually_exclusive_group()
    step.add_argument("--dt", type=float, help="Шаг по времени")
    step.add_argument("--cfl-fraction", type=float, help="Δt = доля·Δx²/max D")
    run_p.add_argument("--steps", type=int, help="Число шагов")
    run_p.add_argument("--d-minus", type=float, help="D− (левый поддомен)")
    run_p.add_argument("--d-plus", type=float, help="D+ (правый поддомен)")
    run_p.add_argument("--boundary", choices=["central", "one-sided"], help="Условие на x = 0 и x = 1")
    run_p.add_argument("--coupling", help="Тег связи; заменяет список связей пресета")
    run_p.add_argument("--stencil", choices=["central", "one-sided"], help="Дискретизация потоковой связи")
    run_p.add_argument(
        "--param", action="append", default=[], metavar="KEY=VALUE",
        help="Параметр связи (H, theta, psi, alpha, beta, gamma, delta, p_l, p_p, k_d, r)",
    )
    run_p.add_argument("--initial", help="Начальные данные: cosine, piecewise, sqrt")
    run_p.add_argument("--audit-every", type=int, help="Шагов между записями журнала массы")
    run_p.add_argument("--snapshot-every", type=int, help="Шагов между снимками профиля (snapshots_*.csv)")
    run_p.add_argument("--exact-averages", action="store_true", default=None,
                       help="Точные средние по ячейкам (только fv)")
    run_p.add_argument("--allow-mixed-boundary", action="store_true", default=None,
                       help="Разрешить неконсервативное граничное условие")
    run_p.add_argument("--allow-cfl-violation", action="store_true", default=None,
                       help="Разрешить ν > 1/2")

    sub.add_parser("list-presets", help="Список пресетов")

    check_p = sub.add_parser("check", help="Прогнать пресет и вывести только вердикты")
    _add_run_options(check_p)
    return parser


def _parse_params(items: list[str]) -> dict[str, float]:
    params = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"--param ожидает KEY=VALUE, получено '{item}'")
        try:
            params[key.strip()] = float(value)
        except ValueError as exc:
            raise ConfigError(f"--param {key}: '{value}' не число") from exc
    return params


def flags_from_args(args: argparse.Namespace) -> dict:
    """Плоские флаги run в ключи RunConfig; незаданные флаги не попадают в словарь."""
    flags: dict = {}
    if getattr(args, "preset", None):
        flags["preset"] = args.preset
    if getattr(args, "kahan", False):
        flags["summation"] = "compensated"
    for attr, key in _FLAG_KEYS.items():
        value = getattr(args, attr, None)
        if value is not None:
            flags[key] = value
    if getattr(args, "name", None):
        flags["name"] = args.name
    if getattr(args, "coupling", None):
        coupling = {"name": args.coupling, "tag": args.coupling, **_parse_params(args.param)}
        if args.stencil:
            coupling["stencil"] = args.stencil
        flags["couplings"] = [coupling]
    elif getattr(args, "param", None) or getattr(args, "stencil", None):
        raise ConfigError("--param и --stencil задаются вместе с --coupling")
    return flags


def _cmd_list(store: PresetStore) -> int:
    for p in store.list_presets():
        print(f"{p.name:<26} [{p.tier}] {p.scheme:<5} {p.n_steps:>8} шагов  {', '.join(p.couplings)}")
        if p.aliases:
            print(f"{'':<26} псевдонимы: {', '.join(p.aliases)}")
        if p.description:
            print(f"{'':<26} {p.description}")
    return EXIT_OK


def _cmd_run(args: argparse.Namespace, store: PresetStore, write: bool) -> int:
    config_path = getattr(args, "config", None)
    flags = flags_from_args(args)
    if config_path is None and "preset" not in flags and "couplings" not in flags:
        raise ConfigError("нужно указать --preset, --config или --coupling")
    config, checks, notes = load_run(config_path, flags, store)

    output_dir = None
    if write:
        output_dir = Path(args.out) if args.out else OUTPUT_DIR / config.name
    pipeline = run_pipeline(
        config,
        output_dir=output_dir,
        checks=checks,
        plot=getattr(args, "plot", False),
        jobs=args.jobs,
        verbose=not args.quiet,
        notes=notes,
    )

    # Без --quiet вердикты и предупреждения уже напечатаны в логе пайплайна
    report = pipeline.report
    if args.quiet:
        for line in report.lines():
            print(line)
        for note in notes:
            print(f"WARN: {note}", file=sys.stderr)
    if not report.passed:
        print(f"Не пройдено проверок: {len(report.failed)} из {len(report.results)}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    store = PresetStore()
    try:
        if args.command == "list-presets":
            return _cmd_list(store)
        if args.command == "check":
            if not args.preset:
                raise ConfigError("check требует --preset")
            return _cmd_run(args, store, write=False)
        return _cmd_run(args, store, write=True)
    except ConfigError as exc:
        print(f"Ошибка конфигурации: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (FluxSingularity, BlowUpError) as exc:
        print(f"Ошибка выполнения: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
