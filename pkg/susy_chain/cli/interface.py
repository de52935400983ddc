import json
import sys
from argparse import ArgumentParser
from functools import wraps
from pathlib import Path

from prettytable import PrettyTable

from susy_chain.core.exceptions import AllSingularGrid, ConfigError
from susy_chain.core.usecases import census, generate, verify
from susy_chain.core.utils import atomic_write_text
from susy_chain.infra.chain_config import OUTPUT_FORMATS, ChainConfig
from susy_chain.infra.storage import grid_to_csv

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2
EXIT_ALL_SINGULAR = 3


def _err(message: str) -> None:
    print(message, file=sys.stderr)


def format_checks_table(report: dict) -> str:
    """Таблица результатов проверок для stderr."""
    table = PrettyTable()
    table.field_names = ["check", "status", "max residual", "threshold", "detail"]
    table.align["detail"] = "l"
    for row in report["checks"]:
        residual = row["max_residual"]
        threshold = row["threshold"]
        table.add_row(
            [
                row["name"],
                row["status"],
                "-" if residual is None else f"{residual:.3e}",
                "-" if threshold is None else f"{threshold:.1e}",
                row["detail"][:60],
            ]
        )
    return table.get_string()


def format_census_table(data: dict) -> str:
    """Таблица ям и полюсов для stderr."""
    table = PrettyTable()
    table.field_names = ["kind", "location", "value"]
    for well in data["wells"]:
        table.add_row(["well", f"{well['location']:.6f}", f"{well['depth']:.6f}"])
    for pole in data["poles"]:
        table.add_row(["pole", f"{pole['location']:.12f}", pole["kind"]])
    for location in data["cancelled"]:
        table.add_row(["removable", f"{location:.12f}", "cancelled"])
    return table.get_string()


def census_to_csv(data: dict) -> str:
    lines = ["kind,location,depth"]
    lines += [f"well,{w['location']!r},{w['depth']!r}" for w in data["wells"]]
    lines += [f"pole,{p['location']!r},nan" for p in data["poles"]]
    return "\n".join(lines) + "\n"


def handle_errors(func):
    """Переводит исключения сценариев в коды завершения CLI."""

    @wraps(func)
    def wrapper(*args, **kwargs) -> int:
        try:
            return func(*args, **kwargs)
        except (ConfigError, ValueError) as e:
            _err(f"Ошибка: {e}")
            return EXIT_CONFIG
        except AllSingularGrid as e:
            _err(f"Ошибка: {e}")
            return EXIT_ALL_SINGULAR
        except OSError as e:
            _err(f"Ошибка ввода-вывода: {e}")
            return EXIT_CONFIG

    return wrapper


def _load_config(ns) -> ChainConfig:
    return ChainConfig.load(ns.config) if ns.config else ChainConfig.default()


def _output_path(ns, config: ChainConfig, fmt: str, stem: str) -> Path | str | None:
    if ns.out:
        return Path(ns.out).resolve()
    if ns.stdout:
        return None
    return config.output_path or f"{stem}.{fmt}"


@handle_errors
def handle_generate(ns) -> int:
    config = _load_config(ns)
    fmt = (ns.format or config.output_format).lower()
    result = generate(config, out=_output_path(ns, config, fmt, "grid"), fmt=fmt)

    if ns.stdout:
        if fmt == "json":
            print(json.dumps(result["document"], indent=4, ensure_ascii=False))
        else:
            sys.stdout.write(grid_to_csv(result["sample"]))

    sample = result["sample"]
    _err(
        f"Сетка: {len(sample.x)} точек, особых: {sample.singular_count}, "
        f"полюсов: {len(result['poles'])}, устранимых: {len(result['cancelled'])}, "
        f"ям: {len(result['wells'])}"
    )
    if result["path"]:
        _err(f"Записано: {result['path']}")
    if result["sidecar"]:
        _err(f"Записано: {result['sidecar']}")
    return EXIT_OK


@handle_errors
def handle_verify(ns) -> int:
    config = _load_config(ns)
    out = Path(ns.out).resolve() if ns.out else None
    report = verify(config, out=out)

    if ns.stdout:
        print(json.dumps(report, indent=4, ensure_ascii=False))
    _err(format_checks_table(report))
    if report["passed"]:
        _err("Все проверки пройдены.")
        return EXIT_OK
    _err(f"Не пройдены: {', '.join(report['failed'])}")
    return EXIT_FAILED


@handle_errors
def handle_census(ns) -> int:
    config = _load_config(ns)
    data = census(config)
    for seed in data["seeds"]:
        _err(f"{seed['family']}: {seed['description']}")
    fmt = (ns.format or "json").lower()
    text = (
        census_to_csv(data)
        if fmt == "csv"
        else json.dumps(data, indent=4, ensure_ascii=False) + "\n"
    )

    if ns.stdout:
        sys.stdout.write(text)
    if ns.out:
        _err(f"Записано: {atomic_write_text(Path(ns.out).resolve(), text)}")
    _err(format_census_table(data))
    return EXIT_OK


class ChainArgumentParser(ArgumentParser):
    def error(self, message: str):
        raise ConfigError(message)


def build_parser() -> ArgumentParser:
    """Создает парсер аргументов командной строки для всех команд CLI.

    Returns:
        ArgumentParser: Настроенный парсер с подкомандами.
    """
    parser = ChainArgumentParser(
        prog="susy-chain",
        description="SUSY-партнёры свободной частицы по схеме Бэклунда",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("generate", "построить сетку V_n (CSV + JSON или единый JSON)"),
        ("verify", "запустить численные проверки"),
        ("census", "ямы и полюса потенциала"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=str, required=False)
        p.add_argument("--out", type=str, required=False)
        p.add_argument("--format", type=str, choices=OUTPUT_FORMATS, required=False)
        p.add_argument("--stdout", action="store_true")
        p.set_defaults(command=name)

    return parser


def main(argv: list[str] | None = None) -> int:
    """Главная функция - точка входа в приложение.

    Returns:
        int: Код завершения (0 успех, 1 проверка не пройдена, 2 ошибка
            конфигурации, 3 все точки сетки особые).
    """
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except ConfigError as e:
        _err(f"Ошибка: {e}")
        return EXIT_CONFIG

    match ns.command:
        case "generate":
            return handle_generate(ns)
        case "verify":
            return handle_verify(ns)
        case "census":
            return handle_census(ns)
        case _:
            return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
