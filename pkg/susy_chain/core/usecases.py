from pathlib import Path

from susy_chain.core.analysis import well_census
from susy_chain.core.chain import eval_grid
from susy_chain.core.exceptions import AllSingularGrid
from susy_chain.core.seeds import SeedSpec, describe_family
from susy_chain.decorators import log_action
from susy_chain.infra.chain_config import ChainConfig
from susy_chain.infra.storage import ArtifactStorage, grid_document, sidecar_document
from susy_chain.verification.runner import VerificationRunner


def _sample(config: ChainConfig):
    chain = config.build_chain()
    sample = eval_grid(chain, config.x_min, config.x_max, config.samples)
    if sample.singular_count == len(sample.x):
        raise AllSingularGrid(len(sample.x))
    return chain, sample


@log_action(action_name="GENERATE")
def generate(
    config: ChainConfig,
    out: str | Path | None = None,
    fmt: str | None = None,
    storage: ArtifactStorage | None = None,
) -> dict:
    """Строит сетку V_n и при заданном out записывает артефакты.

    Для формата csv пишется CSV-сетка и JSON-файл рядом с ней (seeds,
    energies, poles, wells); для json - единый документ.

    Args:
        config (ChainConfig): Конфигурация запуска.
        out (str | Path | None): Путь к файлу сетки; None - ничего не писать.
        fmt (str | None): csv или json; по умолчанию из конфигурации.
        storage (ArtifactStorage | None): Хранилище артефактов.

    Raises:
        ConfigError: Если конфигурация невалидна.
        AllSingularGrid: Если особыми оказались все точки сетки.

    Returns:
        dict: sample, wells, poles, cancelled, document, path, sidecar.
    """
    fmt = (fmt or config.output_format).lower()
    _, sample = _sample(config)
    wells = well_census(sample)
    document = grid_document(sample, wells) if fmt == "json" else None

    path = sidecar = None
    if out is not None:
        storage = storage or ArtifactStorage()
        if fmt == "json":
            path = storage.save_json(document, out)
        else:
            path = storage.save_grid_csv(sample, out)
            sidecar = storage.save_json(
                sidecar_document(sample, wells), ArtifactStorage.sidecar_path(path)
            )

    return {
        "sample": sample,
        "wells": wells,
        "poles": [p.location for p in sample.poles],
        "cancelled": list(sample.cancelled),
        "document": document,
        "format": fmt,
        "path": str(path) if path else None,
        "sidecar": str(sidecar) if sidecar else None,
    }


@log_action(action_name="VERIFY", verbose=True)
def verify(
    config: ChainConfig,
    out: str | Path | None = None,
    storage: ArtifactStorage | None = None,
    runner: VerificationRunner | None = None,
) -> dict:
    """Запускает включённые проверки и возвращает отчёт.

    Returns:
        dict: Отчёт VerificationRunner (+ path, если отчёт записан).
    """
    chain = config.build_chain()
    report = (runner or VerificationRunner()).run(chain, config)
    report["seeds"] = chain.describe_seeds()
    if out is not None:
        storage = storage or ArtifactStorage()
        report["path"] = str(storage.save_json(report, out))
    return report


@log_action(action_name="CENSUS")
def census(config: ChainConfig) -> dict:
    """Ямы и полюса потенциала на сетке конфигурации.

    Returns:
        dict: order, energies, seeds, wells, poles, cancelled.
    """
    chain, sample = _sample(config)
    wells = well_census(sample)
    return {
        "order": chain.n,
        "energies": list(chain.energies),
        "seeds": [
            {**SeedSpec.to_dict(s), "description": describe_family(s.family)}
            for s in config.seeds
        ],
        "wells": [{"location": w.location, "depth": w.depth} for w in wells],
        "poles": [
            {"location": p.location, "kind": str(p.kind), "level": p.level}
            for p in sample.poles
        ],
        "cancelled": list(sample.cancelled),
    }
