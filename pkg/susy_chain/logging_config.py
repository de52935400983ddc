import logging
from logging.handlers import RotatingFileHandler
from pathlib import Path

from susy_chain.infra.settings import SettingsLoader

LOGGER_NAME = "susy_chain"

_logger: logging.Logger | None = None


def get_logger() -> logging.Logger:
    """Возвращает логгер сценариев и численных проверок.

    Файл, уровень и ротация берутся из секции [tool.susy_chain]:
    logs_dir, log_file, log_level, log_max_bytes, log_backups.

    Returns:
        logging.Logger: Логгер с ротацией файлов в каталоге logs_dir.
    """
    global _logger
    if _logger is not None:
        return _logger

    settings = SettingsLoader()
    log_dir = Path(settings.get("logs_dir"))
    log_dir.mkdir(parents=True, exist_ok=True)
    level = logging.getLevelName(str(settings.get("log_level", "INFO")).upper())
    if not isinstance(level, int):
        level = logging.INFO

    logger = logging.getLogger(LOGGER_NAME)
    logger.setLevel(level)
    logger.propagate = False
    for old in list(logger.handlers):
        logger.removeHandler(old)
        old.close()

    handler = RotatingFileHandler(
        filename=log_dir / str(settings.get("log_file", "actions.log")),
        maxBytes=int(settings.get("log_max_bytes", 10 * 1024 * 1024)),
        backupCount=int(settings.get("log_backups", 5)),
        encoding="utf-8",
    )
    handler.setFormatter(
        logging.Formatter(
            fmt="%(levelname)s %(asctime)s %(message)s",
            datefmt="%Y-%m-%dT%H:%M:%S",
        )
    )
    logger.addHandler(handler)

    _logger = logger
    return _logger
