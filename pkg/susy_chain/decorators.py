import functools
import inspect
from typing import Any, Callable

from susy_chain.logging_config import get_logger


def log_action(
    action_name: str | None = None, verbose: bool = False
) -> Callable[[Callable], Callable]:
    """Логирует вызов сценария одной строкой с результатом OK/ERROR."""

    def decorator(func: Callable) -> Callable:
        action = (
            action_name.upper()
            if action_name
            else func.__name__.upper().replace("_", "-")
        )

        @functools.wraps(func)
        def wrapper(*args, **kwargs) -> Any:
            logger = get_logger()
            params = _extract_params(func, args, kwargs)

            try:
                result = func(*args, **kwargs)
                if isinstance(result, dict):
                    _update_params_from_result(params, result)
                logger.info(_build_log_message(action, params, verbose, True))
                return result
            except Exception as e:
                logger.info(_build_log_message(action, params, verbose, False, e))
                raise

        return wrapper

    return decorator


def _extract_params(func: Callable, args: tuple, kwargs: dict) -> dict:
    bound = inspect.signature(func).bind(*args, **kwargs)
    bound.apply_defaults()
    arguments = bound.arguments

    params = {}
    config = arguments.get("config")
    if config is not None and hasattr(config, "seeds"):
        params["order"] = len(config.seeds)
        params["energies"] = [round(s.energy, 6) for s in config.seeds]
    if arguments.get("out") is not None:
        params["out"] = str(arguments["out"])
    return params


def _update_params_from_result(params: dict, result: dict) -> None:
    result_mapping = {
        "poles": "poles",
        "wells": "wells",
        "failed": "failed",
        "path": "out",
    }
    for result_key, param_key in result_mapping.items():
        if result_key in result:
            value = result[result_key]
            params[param_key] = len(value) if isinstance(value, list) else value


def _build_log_message(
    action: str,
    params: dict,
    verbose: bool,
    success: bool,
    error: Exception | None = None,
) -> str:
    log_parts = [action]

    if "order" in params:
        log_parts.append(f"order={params['order']}")
    if verbose and "energies" in params:
        log_parts.append(f"energies={params['energies']}")
    if "out" in params:
        log_parts.append(f"out='{params['out']}'")
    if "poles" in params:
        log_parts.append(f"poles={params['poles']}")
    if "wells" in params:
        log_parts.append(f"wells={params['wells']}")
    if "failed" in params:
        log_parts.append(f"failed={params['failed']}")

    log_parts.append("result=OK" if success else "result=ERROR")

    if error:
        log_parts.append(f"error_type={type(error).__name__}")
        log_parts.append(f"error_message='{error}'")

    return " ".join(log_parts)
