from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

from susy_chain.core.chain import BacklundChain
from susy_chain.core.utils import utc_timestamp
from susy_chain.infra.chain_config import ChainConfig
from susy_chain.infra.settings import SettingsLoader
from susy_chain.logging_config import get_logger
from susy_chain.verification.checks import BaseCheck, CheckResult, default_checks


class VerificationRunner:
    """Координатор численных проверок цепочки.

    Включённые в конфигурации проверки выполняются в пуле потоков,
    размер которого ограничен настройкой threads (SUSY_CHAIN_THREADS).
    """

    def __init__(
        self, checks: Sequence[BaseCheck] | None = None, threads: int | None = None
    ):
        self.checks = list(checks) if checks is not None else default_checks()
        self.threads = threads if threads else SettingsLoader().threads
        self.logger = get_logger()

    def _run_one(
        self, check: BaseCheck, chain: BacklundChain, config: ChainConfig
    ) -> CheckResult:
        self.logger.info(f"Running {check.name} check...")
        try:
            result = check.run(chain, config)
        except Exception as e:
            self.logger.error(f"{check.name} crashed: {type(e).__name__}: {e}")
            return check._failed(float("nan"), f"{type(e).__name__}: {e}")
        if result.status == "skipped":
            self.logger.warning(f"{check.name} skipped: {result.detail}")
        else:
            self.logger.info(
                f"{check.name} {result.status}: residual={result.max_residual:.3e} "
                f"threshold={result.threshold:.1e}"
            )
        return result

    def run(self, chain: BacklundChain, config: ChainConfig) -> dict:
        """Запускает проверки и собирает отчёт.

        Returns:
            dict: Отчёт (checks, passed, failed, skipped, timestamp).
        """
        enabled = [c for c in self.checks if config.verify.get(c.name, False)]
        self.logger.info(
            f"Starting verification: {len(enabled)} checks, n={chain.n}"
        )

        results: dict[str, CheckResult] = {}
        for check in self.checks:
            if check not in enabled:
                results[check.name] = check._skipped("disabled in config")

        if enabled:
            workers = max(1, min(self.threads, len(enabled)))
            with ThreadPoolExecutor(max_workers=workers) as pool:
                futures = {
                    c.name: pool.submit(self._run_one, c, chain, config)
                    for c in enabled
                }
                for name, future in futures.items():
                    results[name] = future.result()

        ordered = [results[c.name] for c in self.checks]
        failed = [r.name for r in ordered if r.status == "failed"]
        skipped = [r.name for r in ordered if r.status == "skipped"]

        self.logger.info(
            f"Verification completed: {len(ordered) - len(failed) - len(skipped)} "
            f"passed, {len(failed)} failed, {len(skipped)} skipped"
        )
        return {
            "checks": [r.to_dict() for r in ordered],
            "passed": not failed,
            "failed": failed,
            "skipped": skipped,
            "timestamp": utc_timestamp(),
        }
