"""
Check execution manager with queue and parallel processing support.
"""

import queue
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Dict, List, Optional

from tqdm import tqdm

from src import coefficients as cf
from src.report import CheckRecord, Report
from src.residual_assessor import ResidualAssessor
from src.scenario import Scenario
from src.suites import Check, build_checks


class CheckRunner:
    """Runs checks from a queue on a thread pool and collects one record per check."""

    def __init__(
        self,
        logger,
        max_workers: int = 1,
        ctx: Optional[cf.RingContext] = None,
        timing: bool = False,
        progress: bool = True,
    ):
        """Initialize check runner."""
        self.logger = logger
        self.ctx = ctx or cf.get_context()
        self.assessor = ResidualAssessor(logger, self.ctx)
        self.max_workers = max(1, max_workers)
        self.timing = timing
        self.progress = progress
        self.check_queue: "queue.Queue[Check]" = queue.Queue()
        self.results: Dict[str, CheckRecord] = {}
        self.is_running = False

    def add_check(self, check: Check) -> None:
        """Add a check to the queue."""
        self.check_queue.put(check)

    def run(self, inputs_digest: str) -> Report:
        """Run every queued check and return the sorted report."""
        if self.is_running:
            raise RuntimeError("check runner is already running")
        self.is_running = True
        checks: List[Check] = []
        while not self.check_queue.empty():
            try:
                checks.append(self.check_queue.get_nowait())
            except queue.Empty:
                break

        self.results = {}
        with ThreadPoolExecutor(max_workers=self.max_workers) as executor:
            future_to_check = {executor.submit(self._run_single, check, inputs_digest): check for check in checks}
            with tqdm(total=len(checks), desc="checks", unit="check", disable=not self.progress, leave=False) as bar:
                for future in as_completed(future_to_check):
                    check = future_to_check[future]
                    try:
                        record = future.result()
                    except Exception as e:
                        self.logger.exception(e, f"Running check {check.check_id}")
                        record = CheckRecord(
                            check.check_id,
                            check.anchor,
                            inputs_digest,
                            passed=False,
                            error=f"{type(e).__name__}: {e}",
                        )
                    self.results[check.check_id] = record
                    self.logger.check_result(record.check_id, record.passed, record.error or "")
                    bar.update(1)

        self.is_running = False
        return Report(list(self.results.values()))

    def _run_single(self, check: Check, inputs_digest: str) -> CheckRecord:
        """Run one check; exceptions propagate to the collector."""
        start_time = time.time()
        outcome = check.run()
        fields = self.assessor.assess(outcome)
        duration = time.time() - start_time
        if outcome.details:
            self.logger.debug(f"{check.check_id}: {outcome.details}", "CHECK")
        return CheckRecord(
            check_id=check.check_id,
            paper_anchor=check.anchor,
            inputs_digest=inputs_digest,
            passed=fields["pass"],
            vanishing_order=fields["vanishing_order"],
            max_residual=fields["max_residual"],
            seconds=round(duration, 6) if self.timing else None,
            reliable_order=fields["reliable_order"],
            residual_by_order=fields["residual_by_order"],
            first_nonzero=fields["first_nonzero"],
        )


def run_suite(
    scenario: Scenario,
    suite: Optional[str],
    logger,
    max_workers: int = 1,
    ctx: Optional[cf.RingContext] = None,
    timing: bool = False,
    progress: bool = True,
) -> Report:
    """Build the checks of one suite (or the scenario's suites) and run them."""
    ctx = ctx or scenario.ring_context()
    runner = CheckRunner(logger, max_workers, ctx, timing=timing, progress=progress)
    for check in build_checks(scenario, ctx, suite):
        runner.add_check(check)
    return runner.run(scenario.digest())
