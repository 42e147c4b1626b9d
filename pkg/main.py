#!/usr/bin/env python3
"""
ncp4 - Main Application
Verification engine for the noncommutative Painleve IV system and its
Toda, Backlund, Lax, Hamiltonian and bilinear structures.
"""

import argparse
import os
import sys
import time
from dataclasses import replace
from typing import List, Optional

from src import coefficients as cf
from src.check_runner import run_suite
from src.config import Config
from src.errors import ScenarioError
from src.logger import setup_logger
from src.report import FORMATS, emit_report
from src.scenario import SUITE_IDS, Scenario, ScenarioManager

EXIT_USAGE = 2


class VerificationApp:
    """Main application class for ncp4."""

    def __init__(self, config_file: str = "ncp4.json", console_level: Optional[str] = None, file_logging: Optional[bool] = None):
        """Initialize the application."""
        self.config = Config(config_file)
        self.logger = setup_logger(
            log_dir=self.config.get_log_dir(),
            console_level=console_level or self.config.get_log_level(),
            file_logging=self.config.get_file_logging() if file_logging is None else file_logging,
        )
        self.scenarios = ScenarioManager(defaults=self.config.scenario_defaults())
        self.logger.info("ncp4 starting up", "APPLICATION")
        self.logger.system_info("Python version", sys.version.split()[0])
        self.logger.system_info("Worker threads", str(self.config.get_threads()))

    def run_scenario(
        self,
        scenario: Scenario,
        suite: Optional[str] = None,
        fmt: str = "json-lines",
        out: Optional[str] = None,
        timing: bool = False,
        progress: bool = True,
    ) -> int:
        """Execute the selected suites of a scenario and emit the report."""
        ctx = scenario.ring_context(self.config.ring_context())
        cf.set_context(ctx)
        self.logger.suite_step(
            "scenario", f"{scenario.name}: mode={ctx.mode} d={scenario.dim} N={scenario.order} seed={scenario.seed}"
        )
        if scenario.lotka_volterra:
            self.logger.info("alpha sum 0: Lotka-Volterra variant", "SCENARIO")

        start_time = time.time()
        self.logger.suite_step("checks", f"suites {scenario.selected_suites(suite)}")
        report = run_suite(
            scenario, suite, self.logger, self.config.get_threads(), ctx, timing=timing, progress=progress
        )

        code = emit_report(report, fmt, out)
        if out:
            self.logger.file_operation("report written", out, fmt)
        summary = report.summary()
        self.logger.performance(
            f"{summary['passed']}/{summary['total']} checks passed in {time.time() - start_time:.2f}s"
        )
        for record in report.failures:
            self.logger.warning(f"{record.check_id} failed: {record.error or record.first_nonzero}", "REPORT")
        return code

    def cleanup(self):
        """Flush pending log records."""
        self.logger.logger.complete()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ncp4", description="Verification engine for noncommutative Painleve IV.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_output_options(p: argparse.ArgumentParser) -> None:
        p.add_argument("--format", choices=FORMATS, default="json-lines", help="report format")
        p.add_argument("--out", help="write the report to this file instead of stdout")
        p.add_argument("--timing", action="store_true", help="record per-check seconds")
        p.add_argument("--with-intermediate", action="store_true", help="also check the pre-gauge 2x2 pair")
        p.add_argument("--config", default="ncp4.json", help="settings file")
        p.add_argument("--no-log-file", action="store_true", help="console logging only")
        p.add_argument("--no-progress", action="store_true", help="hide the progress bar")
        verbosity = p.add_mutually_exclusive_group()
        verbosity.add_argument("--quiet", action="store_true", help="warnings and errors only")
        verbosity.add_argument("--verbose", action="store_true", help="debug output")

    run = sub.add_parser("run", help="run a scenario file")
    run.add_argument("--scenario", required=True, help="path to a JSON scenario")
    run.add_argument("--suite", choices=SUITE_IDS + ("all",), help="suite to run (default: the scenario's suites)")
    add_output_options(run)

    demo = sub.add_parser("demo", help="run a built-in scenario")
    demo.add_argument("--suite", choices=SUITE_IDS + ("all",), default="all")
    demo.add_argument("--preset", help="start from a named preset")
    demo.add_argument("--dim", type=int)
    demo.add_argument("--order", type=int)
    demo.add_argument("--seed", type=int)
    demo.add_argument("--mode", choices=cf.MODES)
    add_output_options(demo)

    sub.add_parser("presets", help="list preset scenarios")
    return parser


def _console_level(args: argparse.Namespace) -> Optional[str]:
    if getattr(args, "quiet", False):
        return "WARNING"
    if getattr(args, "verbose", False):
        return "DEBUG"
    return None


def _demo_scenario(manager: ScenarioManager, args: argparse.Namespace) -> Scenario:
    overrides = {"dim": args.dim, "order": args.order, "seed": args.seed, "mode": args.mode}
    if args.preset:
        return manager.get_preset(args.preset, **overrides)
    values = dict(manager.defaults)
    values.update({"name": "demo", "dim": 2, "order": 12, "seed": 42})
    values.update({k: v for k, v in overrides.items() if v is not None})
    return Scenario(**values)


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point for the application."""
    args = build_parser().parse_args(argv)

    if args.command == "presets":
        manager = ScenarioManager()
        for name in manager.list_presets():
            print(name)
        return 0

    app = None
    try:
        app = VerificationApp(args.config, _console_level(args), False if args.no_log_file else None)
        try:
            if args.command == "run":
                scenario = app.scenarios.load(args.scenario)
                app.logger.file_operation("scenario loaded", os.path.abspath(args.scenario))
            else:
                scenario = _demo_scenario(app.scenarios, args)
            if args.with_intermediate:
                scenario = replace(scenario, with_intermediate=True)
        except ScenarioError as e:
            app.logger.error(str(e), "SCENARIO")
            print(f"ncp4: {e}", file=sys.stderr)
            return EXIT_USAGE
        return app.run_scenario(
            scenario, args.suite, args.format, args.out, timing=args.timing, progress=not args.no_progress
        )
    except KeyboardInterrupt:
        print("\nRun interrupted by user", file=sys.stderr)
        return 130
    except OSError as e:
        print(f"ncp4: {e}", file=sys.stderr)
        if app:
            app.logger.exception(e, "I/O")
        return EXIT_USAGE
    finally:
        if app:
            app.cleanup()


if __name__ == "__main__":
    sys.exit(main())
