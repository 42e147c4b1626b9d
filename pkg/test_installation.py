#!/usr/bin/env python3
"""
Test script for ncp4.
Verifies that all components are working correctly.
"""

import io
import sys
from pathlib import Path


def test_imports():
    """Test if all required modules can be imported."""
    print("🔍 Testing imports...")

    for module, label in (
        ("loguru", "loguru"),
        ("tqdm", "tqdm"),
        ("dotenv", "python-dotenv"),
        ("numpy", "numpy"),
        ("sympy", "sympy"),
    ):
        try:
            __import__(module)
            print(f"✅ {label}")
        except ImportError:
            print(f"❌ {label}")
            return False
    return True


def test_application_modules():
    """Test if application modules can be imported."""
    print("\n🔍 Testing application modules...")

    for module in ("ring", "qdet", "toda", "painleve", "lax", "ham", "bilinear", "scenario", "suites", "report"):
        try:
            __import__(f"src.{module}")
            print(f"✅ {module} module")
        except ImportError as e:
            print(f"❌ {module} module: {e}")
            return False
    return True


def test_directories():
    """Test if required directories exist."""
    print("\n🔍 Testing directories...")

    ok = True
    for name in ("logs", "src", "tests"):
        if Path(name).exists():
            print(f"✅ {name} directory")
        else:
            print(f"❌ {name} directory")
            ok = False
    return ok


def test_config():
    """Test configuration functionality."""
    print("\n🔍 Testing configuration...")

    try:
        from src.config import Config

        config = Config("ncp4-installation-test.json")
        print("✅ Configuration loaded")

        config.set("test_key", "test_value")
        reread = Config("ncp4-installation-test.json")
        Path("ncp4-installation-test.json").unlink()
        if reread.get("test_key") == "test_value":
            print("✅ Configuration read/write")
        else:
            print("❌ Configuration read/write")
            return False
        print(f"✅ Worker threads: {config.get_threads()}")
        return True
    except Exception as e:
        print(f"❌ Configuration test failed: {e}")
        return False


def test_smoke_suite():
    """Run the smoke preset's ring suite end to end."""
    print("\n🔍 Testing a small suite...")

    try:
        from src import coefficients as cf
        from src.check_runner import CheckRunner
        from src.logger import setup_logger
        from src.report import emit_report
        from src.scenario import ScenarioManager
        from src.suites import build_checks

        scenario = ScenarioManager().get_preset("smoke")
        ctx = scenario.ring_context()
        cf.set_context(ctx)
        runner = CheckRunner(setup_logger(console_level="WARNING", file_logging=False), ctx=ctx, progress=False)
        for check in build_checks(scenario, ctx, "ring"):
            runner.add_check(check)
        code = emit_report(runner.run(scenario.digest()), "human", stream=io.StringIO())
        if code == 0:
            print("✅ ring suite passed")
            return True
        print("❌ ring suite reported failures")
        return False
    except Exception as e:
        print(f"❌ Smoke suite failed: {e}")
        return False


def main():
    """Main test function."""
    print("🧪 ncp4 - Installation Test")
    print("=" * 55)

    all_tests_passed = True
    for test in (test_imports, test_application_modules, test_directories, test_config, test_smoke_suite):
        if not test():
            all_tests_passed = False

    print("\n" + "=" * 55)
    if all_tests_passed:
        print("🎉 All tests passed! The engine is ready to use.")
        print("\nTo run a demo:")
        print("   ./ncp4 demo --suite all")
    else:
        print("❌ Some tests failed. Please check the installation.")
        print("\nCommon solutions:")
        print("   1. Run 'python install.py' to install dependencies")
        print("   2. Make sure you're in the correct directory")

    return all_tests_passed


if __name__ == "__main__":
    success = main()
    sys.exit(0 if success else 1)
