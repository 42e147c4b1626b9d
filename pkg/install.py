#!/usr/bin/env python3
"""
Installation script for ncp4.
Checks the interpreter, installs dependencies and prepares directories.
"""

import subprocess
import sys
from pathlib import Path


def check_python_version():
    """Check if Python version is compatible."""
    if sys.version_info < (3, 8):
        print("❌ Python 3.8 or later is required")
        print(f"   Current version: {sys.version}")
        return False
    print(f"✅ Python version: {sys.version.split()[0]}")
    return True


def install_dependencies():
    """Install Python dependencies."""
    print("\n📦 Installing Python dependencies...")
    try:
        subprocess.check_call([sys.executable, "-m", "pip", "install", "-r", "requirements.txt"])
        print("✅ Dependencies installed successfully")
        return True
    except subprocess.CalledProcessError as e:
        print(f"❌ Failed to install dependencies: {e}")
        return False


def create_directories():
    """Create necessary directories."""
    print("\n📁 Creating directories...")
    try:
        Path("logs").mkdir(exist_ok=True)
        print("✅ Created logs directory")
        return True
    except Exception as e:
        print(f"❌ Failed to create directories: {e}")
        return False


def create_env_file():
    """Copy .env.example to .env when no .env exists."""
    env, example = Path(".env"), Path(".env.example")
    if env.exists() or not example.exists():
        return True
    try:
        env.write_text(example.read_text())
        print("✅ Created .env from .env.example")
        return True
    except OSError as e:
        print(f"❌ Failed to create .env: {e}")
        return False


def main():
    """Main installation function."""
    print("🚀 ncp4 - Installation")
    print("=" * 50)

    if not check_python_version():
        sys.exit(1)
    if not install_dependencies():
        sys.exit(1)
    if not create_directories():
        sys.exit(1)
    if not create_env_file():
        sys.exit(1)

    print("\n🎉 Installation completed successfully!")
    print("\nTo run the verification demo:")
    print("   ./ncp4 demo --suite all --dim 2 --order 12 --seed 42")
    print("\nTo run the test suite:")
    print("   python -m pytest")


if __name__ == "__main__":
    main()
