#!/usr/bin/env python3
"""
Setup script for the derived-limits toolkit
"""

import sys
import subprocess
from pathlib import Path


def check_python_version():
    """Check if Python version is compatible"""
    if sys.version_info < (3, 10):
        print("❌ Python 3.10 or higher is required")
        sys.exit(1)
    print(f"✅ Python {sys.version_info.major}.{sys.version_info.minor} detected")


def install_dependencies():
    """Install required Python packages"""
    print("📦 Installing dependencies...")
    try:
        subprocess.run([sys.executable, "-m", "pip", "install", "-r", "requirements.txt"],
                       check=True)
        print("✅ Dependencies installed successfully")
    except subprocess.CalledProcessError:
        print("❌ Failed to install dependencies")
        sys.exit(1)


def create_env_file():
    """Create .env file from template if it doesn't exist"""
    env_file = Path(".env")
    env_example = Path(".env.example")

    if env_file.exists():
        print("✅ .env file already exists")
        return True
    if not env_example.exists():
        print("❌ .env.example file not found")
        return False
    print("📝 Creating .env file from template...")
    env_file.write_text(env_example.read_text())
    print("✅ .env file created with the default horizons and window")
    return True


def check_expected_outcomes():
    """The example command compares against this file"""
    path = Path("app") / "data" / "expected_outcomes.json"
    if path.exists():
        print("✅ Stored example outcomes found")
        return True
    print(f"⚠️  {path} is missing; 'example' runs will need --no-check")
    return False


def print_next_steps():
    """Print setup completion message and next steps"""
    print("\n" + "=" * 60)
    print("🎉 Setup completed successfully!")
    print("=" * 60)
    print("\n📋 Next steps:")
    print("1. Run the tests:")
    print("   pytest")
    print()
    print("2. Try the command line:")
    print("   python3 scripts/derived_limits.py steenrod 1")
    print("   python3 scripts/derived_limits.py example kx-product")
    print()
    print("3. Start the HTTP service:")
    print("   python3 -m app.main")
    print()
    print("📚 See README.md for the description file formats")


def main():
    """Main setup function"""
    print("🚀 Setting up derived-limits...")
    print()

    check_python_version()
    install_dependencies()
    create_env_file()
    check_expected_outcomes()

    print_next_steps()


if __name__ == "__main__":
    main()
