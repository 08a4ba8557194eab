#!/usr/bin/env python3
"""
Launcher for the oreforge command line.

    ./oreforge.py compute mul A1 "d" "x"
"""

import os
import sys


def check_python_version():
    """Check if Python version is compatible."""
    if sys.version_info < (3, 8):
        print(
            "oreforge requires Python 3.8 or higher; "
            f"you are running Python {sys.version_info.major}.{sys.version_info.minor}.",
            file=sys.stderr,
        )
        return False
    return True


def create_directories():
    """Create the directories the default config writes into."""
    for directory in ["config", "logs"]:
        os.makedirs(directory, exist_ok=True)


def main():
    if not check_python_version():
        return 2
    create_directories()
    sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), "src"))
    from cli import main as cli_main

    return cli_main()


if __name__ == "__main__":
    sys.exit(main())
