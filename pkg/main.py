"""
cs3kit - Main Entry Point

Exact verification, normal forms and rewriting for 3-qubit Clifford+CS
circuits. Run this file with a subcommand, e.g.

    python main.py verify --set c17
    python main.py equiv "S0" "S0 S0 S0 S0 S0"
"""

import sys
from pathlib import Path

# Add the project root to the Python path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))


def main():
    """Main entry point for cs3kit."""
    from cli.commands import run_command

    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
