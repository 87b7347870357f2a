"""Main entry point for RTF Verify"""

import sys

from cli import run


def main():
    """Run the command line and exit with its status"""
    return run(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
