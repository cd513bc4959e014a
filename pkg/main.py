"""
Command-line entry point. Run: python main.py solve --n 8
"""
import sys

from polarmax import run

if __name__ == "__main__":
    sys.exit(run(sys.argv[1:]))
