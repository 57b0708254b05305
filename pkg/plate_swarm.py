"""
Plate Swarm
===========
Entry point: python plate_swarm.py {simulate|verify|plot|sweep} ...
"""
import sys

from cli.commands import main

if __name__ == "__main__":
    sys.exit(main())
