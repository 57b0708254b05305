"""
cli/__init__.py
"""
from cli.commands import main, build_parser, EXIT_OK, EXIT_CONFIG, EXIT_DIVERGED, EXIT_VERIFY
