"""
Command-line interface for dqkit.
"""

from dqkit.cli.main import main

__all__ = ["main"]
