"""Allow `python -m nilsurf ...` as an alias for the console script."""

from .cli import entry

entry()
