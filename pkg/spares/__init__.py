# spares/__init__.py

# This file makes the 'spares' directory a Python package.

__version__ = "0.1.0"
