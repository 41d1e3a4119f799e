# spares/analysis/__init__.py

# This file makes the 'analysis' directory a Python package.
