# spares/repositories/__init__.py

# This file makes the 'repositories' directory a Python package.
