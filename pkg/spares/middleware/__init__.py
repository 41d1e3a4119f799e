# spares/middleware/__init__.py

# This file makes the 'middleware' directory a Python package.
