# spares/exceptions/__init__.py

# This file makes the 'exceptions' directory a Python package.
