# spares/routers/__init__.py

# This file makes the 'routers' directory a Python package.
