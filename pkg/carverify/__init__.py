"""Top-level initialization for carverify.

Configures logging and exposes carverify.__version__.

:license: ISC, see LICENSE for more details.
"""
import importlib.metadata
import logging

logging.getLogger("carverify").addHandler(logging.NullHandler())

# try-except allows mypy to run without carverify being installed
try:
    __version__ = importlib.metadata.version("carverify")
except importlib.metadata.PackageNotFoundError:
    pass
