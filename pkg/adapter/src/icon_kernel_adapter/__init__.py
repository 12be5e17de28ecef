"""Pandas/matplotlib execution backend for the icon kernel wire protocol."""

from .kernel import AdapterError, AdapterKernel
from .wire import WireAdapter, serve

__all__ = ["AdapterError", "AdapterKernel", "WireAdapter", "serve"]

__version__ = "0.1.0"
