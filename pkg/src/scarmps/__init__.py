"""Exact matrix-product scar states: model tensors, algebra checks, small-lattice ED."""

from __future__ import annotations

__version__ = "0.1.0"
