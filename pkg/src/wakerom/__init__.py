"""Reduced-order lift/drag modeling for circular-cylinder wakes."""

__version__ = "0.1.0"
