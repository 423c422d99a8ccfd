"""Radiant Disk - steady-state heating of a thin radiating disk."""

__version__ = "0.1.0"
