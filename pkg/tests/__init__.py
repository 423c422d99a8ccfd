"""Tests for radiant-disk."""
