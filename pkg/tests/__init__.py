"""Tests for elliptic-confinement project."""
