"""Tests package for hapassess."""
