"""Tests for scsvm package."""
