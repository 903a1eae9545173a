"""Tests for lenslab."""
