"""Tests for partition-rank."""
