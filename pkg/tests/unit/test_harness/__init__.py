"""Unit tests for the benchmark harness."""
