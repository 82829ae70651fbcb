"""Benchmark harness: registry, seed loop, trial executors, calibration and CLI."""
