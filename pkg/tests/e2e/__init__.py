"""End-to-end test suite."""
