"""
Test suite for the benchmark engine.

- unit/test_sdk: statistics, ranking, report, rendering and cache modules of bench_sdk
- unit/test_harness: registry, seeding, executors, runner and calibration
- integration, e2e, edge_cases: full pipelines, the bench CLI and boundary conditions
"""
