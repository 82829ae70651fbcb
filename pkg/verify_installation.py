#!/usr/bin/env python3
"""
Installation check for the benchmark engine: dependencies, the SDK and the bundled demo.
"""
import sys
from pathlib import Path
from typing import List, Optional, Tuple

ROOT = Path(__file__).resolve().parent

PACKAGES = {
    "Core": [("Pydantic", "pydantic"), ("NumPy", "numpy"), ("SciPy", "scipy"), ("pandas", "pandas")],
    "Testing": [
        ("pytest", "pytest"),
        ("pytest-cov", "pytest_cov"),
        ("pytest-asyncio", "pytest_asyncio"),
        ("pytest-timeout", "pytest_timeout"),
    ],
    "Code Quality": [("black", "black"), ("flake8", "flake8"), ("mypy", "mypy")],
}


def verify_package(import_name: str) -> Tuple[bool, str]:
    try:
        module = __import__(import_name)
    except ImportError as e:
        return False, str(e)
    return True, getattr(module, "__version__", "unknown")


def check_demo() -> Optional[str]:
    """Build the demo report; returns an error message or None."""
    sys.path.insert(0, str(ROOT / "SHARED"))
    try:
        from bench_sdk import ReportConfig, build_report, load_tensor_json

        tensor = load_tensor_json(ROOT / "SHARED" / "data" / "demo" / "cross_category_tensor.json")
        report = build_report(tensor, ReportConfig())
    except Exception as e:  # noqa: BLE001
        return f"{type(e).__name__}: {e}"
    if report.cd is None or round(report.cd.cd, 2) != 1.48:
        return "demo CD analysis does not match the bundled tensor"
    return None


def main() -> None:
    print("=" * 80)
    print("BENCHMARK ENGINE - INSTALLATION VERIFICATION")
    print("=" * 80)

    missing: List[str] = []
    for category, packages in PACKAGES.items():
        print(f"\n📦 {category}:")
        print("-" * 80)
        for display_name, import_name in packages:
            ok, info = verify_package(import_name)
            if not ok:
                missing.append(display_name)
            print(f"  {'✅' if ok else '❌'} {display_name:20} {'v' + info if ok else 'MISSING - ' + info}")

    print()
    if missing:
        print(f"❌ Missing packages: {', '.join(missing)}")
        print("  pip install -r requirements.txt")
        sys.exit(1)

    error = check_demo()
    if error:
        print(f"❌ bench_sdk demo check failed: {error}")
        sys.exit(1)
    print("✅ bench_sdk builds the demo report (CD_0.05 = 1.48)")

    py_version = sys.version_info
    marker = "✅" if py_version >= (3, 10) else "⚠️ "
    print(f"{marker} Python {py_version.major}.{py_version.minor}.{py_version.micro}")
    print()
    print("Next steps:")
    print("  1. Run tests: pytest -m 'not slow'")
    print("  2. Run the demo: bench run --config SHARED/config/runs/cross_category_demo.json --out report.json")


if __name__ == "__main__":
    main()
