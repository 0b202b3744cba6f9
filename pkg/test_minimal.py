#!/usr/bin/env python3
"""
Test script to verify the toolkit runs with its declared dependencies
"""

import importlib
import sys


def test_minimal_imports():
    """Test that the toolkit imports with its required dependencies"""
    print("🧪 Testing minimal TRIS-RSMA toolkit install...")

    errors = []

    print("\n1. Testing core dependencies...")
    for module, package in (("numpy", "numpy"), ("scipy.sparse", "scipy"), ("dotenv", "python-dotenv"), ("psutil", "psutil")):
        try:
            __import__(module)
            print(f"✅ {package} installed")
        except ImportError as e:
            errors.append(f"❌ {package}: {e}")

    print("\n2. Testing toolkit import...")
    try:
        import trisrsma
        from main import build_parser

        build_parser()
        print(f"✅ trisrsma {trisrsma.__version__} imports successfully")
    except ImportError as e:
        errors.append(f"❌ toolkit import failed: {e}")

    print("\n" + "=" * 50)
    if errors:
        print(f"\n❌ ERRORS ({len(errors)}):")
        for error in errors:
            print(f"  {error}")
        print("\n🔧 FIX: pip install -r requirements.txt")
    else:
        print("\n✅ All required dependencies are installed!")

    assert not errors


def test_runtime_config_reads_build_date(monkeypatch):
    from trisrsma.core import config

    monkeypatch.setenv("BUILD_DATE", "2031-02-03")
    try:
        assert importlib.reload(config).RuntimeConfig.BUILD_DATE == "2031-02-03"
    finally:
        monkeypatch.delenv("BUILD_DATE")
        importlib.reload(config)
    assert config.RuntimeConfig.BUILD_DATE


if __name__ == "__main__":
    try:
        test_minimal_imports()
    except AssertionError:
        sys.exit(1)
