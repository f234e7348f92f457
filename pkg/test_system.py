#!/usr/bin/env python3
"""
End-to-end check of the command line: generation, products, components,
lamplighter tasks and a small verification suite.
"""

import json
import sys
import tempfile
from pathlib import Path

from main import main
from utils import setup_logging


def run_system_check(output_dir: Path) -> bool:
    """Run a fixed sequence of CLI invocations and compare exit codes and outputs."""
    setup_logging("WARNING")
    out = ["--output-dir", str(output_dir)]

    print("🔧 Testing graph toolkit")
    print("=" * 50)

    steps = [
        ("Generate S_{2,3,3} as DOT", ["gen", "--family", "spiderweb", "--k", "2", "--n", "3", "--m", "3",
                                        "--format", "dot", "--store", "web"] + out, 0),
        ("Generate B_{2,2}", ["gen", "--family", "debruijn", "--k", "2", "--n", "2", "--store", "bruijn"] + out, 0),
        ("Tensor of stored graphs", ["product", "bruijn", "web"] + out, 0),
        ("Components of C_4 ⊗ C_10", ["components", "--family", "cycle", "--n", "4", "--m", "10"] + out, 0),
        ("Derangement of B_{2,2}", ["derange", "--family", "debruijn", "--k", "2", "--n", "2"] + out, 0),
        ("Kesten measure", ["lamplighter", "kesten", "--k", "2", "--qmax", "10"] + out, 0),
        ("Cayley ball", ["lamplighter", "cayley-ball", "--k", "2", "--r", "1"] + out, 0),
        ("Spectrum", ["spectrum", "--k", "2", "--n", "2", "--m", "3", "--numeric"] + out, 0),
        ("Alphabet too large", ["gen", "--family", "debruijn", "--k", "40", "--n", "1"] + out, 2),
        ("CSV is not a graph format", ["gen", "--family", "cycle", "--n", "3", "--format", "csv"] + out, 2),
        ("CSV Cayley ball", ["lamplighter", "cayley-ball", "--k", "2", "--r", "1", "--format", "csv"] + out, 2),
        ("Coverings suite", ["verify", "coverings", "--nmax", "2", "--mmax", "2"] + out, 0),
    ]

    success = True
    for i, (description, argv, expected) in enumerate(steps, 1):
        print(f"\n🔹 Step {i}: {description}")
        print("-" * 40)
        try:
            code = main(argv)
        except SystemExit as e:
            code = e.code
        if code == expected:
            print(f"✅ Exit code {code}")
        else:
            print(f"❌ Expected exit code {expected}, got {code}")
            success = False

    expected_files = ["spiderweb-k2-n3-m3.dot", "debruijn-k2-n2.json", "tensor.json",
                      "cayley-k2-r1.json", "report-coverings.json"]
    print("\n📊 Output files:")
    for name in expected_files:
        exists = (output_dir / name).exists()
        print(f"   {'✅' if exists else '❌'} {name}")
        success = success and exists

    report_path = output_dir / "report-coverings.json"
    if report_path.exists():
        report = json.loads(report_path.read_text())
        print(f"   Checks: {report['summary']}")
        success = success and report["summary"].get("fail", 0) == 0

    return success


def test_system(tmp_path):
    assert run_system_check(tmp_path)


if __name__ == "__main__":
    with tempfile.TemporaryDirectory() as directory:
        success = run_system_check(Path(directory))
    sys.exit(0 if success else 1)
