"""Smoke test for the `annulus` Python extension.

Uses an installed `annulus` module if there is one (for example after
`maturin develop` in crates/py), otherwise loads the shared library from
target/release built by
`cargo build --release -p annulus-py --features extension-module`.
"""

import importlib.machinery
import importlib.util
import math
import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    try:
        import annulus

        return annulus
    except ImportError:
        pass
    for name in ("libannulus.so", "libannulus.dylib", "annulus.dll"):
        path = ROOT / "target" / "release" / name
        if path.exists():
            loader = importlib.machinery.ExtensionFileLoader("annulus", str(path))
            spec = importlib.util.spec_from_loader("annulus", loader)
            module = importlib.util.module_from_spec(spec)
            loader.exec_module(module)
            return module
    sys.exit("annulus extension not found; build it first (see the module docstring)")


def main():
    annulus = load()

    power2 = annulus.LiftMap.zoo("power", {"d": 2})
    assert power2.degree == 2
    assert power2(0.25, 0.1) == (0.5, 0.2)

    for d in (2, 3, 5):
        f = annulus.LiftMap.zoo("power", {"d": d})
        assert annulus.lefschetz_index(f, annulus.circle(0.5)) == 1
        assert annulus.lefschetz_index(f, annulus.circle(2.0)) == d

    reports = annulus.completeness_check(power2, 3, (-8.0, 8.0, -2.0, 2.0))
    assert [len(r["realized_residues"]) for r in reports] == [1, 3, 7]
    assert all(r["verdict"] == "COMPLETE" for r in reports)
    assert abs(annulus.growth_rate(reports) - math.log(7) / 3) < 1e-12

    power3 = annulus.LiftMap.zoo("power", {"d": 3})
    assert annulus.nielsen_residue(power3, 0.0, 0.0, 1) == 0
    assert annulus.nielsen_residue(power3, 0.5, 0.0, 1) == 1

    boxes = annulus.isolate_fixed_points(power2, (-1.3, -0.7, -0.5, 0.5), k=1)
    assert len(boxes) == 1 and boxes[0]["boundary_degree"] == 1

    assert all(o["passed"] for o in annulus.lemma_suite())
    assert "counterexample_deg_minus1" in {e["id"] for e in annulus.zoo_entries()}

    try:
        annulus.LiftMap.zoo("no_such_map")
    except ValueError:
        pass
    else:
        raise AssertionError("unknown zoo id accepted")

    print("python smoke test passed")


if __name__ == "__main__":
    main()
