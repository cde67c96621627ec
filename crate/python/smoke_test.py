#!/usr/bin/env python3
"""Smoke test for the lisawave_py extension module.

Locates the built cdylib under target/, imports it, and exercises the main
surface: preset construction, stepping, error measurement against the exact
solution, rerun determinism, and the closed-form fields.

Run from the repository root after `cargo build -p lisawave-py`:

    python3 python/smoke_test.py
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def import_extension():
    candidates = [
        REPO / "target" / profile / name
        for profile in ("debug", "release")
        for name in ("liblisawave_py.so", "lisawave_py.so", "liblisawave_py.dylib")
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit("extension not found; run `cargo build -p lisawave-py` first")
    stage = Path(tempfile.mkdtemp(prefix="lisawave_py_"))
    shutil.copy2(built, stage / "lisawave_py.so")
    sys.path.insert(0, str(stage))
    import lisawave_py

    return lisawave_py


def approx(a, b, rel):
    return abs(a - b) <= rel * abs(b)


def main():
    lw = import_extension()

    names = lw.preset_names()
    assert len(names) == 8 and "example1" in names, names
    assert "final_time" in lw.preset_toml("example1")

    # closed-form fields
    assert approx(lw.manufactured_solution(0.0, 0.0, 0.0), 0.22259495730990295, 1e-12)
    assert approx(lw.gaussian_pulse(0.0, 0.0, 0.0), 1.0 / (2.0 * math.pi), 1e-12)
    assert approx(lw.cosine_speed_squared(0.0, 0.0), 1.5, 1e-12)
    assert approx(lw.manufactured_source(0.0, 0.0, 0.0), 219.6924170326116, 1e-9)
    assert approx(lw.max_stable_tau(0.1, 1.0), 0.1 / math.sqrt(2.0), 1e-12)

    # a full benchmark run reproduces the known coarse-grid error
    sim = lw.Simulation.preset("example1")
    assert sim.shape() == (65, 65)
    assert sim.total_steps() == 640
    assert sim.cfl_pass()
    sim.run()
    assert approx(sim.time(), 1.0, 1e-9)
    l2, linf = sim.errors_vs_exact()
    assert approx(l2, 0.18286, 0.05), l2
    assert approx(linf, 0.37630, 0.05), linf
    print(f"example1: l2 = {l2:.6e}, linf = {linf:.6e} at t = {sim.time()}")

    # stepping in pieces lands on the same field, bit for bit
    a = lw.Simulation.preset("example1")
    b = lw.Simulation.preset("example1")
    a.step(100)
    for _ in range(99):
        b.step()
    b.step(1)
    assert a.step_index() == b.step_index()
    assert a.field() == b.field()

    # invalid input surfaces as ValueError, not a crash
    try:
        lw.Simulation.preset("example99")
        raise AssertionError("unknown preset was accepted")
    except ValueError as e:
        assert "example99" in str(e)
    try:
        lw.Simulation.from_toml("[domain]\n")
        raise AssertionError("broken config was accepted")
    except ValueError:
        pass

    # a custom config via TOML, and a short refinement table
    tiny = lw.preset_toml("example1").replace("n_x = 64", "n_x = 16").replace(
        "n_y = 64", "n_y = 16"
    )
    sim = lw.Simulation.from_toml(tiny)
    sim.step(3)
    assert sim.step_index() == 4  # seeded runs start at level 1

    rows = lw.convergence_table(lw.preset_toml("example1"), [64, 128])
    assert rows[0][2] is None and rows[1][2] is not None
    assert 1.5 < rows[1][2] < 2.2, rows
    print(f"refinement: {rows}")

    print("smoke test passed")


if __name__ == "__main__":
    main()
