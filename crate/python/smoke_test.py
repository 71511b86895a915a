"""Smoke test for the relaysim_py extension.

Build and install first:
    pip install maturin
    maturin build --release -m crates/python/Cargo.toml -o dist
    pip install dist/relaysim_py-*.whl
"""

import math
import pathlib
import sys

import relaysim_py

ROOT = pathlib.Path(__file__).resolve().parents[1]


def main() -> int:
    sc = relaysim_py.Scenario(str(ROOT / "scenarios" / "desk_three_cell.toml"))
    assert sc.candidate_sites > 0

    base = sc.baseline()
    assert base["feasible"] and base["sites"] == []
    assert base["energy_per_bit"] > 0 and base["cell_delay"] > 0

    ev = sc.evaluate([0], base["p_enb"], 0, 0)
    assert ev["sites"] == [0] and all(0 <= x < 1 for x in ev["loads"])

    try:
        sc.evaluate([sc.candidate_sites], 0, 0, 0)
    except ValueError:
        pass
    else:
        raise AssertionError("out-of-range site accepted")

    res = sc.optimize(1, dmax_ratio=10.0, steps=4, proposals=20, restarts=1, seed=3)
    assert res["feasible"] and len(res["sites"]) == 1
    assert math.isfinite(res["energy_ratio"]) and res["delay_ratio"] <= 10.0

    share = relaysim_py.Scenario(str(ROOT / "scenarios" / "desk_three_cell.toml"), weighting="traffic_share")
    assert share.baseline()["energy_per_bit"] == base["energy_per_bit"]

    print(f"baseline Π0={base['energy_per_bit']:.4e} J/bit D0={base['cell_delay']:.4e} s")
    print(f"optimize n_RN=1: {res['sites']} Π/Π0={res['energy_ratio']:.3f} D/D0={res['delay_ratio']:.3f}")
    print("smoke test passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
