"""Smoke test for the pystabsat extension. Build it first with
`maturin develop --release -m crates/python/Cargo.toml`."""

import json
import pathlib

import pystabsat

ROOT = pathlib.Path(__file__).resolve().parent.parent

H = [
    [1, 0, 0, 1, 0, 1, 1],
    [0, 1, 0, 1, 1, 0, 1],
    [0, 0, 1, 0, 1, 1, 1],
]


def main():
    assert pystabsat.gf2_rank(H) == 3
    ker = pystabsat.gf2_kernel(H)
    assert len(ker) == 4
    for v in ker:
        for r in H:
            assert sum(a & b for a, b in zip(v, r)) % 2 == 0

    steane = pystabsat.CssCode(H, H, name="steane")
    assert steane.k() == 1
    assert steane.validate()["checks"]
    assert all(c["passed"] for c in steane.validate()["checks"])

    lower = steane.distance(3)
    assert lower["distance"]["status"] == "proven-lower-bound", lower
    assert all(s["certified"] for s in lower["sectors"])
    refuted = steane.distance(4)
    assert refuted["distance"]["status"] == "refuted", refuted

    exact = steane.exact()
    assert exact["distance"]["value"] == 3
    assert steane.oracle_distance() == 3

    dimacs, varmap = steane.encode("x", 2)
    assert dimacs.startswith("p cnf")
    assert json.loads(varmap)["E[0]"] == 1

    bb = pystabsat.CssCode.bb(6, 6, [(3, 0), (0, 1), (0, 2)], [(0, 3), (1, 0), (2, 0)], name="bb72")
    assert (bb.n, bb.k()) == (72, 12)

    golay = pystabsat.CssCode.load(str(ROOT / "fixtures" / "golay.json"))
    assert golay.n == 23 and golay.k() == 1

    report = pystabsat.check_lrat("p cnf 1 2\n1 0\n-1 0\n", "3 0 1 2 0\n")
    assert report["accepted"]
    bad = pystabsat.check_lrat("p cnf 1 2\n1 0\n-1 0\n", "3 0 1 0\n")
    assert not bad["accepted"]

    print("smoke test passed")


if __name__ == "__main__":
    main()
