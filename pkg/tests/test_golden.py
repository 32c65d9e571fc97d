from __future__ import annotations

from pathlib import Path

import pytest

from setmax.cli import main

GOLDEN = Path(__file__).resolve().parent.parent / "docs" / "golden"

GENERATORS = {
    "tight-supermodular": ["--k", "1", "--d", "2", "--eps", "1/10"],
    "tight-dependency": ["--k", "1", "--d", "1", "--eps", "1/10"],
    "kdm": ["--k", "1", "--d", "1", "--edges", "3", "--vertices", "2", "--seed", "1"],
    "welfare": ["--bidders", "2", "--items", "2", "--d", "1", "--seed", "1"],
    "graph-uniform": ["--vertices", "4", "--p", "1/2", "--delta", "1/2", "--seed", "1"],
    "random": ["--n", "4", "--d", "1", "--constraint", "intersection", "--seed", "1"],
}


@pytest.mark.parametrize("name", sorted(GENERATORS))
def test_generator_reproduces_golden_file(name, tmp_path):
    out = tmp_path / f"{name}.json"
    assert main(["gen", name, *GENERATORS[name], "-o", str(out)]) == 0
    assert out.read_bytes() == (GOLDEN / f"{name}.json").read_bytes()
