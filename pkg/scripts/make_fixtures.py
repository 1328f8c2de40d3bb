#!/usr/bin/env python3
"""
Sample grid-function files for the CLI
Writes unit weights, the two-valued square exponent and a few Hardy fixtures
"""

import argparse
import sys
import os
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np

from vexleb.schemas.dyadic import DyadicTree
from vexleb.schemas.grid import ExponentField, Grid1D, Grid2D, GridFunction
from vexleb.services.fixtures import HARDY_FIXTURES, cor35_exponent, cor35_weight, two_valued_exponent
from vexleb.utils.gridio import write_grid_function
from vexleb.utils.serialization import dumps


def sample_files(n: int) -> dict:
    unit_axis = Grid1D(lo=0.0, hi=1.0, n=n)
    unit_square = Grid2D.square(0.0, 1.0, n)
    files = {
        "unit_indicator.gf": GridFunction.constant(unit_axis, 1.0),
        "unit_square.gf": GridFunction.constant(unit_square, 1.0),
        "ramp.gf": GridFunction.from_callable(unit_axis, lambda x: x),
        "two_piece_exponent.gf": ExponentField.from_callable(unit_axis, lambda x: np.where(x < 0.5, 2.0, 3.0)),
        "split_exponent.gf": two_valued_exponent(n, 2.0, 3.0),
        "cor35_exponent.gf": cor35_exponent(n),
        "cor35_weight.gf": cor35_weight(n),
    }
    for name, fixture in HARDY_FIXTURES.items():
        v, w = fixture.build(8 * n)
        files[f"{name}_v.gf"] = v
        files[f"{name}_w.gf"] = w
    return files


def make_fixtures(directory: str, n: int):
    """Write every sample file into `directory`"""
    os.makedirs(directory, exist_ok=True)
    try:
        for name, data in sample_files(n).items():
            write_grid_function(data, os.path.join(directory, name))
            print(f"Wrote {name}")
        tree = DyadicTree.zeros(length=1.0, depth=4)
        tree = tree.with_coefficients(tree.lengths() ** 1.5)
        with open(os.path.join(directory, "power_tree.json"), "w") as fh:
            fh.write(dumps(tree.to_dict()))
        print("Wrote power_tree.json")
    except Exception as e:
        print(f"Error writing fixtures: {e}")
        raise


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description="Write sample grid-function files")
    parser.add_argument("directory", nargs="?", default="fixtures")
    parser.add_argument("--n", type=int, default=64)
    args = parser.parse_args()
    print(f"Writing vexleb sample files to {args.directory}...")
    make_fixtures(args.directory, args.n)
