#!/usr/bin/env python3
"""Turn the raw diamonds CSV (ggplot2 layout) into the layout `ies` expects.

Keeps carat, depth, table and price, with carat and price on the log scale.
"""

import argparse

import numpy as np
import pandas as pd


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("raw", help="raw diamonds CSV with carat, depth, table, price columns")
    ap.add_argument("out", help="output CSV")
    args = ap.parse_args()

    df = pd.read_csv(args.raw)
    out = pd.DataFrame(
        {
            "carat": np.log(df["carat"]),
            "depth": df["depth"],
            "table": df["table"],
            "price": np.log(df["price"]),
        }
    )
    out.to_csv(args.out, index=False, float_format="%.10g")


if __name__ == "__main__":
    main()
