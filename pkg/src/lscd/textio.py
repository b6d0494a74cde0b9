"""Small text-output helpers shared by the file formats."""

from __future__ import annotations

import numpy as np


def fmt_float(x) -> str:
    """Shortest decimal string that round-trips the float64 value.

    Whole numbers print bare ("1", "0"), so the text formats stay compact
    and a save/load cycle is exact.
    """
    return np.format_float_positional(float(x), unique=True, trim="-")


def write_tsv(path, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row in rows:
            fh.write("\t".join(str(c) for c in row))
            fh.write("\n")


def read_tsv(path) -> list[list[str]]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line:
                out.append(line.split("\t"))
    return out
