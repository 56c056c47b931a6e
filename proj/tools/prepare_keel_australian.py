#!/usr/bin/env python3
"""Convert the KEEL distribution of the Australian credit data to UCI layout.

KEEL publishes australian.dat with the decimal point removed from the real
valued attributes A2, A3 and A7 (22.08 is stored as 2208.0). A2 is restored
exactly: its documented range [13.75, 80.25] admits a single decimal
placement for every stored value. A3 and A7 admit several placements and
are written as KEEL stores them.

Usage: prepare_keel_australian.py <keel australian.dat> <output file>
"""

import sys

A2_RANGE = (13.75, 80.25)


def restore_a2(stored: str) -> str:
    digits = float(stored)
    for shift in range(5):
        value = digits / 10 ** shift
        if A2_RANGE[0] <= value <= A2_RANGE[1]:
            return f"{value:.2f}"
    raise ValueError(f"A2 value {stored} cannot be placed in {A2_RANGE}")


def integral(stored: str) -> str:
    value = float(stored)
    return str(int(value)) if value.is_integer() else stored


def main() -> int:
    if len(sys.argv) != 3:
        print(__doc__, file=sys.stderr)
        return 2
    rows = []
    with open(sys.argv[1]) as src:
        for line in src:
            line = line.strip()
            if not line or line.startswith("@"):
                continue
            cells = line.split(",")
            if len(cells) != 15:
                raise ValueError(f"expected 15 cells, got {len(cells)}: {line}")
            cells = [integral(c) for c in cells]
            cells[1] = restore_a2(cells[1])
            rows.append(" ".join(cells))
    with open(sys.argv[2], "w") as dst:
        dst.write("\n".join(rows) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
