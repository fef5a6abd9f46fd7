"""CR bound curves for several region shapes and square sizes at fixed mean degree."""

import numpy as np
from _common import out_path, parser

from waxman.analysis import cr_bound_for_degree
from waxman.geometry import DistanceLaw, Region
from waxman.sweep import equal_area, write_rows


def main():
    ap = parser(__doc__)
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--k-bar", type=float, default=3.0)
    args = ap.parse_args()
    regions = {
        "line": Region.line(),
        "square": Region.square(),
        "disk_equal_area": equal_area("disk"),
        "rect_2x1_equal_area": equal_area("rect"),
        "ball": Region.ball(1.0),
        "square_L2": Region.square(2.0),
        "square_L4": Region.square(4.0),
    }
    rows = []
    for name, region in regions.items():
        law = DistanceLaw.analytic(region)
        for s in np.geomspace(0.01, 100, 41):
            rows.append({"region": name, "s": float(s),
                         "cr_sd": cr_bound_for_degree(args.n, args.k_bar, float(s), law)})
    path = out_path(args, "cr_bounds.csv")
    write_rows(path, rows, ["region", "s", "cr_sd"])
    print("wrote", path, f"({len(rows)} rows)")


if __name__ == "__main__":
    main()
