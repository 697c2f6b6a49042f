#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
#
# uavmimo: site-specific ray tracing and MIMO rank analysis for UAV links
# Copyright (C) 2026 The uavmimo authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ------------------------------------------------------------------------

"""Generate the synthetic urban canyon used by the shipped scenarios.

20 rectangular blocks on a 5 x 4 street grid over a 580 m x 460 m area,
heights uniform in [10, 30] m, written as a GeoJSON FeatureCollection in
WGS-84 around a fixed origin. The output is deterministic for a given seed.

    python3 tools/make_synthetic_scene.py scenarios/urban_canyon.geojson
"""

import argparse
import json
import math
import random

EARTH_RADIUS = 6378137.0
ORIGIN = (35.7713, -78.6749)  # lat, lon of the area center
WIDTH, DEPTH = 580.0, 460.0
COLS, ROWS = 5, 4


def enu_to_lonlat(x, y, origin=ORIGIN):
    lat0, lon0 = origin
    lat = lat0 + math.degrees(y / EARTH_RADIUS)
    lon = lon0 + math.degrees(x / (EARTH_RADIUS * math.cos(math.radians(lat0))))
    return [round(lon, 9), round(lat, 9)]


def blocks(seed):
    rng = random.Random(seed)
    cell_w, cell_d = WIDTH / COLS, DEPTH / ROWS
    out = []
    for row in range(ROWS):
        for col in range(COLS):
            cx = -WIDTH / 2 + (col + 0.5) * cell_w
            cy = -DEPTH / 2 + (row + 0.5) * cell_d
            # leaves a street of at least 20 m between neighbouring blocks
            w = rng.uniform(55.0, cell_w - 20.0)
            d = rng.uniform(45.0, cell_d - 20.0)
            cx += rng.uniform(-(cell_w - 20.0 - w) / 2, (cell_w - 20.0 - w) / 2)
            cy += rng.uniform(-(cell_d - 20.0 - d) / 2, (cell_d - 20.0 - d) / 2)
            h = round(rng.uniform(10.0, 30.0), 1)
            ring = [(cx - w / 2, cy - d / 2), (cx + w / 2, cy - d / 2), (cx + w / 2, cy + d / 2), (cx - w / 2, cy + d / 2)]
            out.append((f"blk{row}{col}", ring, h))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("output")
    ap.add_argument("--seed", type=int, default=6)
    args = ap.parse_args()

    features = []
    for ident, ring, height in blocks(args.seed):
        coords = [enu_to_lonlat(x, y) for x, y in ring]
        coords.append(coords[0])
        features.append({
            "type": "Feature",
            "id": ident,
            "properties": {"height": height},
            "geometry": {"type": "Polygon", "coordinates": [coords]},
        })
    with open(args.output, "w") as fh:
        json.dump({"type": "FeatureCollection", "features": features}, fh, indent=1)
        fh.write("\n")


if __name__ == "__main__":
    main()
