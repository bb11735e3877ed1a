# Copyright 2026 The rncep Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Writes the small desk instance under tests/data/desk.

Six nodes, eight links and 96 demand files (one every 15 minutes over a
day) with a diurnal profile. Some commodities are idle in some intervals so
the zero-inflated statistics have something to do.
"""

import math
import pathlib
import random

NODES = [("Ahlen", 7.9, 51.8), ("Bonn", 7.1, 50.7), ("Celle", 10.1, 52.6),
         ("Dessau", 12.2, 51.8), ("Essen", 7.0, 51.5), ("Fulda", 9.7, 50.6)]
LINKS = [("L1", "Ahlen", "Bonn", 4, 30), ("L2", "Bonn", "Fulda", 2, 24),
         ("L3", "Fulda", "Dessau", 3, 36), ("L4", "Dessau", "Celle", 5, 18),
         ("L5", "Celle", "Ahlen", 2, 27), ("L6", "Ahlen", "Essen", 6, 12),
         ("L7", "Essen", "Bonn", 1, 15), ("L8", "Celle", "Fulda", 0, 42)]
PAIRS = [("Ahlen", "Dessau", 6.0), ("Bonn", "Celle", 4.5), ("Essen", "Fulda", 3.0),
         ("Dessau", "Bonn", 5.0), ("Fulda", "Ahlen", 2.0), ("Celle", "Essen", 2.5),
         ("Essen", "Dessau", 1.2), ("Bonn", "Ahlen", 0.8)]


def network_text():
    lines = ["?SNDlib native format; type: network; version: 1.0",
             "# desk instance for tests", "", "NODES ("]
    for name, x, y in NODES:
        lines.append(f"  {name} ( {x:.2f} {y:.2f} )")
    lines += [")", "", "LINKS ("]
    for lid, a, b, cap, cost in LINKS:
        lines.append(f"  {lid} ( {a} {b} ) {cap}.00 0.00 0.00 0.00 "
                     f"( 1.00 {cost}.00 4.00 {cost * 3}.00 )")
    lines += [")", ""]
    return "\n".join(lines)


def demand_text(slot, rng):
    hour = slot / 4.0
    profile = 0.55 + 0.45 * math.sin(math.pi * (hour - 7.0) / 12.0) ** 2 if 7 <= hour <= 19 else 0.55
    lines = ["?SNDlib native format; type: demands; version: 1.0", "DEMANDS ("]
    for i, (s, t, base) in enumerate(PAIRS):
        if base < 1.5 and rng.random() < 0.35:
            continue  # idle interval
        value = base * profile * (0.8 + 0.4 * rng.random())
        lines.append(f"  D{i} ( {s} {t} ) 1 {value:.6f} UNLIMITED")
    lines += [")", ""]
    return "\n".join(lines)


def main():
    root = pathlib.Path(__file__).resolve().parent.parent / "tests" / "data" / "desk"
    (root / "scenarios").mkdir(parents=True, exist_ok=True)
    (root / "desk.txt").write_text(network_text())
    rng = random.Random(2026)
    for slot in range(96):
        name = f"demandMatrix-desk-{slot // 4:02d}{(slot % 4) * 15:02d}.txt"
        (root / "scenarios" / name).write_text(demand_text(slot, rng))


if __name__ == "__main__":
    main()
