# Copyright 2026 The ragastat Authors
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
"""Regenerates fixtures/clips/*.csv and fixtures/raga_manifest.json.

The original recordings behind the emotion dataset are not distributable,
so the manifest points at synthetic stand-in pitch tracks. Each clip is an
AR(1) series whose spread and smoothness are keyed to the clip's present
emotion label, so that stacked per-emotion sequences show distinct,
monotone variance and MSSD profiles. Deterministic: fixed seed, stdlib
only. Run from the repository root:

    python3 tools/make_synthetic_clips.py
"""

import json
import math
import pathlib
import random

ROOT = pathlib.Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"
CLIPS = FIXTURES / "clips"

EMOTIONS = ["Anger", "Serenity", "Romantic", "Anxiety", "Devotion",
            "Heroic", "Sorrow"]

# Target stationary SD and (halved) MSSD per emotion, strictly decreasing
# with canonical rank so the synthetic store ranks in the canonical order.
SD = {"Anger": 35.0, "Serenity": 29.8, "Romantic": 25.3, "Anxiety": 21.5,
      "Devotion": 18.3, "Heroic": 15.5, "Sorrow": 13.2}
MSSD = {"Anger": 90.0, "Serenity": 55.8, "Romantic": 34.6, "Anxiety": 21.4,
        "Devotion": 13.3, "Heroic": 8.2, "Sorrow": 5.1}

# Raga -> (previous emotion set, present emotion per segment; None where the
# listening test reached no consensus). 4 segments per raga, 44 clips total.
RAGAS = [
    ("Adana", ["Heroic"], ["Anger", "Devotion", "Devotion", "Romantic"]),
    ("Bhairav", ["Anger", "Serenity", "Devotion", "Sorrow"],
     ["Anxiety", "Anxiety", "Anxiety", "Anxiety"]),
    ("Chayanat", ["Romantic"], ["Devotion", "Devotion", None, None]),
    ("Darbari Kannada", ["Serenity"], ["Anxiety", "Heroic", "Anxiety", None]),
    ("Hindol", ["Heroic", "Anger"], ["Anger", "Devotion", None, None]),
    ("Jaijayanti", ["Romantic"], ["Heroic", "Romantic", "Romantic",
                                  "Romantic"]),
    ("Jogiya", ["Sorrow", "Romantic", "Devotion"],
     ["Heroic", "Heroic", "Anxiety", None]),
    ("Kedar", ["Serenity"], ["Serenity", "Serenity", "Serenity", "Romantic"]),
    ("Mia-ki-Malhar", ["Sorrow"], ["Sorrow", "Sorrow", "Anxiety", "Heroic"]),
    ("Mia-ki-Todi", ["Devotion", "Romantic", "Sorrow"],
     ["Heroic", "Devotion", "Devotion", "Devotion"]),
    ("Shree", ["Serenity"], ["Devotion", "Heroic", "Anxiety", "Heroic"]),
]


def slug(raga: str) -> str:
    return raga.lower().replace(" ", "_").replace("-", "_")


def clip_series(rng: random.Random, emotion: str | None) -> list[tuple]:
    """One clip: (time_ms, f0_hz, voiced) rows of an AR(1) pitch track."""
    e = emotion or "Anxiety"  # neutral profile for unlabeled segments
    sd, ms = SD[e], MSSD[e]
    phi = 1.0 - ms / (sd * sd)
    eps = sd * math.sqrt(1.0 - phi * phi)
    tonal = rng.uniform(190.0, 230.0)  # singer-chosen reference pitch
    n = rng.randint(700, 1100)
    rows = []
    x = tonal + rng.gauss(0.0, sd)
    for k in range(n):
        x = tonal + phi * (x - tonal) + rng.gauss(0.0, eps)
        x = min(500.0, max(60.0, x))
        voiced = rng.random() >= 0.02  # sparse unvoiced gaps
        rows.append((k * 10.0, round(x, 6) if voiced else 0.0, voiced))
    return rows


def write_clip(path: pathlib.Path, rows) -> None:
    lines = ["time_ms,f0_hz,voiced"]
    for t, f0, voiced in rows:
        lines.append(f"{t:.3f},{f0:.6f},{1 if voiced else 0}")
    path.write_text("\n".join(lines) + "\n")


def main() -> None:
    rng = random.Random(20260819)
    CLIPS.mkdir(parents=True, exist_ok=True)
    records = []
    for raga, previous, present in RAGAS:
        for seg, emotion in enumerate(present, start=1):
            clip_id = f"{slug(raga)}_seg{seg}"
            write_clip(CLIPS / f"{clip_id}.csv", clip_series(rng, emotion))
            records.append({
                "clip_id": clip_id,
                "raga": raga,
                "previous_emotions": previous,
                "present_emotion": emotion,
                "source_path": f"clips/{clip_id}.csv",
            })
    manifest = {"signature_source": None, "records": records}
    (FIXTURES / "raga_manifest.json").write_text(
        json.dumps(manifest, indent=2) + "\n")
    print(f"wrote {len(records)} clips under {CLIPS}")


if __name__ == "__main__":
    main()
