"""Recover a planted burst with MABED and Peaky Topics.

A day and a half of uniform chatter gets a 10x injection of a few keywords
inside a known window. Both detectors should put the window back where it was.

    python3 demos/burst_recovery.py
"""
import numpy as np

from edsa.events import format_table, make_slices, mabed_detect, peaky_detect
from edsa.synthetic import planted_burst

HOUR = 3600
SPAN = 32 * HOUR

window = (9 * HOUR, 13 * HOUR)
corpus = planted_burst(0, window, SPAN, keywords=("storm", "flood", "power"))
print(f"{len(corpus)} tweets over {SPAN // HOUR} hours; burst planted in hours 9-13")

slices = make_slices(corpus, 32)
print("per-slice tweet totals:", slices.totals.tolist())

# 'storm' mentions per slice: the injected window stands out from the baseline
storm = slices.series("storm")
print("storm mentions:", storm.astype(int).tolist())


def jaccard(a, b):
    inter = max(0, min(a[1], b[1]) - max(a[0], b[0]))
    return inter / (max(a[1], b[1]) - min(a[0], b[0]))


print("\nMABED top events")
events = mabed_detect(slices, top_k=3)
print(format_table(events))
top = events[0]
print(f"top interval hours {top.start / HOUR:.2f}-{top.end / HOUR:.2f}, "
      f"Jaccard {jaccard((top.start, top.end), window):.3f}")

# Peaky Topics works below slice resolution: plant a 7.5 minute burst.
sub = HOUR // 8
short = (20 * HOUR + 3 * sub, 20 * HOUR + 4 * sub)
corpus = planted_burst(1, short, SPAN, keywords=("quake",))
slices = make_slices(corpus, 32)
print("\nPeaky Topics top events (8 sub-bins per slice)")
events = peaky_detect(slices, sub_bins=8, top_k=3)
print(format_table(events))
top = events[0]
print(f"top sub-bin starts at {top.start - 20 * HOUR}s past hour 20, "
      f"Jaccard {jaccard((top.start, top.end), short):.3f}")

mags = np.array([e.magnitude for e in events])
print("magnitudes, descending:", np.round(mags, 2).tolist())
