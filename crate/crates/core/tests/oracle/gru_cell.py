"""Hand evaluation of the GRU cell for the single-unit unit test.

Run: python3 gru_cell.py
"""
import math


def sig(v):
    return 1.0 / (1.0 + math.exp(-v))


wz, uz, bz, wr, ur, br, wh, uh, bh, wo, bo = 0.5, -0.3, 0.1, 0.2, 0.4, -0.2, 1.5, 0.7, 0.05, 2.0, -0.5
h = 0.0
for x in (0.3, 0.8):
    z = sig(wz * x + uz * h + bz)
    r = sig(wr * x + ur * h + br)
    c = math.tanh(wh * x + uh * (r * h) + bh)
    h = (1 - z) * h + z * c
print(repr(sig(wo * h + bo)))
