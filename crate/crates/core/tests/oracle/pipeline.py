"""Straight-line re-implementation of the whole encryption path.

Shares no code with the Rust crate apart from the Kun scan enumeration in
kun_scan.py. Prints golden vectors for the oracle-equivalence tests.

Run: python3 pipeline.py
"""
import math
import os
import sys

sys.path.insert(0, os.path.dirname(__file__))
from kun_scan import kun  # noqa: E402

DENOM = 2**52 + 1
PERIOD = 512.0


def decode(raw):
    u = [(k + 1) / DENOM for k in raw]
    return 2 * u[0] - 1, 2 * u[1] - 1, 25 * u[2], 25 * u[3], raw[4] % 10_000 + 1000


def pw(v):
    return -((-v) ** math.pi) if v < 0 else v**math.pi


def step(x, y, a, b):
    u = math.pi ** math.fmod(y * y, PERIOD) - pw(x)
    w = math.pi ** math.fmod(x * x, PERIOD) - pw(y)
    return a * math.sin(u), b * math.cos(w)


def q1(v):
    return int(math.floor(abs(v) * 1e10) % 256)


def q2(v):
    return int(math.floor(math.floor(abs(v) * 1e10) / 256) % 256)


def c0_of(raw):
    c = 0
    for k in raw:
        for byte in k.to_bytes(8, "little"):
            c ^= byte
    return c


def sbox(a, b, seed):
    x, y = seed
    for _ in range(64):
        x, y = step(x, y, a, b)
    xs = []
    for _ in range(256):
        x, y = step(x, y, a, b)
        xs.append(x)
    order = sorted(range(256), key=lambda i: (xs[i], i))
    table = [0] * 256
    for rank, i in enumerate(order):
        table[i] = rank
    return table


def schedule(raw, rows, cols, channels, extra=0):
    x0, y0, a, b, n0 = decode(raw)
    n = rows * cols
    values = n * channels
    pairs = (values + 3 + 1) // 2
    x, y = x0, y0
    for _ in range(n0 + extra):
        x, y = step(x, y, a, b)
    inter = []
    for _ in range(pairs):
        x, y = step(x, y, a, b)
        inter += [x, y]
    xs, ctrl = inter[:values], inter[values : values + 3]
    perm = kun(rows, cols, 3, 3, ctrl, 3)
    box = sbox(a, b, (ctrl[0], ctrl[1]))
    kf = [[q1(v) for v in xs[c * n : (c + 1) * n]] for c in range(channels)]
    kb = [[q2(v) for v in xs[c * n : (c + 1) * n]] for c in range(channels)]
    return perm, box, kf, kb, c0_of(raw)


def encrypt(pixels, raw, rows, cols, channels):
    perm, box, kf, kb, c0 = schedule(raw, rows, cols, channels)
    out = [0] * len(pixels)
    for ch in range(channels):
        plane = pixels[ch::channels]
        scanned = [plane[i] for i in perm]
        fwd = []
        p1 = p2 = c0
        for i in range(len(scanned)):
            c = scanned[i] ^ box[(p1 + p2) % 256] ^ kf[ch][i]
            fwd.append(c)
            p1, p2 = c, p1
        res = [0] * len(fwd)
        n1 = n2 = c0
        for i in range(len(fwd) - 1, -1, -1):
            d = fwd[i] ^ box[(n1 + n2) % 256] ^ kb[ch][i]
            res[i] = d
            n1, n2 = d, n1
        for i, v in enumerate(res):
            out[i * channels + ch] = v
    return out


def decrypt(cipher, raw, rows, cols, channels):
    perm, box, kf, kb, c0 = schedule(raw, rows, cols, channels)
    out = [0] * len(cipher)
    for ch in range(channels):
        d = cipher[ch::channels]
        n = len(d)
        mid = [0] * n
        def at(v, i):
            return v[i] if 0 <= i < n else c0

        for i in range(n):
            mid[i] = d[i] ^ box[(at(d, i + 1) + at(d, i + 2)) % 256] ^ kb[ch][i]
        scanned = []
        for i in range(n):
            scanned.append(mid[i] ^ box[(at(mid, i - 1) + at(mid, i - 2)) % 256] ^ kf[ch][i])
        plane = [0] * n
        for i, p in enumerate(perm):
            plane[p] = scanned[i]
        for i, v in enumerate(plane):
            out[i * channels + ch] = v
    return out


RAW = [0x123456789ABCD, 0x0FEDCBA987654, 0xA5A5A5A5A5A5A, 0x5A5A5A5A5A5A5, 0x00000000004D2]


def orbit_head(raw, count):
    x0, y0, a, b, n0 = decode(raw)
    x, y = x0, y0
    for _ in range(n0):
        x, y = step(x, y, a, b)
    out = []
    for _ in range(count):
        x, y = step(x, y, a, b)
        out.append((x, y))
    return out


if __name__ == "__main__":
    print("c0", c0_of(RAW))
    for (xv, yv) in orbit_head(RAW, 3):
        print("orbit", xv.hex(), yv.hex())
    for channels in (1, 3):
        plain = [(i * 37 + 11) % 256 for i in range(16 * channels)]
        ct = encrypt(plain, RAW, 4, 4, channels)
        assert decrypt(ct, RAW, 4, 4, channels) == plain
        print("channels", channels)
        print("plain ", plain)
        print("cipher", ct)
