"""Straight-line enumeration of the Kun scan used to freeze golden vectors."""
import sys


def regions(rows, cols, rr, rc):
    rr, rc = min(rr, rows), min(rc, cols)
    hs = [rows // rr] * rr
    hs[-1] += rows - sum(hs)
    ws = [cols // rc] * rc
    ws[-1] += cols - sum(ws)
    out = []
    top = 0
    for h in hs:
        left = 0
        for w in ws:
            corner = len(out) % 4
            cells = []
            for i in range(h):
                order = range(w) if i % 2 == 0 else range(w - 1, -1, -1)
                for j in order:
                    r = h - 1 - i if corner in (2, 3) else i
                    c = w - 1 - j if corner in (1, 2) else j
                    cells.append((top + r) * cols + left + c)
            out.append(cells)
            left += w
        top += h
    return out


def kun(rows, cols, rr, rc, ctrl, rounds):
    regs = regions(rows, cols, rr, rc)
    R = len(regs)
    offs = [int(abs(c) * 10**6) % R for c in ctrl]
    n = rows * cols
    epoch = max(1, n // R)
    cur = [0] * R
    shift = 0
    f = []
    for k in range(n):
        if k > 0 and k % epoch == 0:
            shift += offs[(k // epoch) % 3] + 1
        r = (k + shift) % R
        while cur[r] >= len(regs[r]):
            r = (r + 1) % R
        f.append(regs[r][cur[r]])
        cur[r] += 1
    assert sorted(f) == list(range(n))
    g = list(range(n))
    for _ in range(rounds):
        g = [g[i] for i in f]  # apply f after the accumulated map
    return g


if __name__ == "__main__":
    print(kun(4, 4, 2, 2, [0.3, 0.7, 0.11], 1))
    print(kun(4, 4, 2, 2, [0.3, 0.7, 0.11], 3))
