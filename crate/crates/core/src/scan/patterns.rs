//! Classical scan orders.
//!
//! Power-of-two curves (Z-order, Z-mirror, Gray, Hilbert, U-index) are laid
//! out on the largest `2^k × 2^k` tile that fits, tiled in raster order; pixels
//! outside the tiled block follow in raster order.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::permutation::PermutationMap;
use crate::Dims;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScanPattern {
    Raster,
    ContinuousRaster,
    Spiral,
    Zigzag,
    ZOrder,
    ZMirror,
    Gray,
    Hilbert,
    UIndex,
}

impl ScanPattern {
    pub const ALL: [ScanPattern; 9] = [
        ScanPattern::Raster,
        ScanPattern::ContinuousRaster,
        ScanPattern::Spiral,
        ScanPattern::Zigzag,
        ScanPattern::ZOrder,
        ScanPattern::ZMirror,
        ScanPattern::Gray,
        ScanPattern::Hilbert,
        ScanPattern::UIndex,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScanPattern::Raster => "Raster Scan",
            ScanPattern::ContinuousRaster => "Continuous Raster Scan",
            ScanPattern::Spiral => "Spiral Scan",
            ScanPattern::Zigzag => "Zigzag Scan",
            ScanPattern::ZOrder => "Z-order Scan",
            ScanPattern::ZMirror => "Z-mirror Scan",
            ScanPattern::Gray => "Gray Scan",
            ScanPattern::Hilbert => "Hilbert Scan",
            ScanPattern::UIndex => "U-index Scan",
        }
    }
}

impl fmt::Display for ScanPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn build_scan(pattern: ScanPattern, dims: Dims) -> PermutationMap {
    let (rows, cols) = dims;
    let forward = match pattern {
        ScanPattern::Raster => (0..rows * cols).collect(),
        ScanPattern::ContinuousRaster => boustrophedon(rows, cols),
        ScanPattern::Spiral => spiral(rows, cols),
        ScanPattern::Zigzag => zigzag(rows, cols),
        ScanPattern::ZOrder => tiled(rows, cols, zorder),
        ScanPattern::ZMirror => tiled(rows, cols, |k, s| {
            let (r, c) = zorder(k, s);
            (r, s - 1 - c)
        }),
        ScanPattern::Gray => tiled(rows, cols, |k, s| zorder(k ^ (k >> 1), s)),
        ScanPattern::Hilbert => tiled(rows, cols, hilbert),
        ScanPattern::UIndex => tiled(rows, cols, uindex),
    };
    PermutationMap::from_trusted(forward, dims)
}

fn boustrophedon(rows: usize, cols: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        if r % 2 == 0 {
            out.extend((0..cols).map(|c| r * cols + c));
        } else {
            out.extend((0..cols).rev().map(|c| r * cols + c));
        }
    }
    out
}

/// Clockwise from the top-left corner, inward.
fn spiral(rows: usize, cols: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(rows * cols);
    let (mut top, mut bottom, mut left, mut right) = (0isize, rows as isize - 1, 0isize, cols as isize - 1);
    let idx = |r: isize, c: isize| r as usize * cols + c as usize;
    while top <= bottom && left <= right {
        for c in left..=right {
            out.push(idx(top, c));
        }
        for r in top + 1..=bottom {
            out.push(idx(r, right));
        }
        if top < bottom {
            for c in (left..right).rev() {
                out.push(idx(bottom, c));
            }
        }
        if left < right {
            for r in (top + 1..bottom).rev() {
                out.push(idx(r, left));
            }
        }
        top += 1;
        bottom -= 1;
        left += 1;
        right -= 1;
    }
    out
}

/// JPEG-style anti-diagonal zigzag.
fn zigzag(rows: usize, cols: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(rows * cols);
    for d in 0..rows + cols - 1 {
        let r_lo = d.saturating_sub(cols - 1);
        let r_hi = d.min(rows - 1);
        if d % 2 == 0 {
            out.extend((r_lo..=r_hi).rev().map(|r| r * cols + (d - r)));
        } else {
            out.extend((r_lo..=r_hi).map(|r| r * cols + (d - r)));
        }
    }
    out
}

fn tiled(rows: usize, cols: usize, curve: impl Fn(usize, usize) -> (usize, usize)) -> Vec<usize> {
    let side = 1usize << rows.min(cols).ilog2();
    let (tr, tc) = (rows / side, cols / side);
    let mut out = Vec::with_capacity(rows * cols);
    for ti in 0..tr {
        for tj in 0..tc {
            for k in 0..side * side {
                let (r, c) = curve(k, side);
                out.push((ti * side + r) * cols + tj * side + c);
            }
        }
    }
    for r in 0..rows {
        for c in 0..cols {
            if r >= tr * side || c >= tc * side {
                out.push(r * cols + c);
            }
        }
    }
    out
}

/// Morton order: column from the even bits, row from the odd bits.
fn zorder(k: usize, _side: usize) -> (usize, usize) {
    let (mut r, mut c) = (0, 0);
    let mut bit = 0;
    let mut k = k;
    while k > 0 {
        c |= (k & 1) << bit;
        r |= ((k >> 1) & 1) << bit;
        k >>= 2;
        bit += 1;
    }
    (r, c)
}

/// Base-4 digits placed as top-left, bottom-left, bottom-right, top-right.
fn uindex(k: usize, side: usize) -> (usize, usize) {
    const QUAD: [(usize, usize); 4] = [(0, 0), (1, 0), (1, 1), (0, 1)];
    let (mut r, mut c) = (0, 0);
    let mut s = side / 2;
    let mut shift = if side > 1 { 2 * (side.ilog2() as usize - 1) } else { 0 };
    while s > 0 {
        let (dr, dc) = QUAD[(k >> shift) & 3];
        r += dr * s;
        c += dc * s;
        s /= 2;
        shift = shift.saturating_sub(2);
    }
    (r, c)
}

fn hilbert(k: usize, side: usize) -> (usize, usize) {
    let (mut x, mut y) = (0usize, 0usize);
    let mut t = k;
    let mut s = 1;
    while s < side {
        let rx = 1 & (t / 2);
        let ry = 1 & (t ^ rx);
        if ry == 0 {
            if rx == 1 {
                x = s - 1 - x;
                y = s - 1 - y;
            }
            std::mem::swap(&mut x, &mut y);
        }
        x += s * rx;
        y += s * ry;
        t /= 4;
        s *= 2;
    }
    (y, x)
}
