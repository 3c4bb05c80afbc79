//! Constant-shift Lagrange interpolation on one-dimensional lines.
//!
//! A shift of `s` cells evaluates the line at `i - s`, i.e. it solves
//! `u_t + a u_z = 0` over one step with `a * dt / dz = s`. The stencil has
//! `order + 1` points and is centered on the cell containing the foot of
//! the characteristic.

use crate::error::{Error, Result};

pub const DEFAULT_ORDER: usize = 17;

fn check(len: usize, order: usize) -> Result<()> {
    if order % 2 == 0 {
        return Err(Error::EvenOrder(order));
    }
    if len < order + 1 {
        return Err(Error::StencilTooLarge { order, len });
    }
    Ok(())
}

/// Splits `-shift` into an integer cell offset and a fraction in `[0, 1)`.
fn split_shift(shift: f64) -> (i64, f64) {
    let y = -shift;
    let mut q = y.floor();
    let mut alpha = y - q;
    if alpha >= 1.0 {
        alpha -= 1.0;
        q += 1.0;
    }
    (q as i64, alpha)
}

/// Lagrange basis values at `t` for the nodes `first, first + 1, ..., first + order`.
///
/// Numerators are products of prefix and suffix factors `t - node`; the
/// denominators of equally spaced nodes are signed factorial products.
fn lagrange_weights(order: usize, first: i64, t: f64, out: &mut [f64]) {
    let p = order + 1;
    let factor = |l: usize| t - (first + l as i64) as f64;
    let mut fact = [1.0f64; 32];
    for m in 1..p {
        fact[m] = fact[m - 1] * m as f64;
    }
    let mut prefix = 1.0;
    for (m, w) in out.iter_mut().enumerate().take(p) {
        *w = prefix;
        prefix *= factor(m);
    }
    let mut suffix = 1.0;
    for m in (0..p).rev() {
        let den = fact[m] * fact[p - 1 - m];
        let sign = if (p - 1 - m) % 2 == 0 { 1.0 } else { -1.0 };
        out[m] *= suffix * sign / den;
        suffix *= factor(m);
    }
}

/// Precomputed stencil for one fractional shift.
#[derive(Debug, Clone)]
pub struct Stencil {
    order: usize,
    offset: i64,
    alpha: f64,
    /// Centered weights, first node at `-half` relative to the foot cell.
    weights: Vec<f64>,
    /// Entry `h - 1` holds the centered `2h`-point weights, first node at
    /// `1 - h`; used near the ends of bounded lines where the full stencil
    /// does not fit.
    edges: Vec<Vec<f64>>,
}

impl Stencil {
    pub fn new(shift: f64, order: usize) -> Self {
        let (offset, alpha) = split_shift(shift);
        let p = order + 1;
        let half = (order as i64 - 1) / 2;
        let mut weights = vec![0.0; p];
        let mut edges = Vec::new();
        if alpha != 0.0 {
            lagrange_weights(order, -half, alpha, &mut weights);
            edges = (1..=half + 1)
                .map(|h| {
                    let mut row = vec![0.0; 2 * h as usize];
                    lagrange_weights(2 * h as usize - 1, 1 - h, alpha, &mut row);
                    row
                })
                .collect();
        }
        Self {
            order,
            offset,
            alpha,
            weights,
            edges,
        }
    }

    fn half(&self) -> i64 {
        (self.order as i64 - 1) / 2
    }

    /// `out[i] = sum_m w_m input[i + first + m]` for `i` in `lo..hi`, written
    /// tap by tap so the inner loop runs over contiguous outputs.
    fn interior(&self, input: &[f64], out: &mut [f64], first: i64, lo: usize, hi: usize) {
        if lo >= hi {
            return;
        }
        let dst = &mut out[lo..hi];
        dst.fill(0.0);
        for (m, &w) in self.weights.iter().enumerate() {
            let s = (lo as i64 + first + m as i64) as usize;
            for (o, v) in dst.iter_mut().zip(&input[s..s + (hi - lo)]) {
                *o += w * v;
            }
        }
    }

    /// Periodic evaluation of `input` into `out` (same length).
    pub fn apply_periodic(&self, input: &[f64], out: &mut [f64]) {
        let n = input.len() as i64;
        if self.alpha == 0.0 {
            let q = self.offset.rem_euclid(n) as usize;
            let (head, tail) = input.split_at(q);
            out[..tail.len()].copy_from_slice(tail);
            out[tail.len()..].copy_from_slice(head);
            return;
        }
        let first = self.offset - self.half();
        let p = self.order as i64 + 1;
        // outputs whose stencil does not wrap
        let lo = (-first).clamp(0, n) as usize;
        let hi = (n - first - p + 1).clamp(lo as i64, n) as usize;
        self.interior(input, out, first, lo, hi);
        for i in (0..lo).chain(hi..n as usize) {
            let mut acc = 0.0;
            for (m, w) in self.weights.iter().enumerate() {
                let j = (i as i64 + first + m as i64).rem_euclid(n) as usize;
                acc += w * input[j];
            }
            out[i] = acc;
        }
    }

    /// Bounded evaluation: zero outside `[0, n - 1]`. Near the ends the
    /// stencil shrinks to the widest centered one that fits, so the order
    /// drops to 1 in the last cell.
    pub fn apply_bounded(&self, input: &[f64], out: &mut [f64]) {
        let n = input.len() as i64;
        if self.alpha == 0.0 {
            for (i, o) in out.iter_mut().enumerate() {
                let j = i as i64 + self.offset;
                *o = if (0..n).contains(&j) { input[j as usize] } else { 0.0 };
            }
            return;
        }
        let p = self.order as i64 + 1;
        let half = self.half();
        // centered stencils fit for start = i + offset - half in [0, n - p]
        let lo = (half - self.offset).clamp(0, n) as usize;
        let hi = (n - p + half - self.offset + 1).clamp(lo as i64, n) as usize;
        self.interior(input, out, self.offset - half, lo, hi);
        for i in (0..lo).chain(hi..n as usize) {
            let j0 = i as i64 + self.offset;
            // the foot lies in (j0, j0 + 1), which must be inside the line
            if j0 < 0 || j0 + 1 > n - 1 {
                out[i] = 0.0;
                continue;
            }
            let h = (half + 1).min(j0 + 1).min(n - 1 - j0);
            let row = &self.edges[h as usize - 1];
            // differences from a nearby node keep constants exact
            let base = input[j0 as usize];
            let first = (j0 + 1 - h) as usize;
            let taps = &input[first..first + row.len()];
            out[i] = base + row.iter().zip(taps).map(|(w, v)| w * (v - base)).sum::<f64>();
        }
    }
}

/// Periodic shift of `line` by `shift` cells.
pub fn shift_periodic(line: &[f64], shift: f64, order: usize) -> Result<Vec<f64>> {
    check(line.len(), order)?;
    let mut out = vec![0.0; line.len()];
    Stencil::new(shift, order).apply_periodic(line, &mut out);
    Ok(out)
}

/// Shift of `line` by `shift` cells with zero inflow at both ends.
pub fn shift_bounded(line: &[f64], shift: f64, order: usize) -> Result<Vec<f64>> {
    check(line.len(), order)?;
    let mut out = vec![0.0; line.len()];
    Stencil::new(shift, order).apply_bounded(line, &mut out);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Boundary {
    Periodic,
    Bounded,
}

/// Shifts every line along the middle axis of a row-major `[outer, n, inner]`
/// array. `shift_of(o, c)` gives the shift for the line at outer index `o`
/// and inner column `c`.
pub(crate) fn advect_axis<F>(
    values: &mut [f64],
    outer: usize,
    n: usize,
    inner: usize,
    order: usize,
    boundary: Boundary,
    shift_of: F,
) -> Result<()>
where
    F: Fn(usize, usize) -> f64 + Sync,
{
    use rayon::prelude::*;
    use std::collections::HashMap;

    check(n, order)?;
    debug_assert_eq!(values.len(), outer * n * inner);
    const TILE: usize = 32;
    const TASK: usize = 1 << 16;
    const CACHE: usize = 4096;
    let slab_len = n * inner;
    let group = (TASK / slab_len).max(1);
    values
        .par_chunks_mut(slab_len * group)
        .enumerate()
        .for_each(|(g, chunk)| {
            // lines often share shifts (all velocities of a cell, or all
            // cells at one velocity), so stencils are reused by bit pattern
            let mut cache: HashMap<u64, Stencil> = HashMap::new();
            let mut lines_in = vec![0.0; TILE * n];
            let mut line_out = vec![0.0; n];
            for (k, slab) in chunk.chunks_mut(slab_len).enumerate() {
                let o = g * group + k;
                let mut c0 = 0;
                while c0 < inner {
                    let width = TILE.min(inner - c0);
                    for row in 0..n {
                        let src = &slab[row * inner + c0..row * inner + c0 + width];
                        for (t, &v) in src.iter().enumerate() {
                            lines_in[t * n + row] = v;
                        }
                    }
                    for t in 0..width {
                        let shift = shift_of(o, c0 + t);
                        if shift == 0.0 {
                            continue;
                        }
                        if cache.len() >= CACHE {
                            cache.clear();
                        }
                        let stencil = cache
                            .entry(shift.to_bits())
                            .or_insert_with(|| Stencil::new(shift, order));
                        let line = &mut lines_in[t * n..(t + 1) * n];
                        match boundary {
                            Boundary::Periodic => stencil.apply_periodic(line, &mut line_out),
                            Boundary::Bounded => stencil.apply_bounded(line, &mut line_out),
                        }
                        line.copy_from_slice(&line_out);
                    }
                    for row in 0..n {
                        let dst = &mut slab[row * inner + c0..row * inner + c0 + width];
                        for (t, v) in dst.iter_mut().enumerate() {
                            *v = lines_in[t * n + row];
                        }
                    }
                    c0 += width;
                }
            }
        });
    Ok(())
}
