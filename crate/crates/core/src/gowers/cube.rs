//! Literal enumeration of combinatorial cubes `{x + ω·t : ω ∈ {0,1}^d}`.

use rayon::prelude::*;

use super::GowersOrder;
use crate::zn::GridFunction;

/// `ω·t mod n` for every `ω ∈ {0,1}^d`, where bit `j` of the index is `ω_{j+1}`.
pub fn cube_offsets(t: &[usize], n: usize) -> Vec<usize> {
    let mut offsets = vec![0usize; 1 << t.len()];
    fill_offsets(t, n, &mut offsets);
    offsets
}

fn fill_offsets(t: &[usize], n: usize, offsets: &mut [usize]) {
    offsets[0] = 0;
    for (j, &tj) in t.iter().enumerate() {
        let half = 1 << j;
        for w in 0..half {
            let v = offsets[w] + tj;
            offsets[half + w] = if v >= n { v - n } else { v };
        }
    }
}

/// Doubled copy so `x + off` with `x, off < n` needs no reduction.
pub(crate) fn doubled(f: &GridFunction) -> Vec<f64> {
    let mut v = Vec::with_capacity(2 * f.modulus());
    v.extend_from_slice(f.values());
    v.extend_from_slice(f.values());
    v
}

/// Advances `t[1..]` as an odometer; false once it wraps around.
fn advance(t: &mut [usize], n: usize) -> bool {
    for tj in t.iter_mut().skip(1) {
        *tj += 1;
        if *tj < n {
            return true;
        }
        *tj = 0;
    }
    false
}

/// `Σ_{x,t} Π_ω tables[ω][x + ω·t]` over `Z_N × Z_N^d`, unnormalized.
/// Parallel over `t_1`, summed in index order.
fn cube_sum(tables: &[&[f64]], n: usize, d: usize) -> f64 {
    let partial: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|t1| {
            let mut t = vec![0usize; d];
            t[0] = t1;
            let mut offsets = vec![0usize; 1 << d];
            let mut acc = 0.0;
            loop {
                fill_offsets(&t, n, &mut offsets);
                for x in 0..n {
                    let mut p = 1.0;
                    for (table, &off) in tables.iter().zip(&offsets) {
                        p *= table[x + off];
                    }
                    acc += p;
                }
                if !advance(&mut t, n) {
                    break;
                }
            }
            acc
        })
        .collect();
    partial.iter().sum()
}

/// `E_{x,t} Π_ω fs[ω](x + ω·t)`.
pub(crate) fn cube_average(fs: &[GridFunction], order: GowersOrder) -> f64 {
    let n = fs[0].modulus();
    let d = order.get() as usize;
    let tables: Vec<Vec<f64>> = fs.iter().map(doubled).collect();
    let refs: Vec<&[f64]> = tables.iter().map(Vec::as_slice).collect();
    cube_sum(&refs, n, d) / (n as f64).powi(d as i32 + 1)
}

/// `E_{x,t} Π_ω f(x + ω·t)`.
pub(crate) fn cube_average_single(f: &GridFunction, order: GowersOrder) -> f64 {
    let n = f.modulus();
    let d = order.get() as usize;
    let table = doubled(f);
    let refs: Vec<&[f64]> = vec![&table; 1 << d];
    cube_sum(&refs, n, d) / (n as f64).powi(d as i32 + 1)
}

/// `x ↦ E_t Π_{ω≠0} f(x + ω·t)` by literal enumeration.
pub(crate) fn dual_direct(f: &GridFunction, order: GowersOrder) -> Vec<f64> {
    let n = f.modulus();
    let d = order.get() as usize;
    let table = doubled(f);
    let partial: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|t1| {
            let mut t = vec![0usize; d];
            t[0] = t1;
            let mut offsets = vec![0usize; 1 << d];
            let mut acc = vec![0.0; n];
            loop {
                fill_offsets(&t, n, &mut offsets);
                for (x, slot) in acc.iter_mut().enumerate() {
                    let mut p = 1.0;
                    for &off in &offsets[1..] {
                        p *= table[x + off];
                    }
                    *slot += p;
                }
                if !advance(&mut t, n) {
                    break;
                }
            }
            acc
        })
        .collect();
    let scale = 1.0 / (n as f64).powi(d as i32);
    let mut out = vec![0.0; n];
    for part in &partial {
        for (o, p) in out.iter_mut().zip(part) {
            *o += p;
        }
    }
    out.iter_mut().for_each(|v| *v *= scale);
    out
}
