//! In-place application of a k-qubit matrix to an amplitude buffer.

use alloc::vec::Vec;

use crate::{ComplexMatrix, C64};

/// Precomputed gather/scatter layout for one gate on one register size.
pub(crate) struct Layout {
    offsets: Vec<usize>,
    mask: usize,
}

impl Layout {
    /// `sites` are positions in an `n`-qubit index, site 0 most significant.
    pub(crate) fn new(sites: &[usize], n: usize) -> Self {
        let k = sites.len();
        let bits: Vec<usize> = sites.iter().map(|&s| 1usize << (n - 1 - s)).collect();
        let mask = bits.iter().fold(0, |m, b| m | b);
        let offsets = (0..(1usize << k))
            .map(|local| {
                bits.iter()
                    .enumerate()
                    .filter(|(j, _)| (local >> (k - 1 - j)) & 1 == 1)
                    .fold(0, |acc, (_, b)| acc | b)
            })
            .collect();
        Self { offsets, mask }
    }
}

/// `ψ ← (U on sites) ψ` where `ψ` has `2^n` entries.
pub(crate) fn apply(amps: &mut [C64], n: usize, sites: &[usize], matrix: &ComplexMatrix) {
    let layout = Layout::new(sites, n);
    apply_with(amps, &layout, matrix, false);
}

/// Same as [`apply`] with the entrywise conjugate of `matrix`.
pub(crate) fn apply_conj(amps: &mut [C64], n: usize, sites: &[usize], matrix: &ComplexMatrix) {
    let layout = Layout::new(sites, n);
    apply_with(amps, &layout, matrix, true);
}

fn apply_with(amps: &mut [C64], layout: &Layout, matrix: &ComplexMatrix, conjugate: bool) {
    let d = layout.offsets.len();
    // row-major copy for the inner loop
    let mut m = Vec::with_capacity(d * d);
    for r in 0..d {
        for c in 0..d {
            let v = matrix[(r, c)];
            m.push(if conjugate { v.conj() } else { v });
        }
    }
    let mut gathered = alloc::vec![C64::new(0.0, 0.0); d];
    for base in 0..amps.len() {
        if base & layout.mask != 0 {
            continue;
        }
        for (g, off) in gathered.iter_mut().zip(&layout.offsets) {
            *g = amps[base | off];
        }
        for (r, off) in layout.offsets.iter().enumerate() {
            let row = &m[r * d..(r + 1) * d];
            let mut acc = C64::new(0.0, 0.0);
            for (a, b) in row.iter().zip(&gathered) {
                acc += a * b;
            }
            amps[base | off] = acc;
        }
    }
}
