//! Partitions of `Z_N`, standing in for σ-algebras.

use std::collections::HashMap;

use crate::error::{GtError, Result};
use crate::zn::GridFunction;

/// Atom labels `0..atom_count`, every atom nonempty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    labels: Vec<u32>,
    atoms: usize,
}

impl Partition {
    pub fn trivial(n: usize) -> Self {
        Self {
            labels: vec![0; n],
            atoms: usize::from(n > 0),
        }
    }

    pub fn discrete(n: usize) -> Self {
        Self {
            labels: (0..n as u32).collect(),
            atoms: n,
        }
    }

    /// Relabels arbitrary keys to `0..count` in order of first appearance.
    pub fn from_keys<K: std::hash::Hash + Eq>(keys: impl IntoIterator<Item = K>) -> Self {
        let mut seen = HashMap::new();
        let labels = keys
            .into_iter()
            .map(|k| {
                let next = seen.len() as u32;
                *seen.entry(k).or_insert(next)
            })
            .collect();
        Self {
            labels,
            atoms: seen.len(),
        }
    }

    pub fn from_labels(labels: &[u32]) -> Self {
        Self::from_keys(labels.iter().copied())
    }

    /// The coarsest common refinement.
    pub fn join(&self, other: &Partition) -> Result<Self> {
        if self.modulus() != other.modulus() {
            return Err(GtError::ModulusMismatch {
                left: self.modulus(),
                right: other.modulus(),
            });
        }
        Ok(Self::from_keys(self.labels.iter().zip(&other.labels)))
    }

    pub fn modulus(&self) -> usize {
        self.labels.len()
    }

    pub fn atom_count(&self) -> usize {
        self.atoms
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn atom_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.atoms];
        for &l in &self.labels {
            sizes[l as usize] += 1;
        }
        sizes
    }

    /// Per-atom sums of `f`.
    pub fn atom_sums(&self, f: &GridFunction) -> Result<Vec<f64>> {
        if f.modulus() != self.modulus() {
            return Err(GtError::ModulusMismatch {
                left: f.modulus(),
                right: self.modulus(),
            });
        }
        let mut sums = vec![0.0; self.atoms];
        for (&l, v) in self.labels.iter().zip(f.values()) {
            sums[l as usize] += v;
        }
        Ok(sums)
    }

    /// Whether `f` is constant on every atom.
    pub fn measures(&self, f: &GridFunction) -> bool {
        let mut first: Vec<Option<f64>> = vec![None; self.atoms];
        self.labels.iter().zip(f.values()).all(|(&l, &v)| {
            let slot = &mut first[l as usize];
            match slot {
                None => {
                    *slot = Some(v);
                    true
                }
                Some(u) => u.to_bits() == v.to_bits(),
            }
        })
    }

    /// Whether every atom of `self` lies inside an atom of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        self.modulus() == coarser.modulus()
            && self.join(coarser).map(|j| j.atoms == self.atoms).unwrap_or(false)
    }
}

/// `E(f|B)`: each point gets the average of f over its atom.
///
/// Averages are taken relative to the first value seen in each atom, so an
/// atom on which f is constant gets exactly that constant back.
pub fn conditional_expectation(f: &GridFunction, b: &Partition) -> Result<GridFunction> {
    if f.modulus() != b.modulus() {
        return Err(GtError::ModulusMismatch {
            left: f.modulus(),
            right: b.modulus(),
        });
    }
    let mut pivot: Vec<Option<f64>> = vec![None; b.atoms];
    let mut shifted = vec![0.0; b.atoms];
    for (&l, &v) in b.labels.iter().zip(f.values()) {
        let p = *pivot[l as usize].get_or_insert(v);
        shifted[l as usize] += v - p;
    }
    let sizes = b.atom_sizes();
    let means = pivot
        .iter()
        .zip(&shifted)
        .zip(&sizes)
        .enumerate()
        .map(|(i, ((p, s), &c))| match p {
            Some(p) => Ok(p + s / c as f64),
            None => Err(GtError::Internal(format!("atom {i} is empty"))),
        })
        .collect::<Result<Vec<f64>>>()?;
    GridFunction::new(b.labels.iter().map(|&l| means[l as usize]).collect())
}
