//! Persistence barcodes by boundary-matrix reduction over GF(2).
//!
//! Columns are processed from the highest dimension down, and every column
//! whose simplex becomes a pivot row is cleared without reduction (the
//! "twist"): a simplex that kills is never itself a creator, and a creator
//! that gets killed always reduces to zero.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::witness::{FilteredSimplex, WitnessFiltration};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PersistenceInterval {
    pub dim: usize,
    pub birth: f64,
    /// `f64::INFINITY` for classes alive at the end of the filtration.
    pub death: f64,
}

impl PersistenceInterval {
    pub fn is_infinite(&self) -> bool {
        self.death.is_infinite()
    }

    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Barcode {
    pub intervals: Vec<PersistenceInterval>,
    pub alpha_max: f64,
}

impl Barcode {
    pub fn in_dim(&self, dim: usize) -> impl Iterator<Item = &PersistenceInterval> {
        self.intervals.iter().filter(move |i| i.dim == dim)
    }

    pub fn intervals_in_dim(&self, dim: usize) -> Vec<PersistenceInterval> {
        self.in_dim(dim).copied().collect()
    }
}

const NONE: u32 = u32::MAX;

enum EdgeLookup {
    Dense { n: usize, slots: Vec<u32> },
    Sparse(HashMap<(u32, u32), u32>),
}

impl EdgeLookup {
    fn new(n: usize) -> Self {
        if n <= 4096 {
            EdgeLookup::Dense {
                n,
                slots: vec![NONE; n * n],
            }
        } else {
            EdgeLookup::Sparse(HashMap::new())
        }
    }

    fn insert(&mut self, a: u32, b: u32, idx: u32) {
        match self {
            EdgeLookup::Dense { n, slots } => slots[a as usize * *n + b as usize] = idx,
            EdgeLookup::Sparse(m) => {
                m.insert((a, b), idx);
            }
        }
    }

    fn get(&self, a: u32, b: u32) -> u32 {
        match self {
            EdgeLookup::Dense { n, slots } => slots[a as usize * *n + b as usize],
            EdgeLookup::Sparse(m) => m.get(&(a, b)).copied().unwrap_or(NONE),
        }
    }
}

/// Barcode of `filtration` in dimensions `0..=max_hom_dim` (at most 1).
///
/// Simplices are ordered by appearance, then dimension, then vertices. A
/// column that reduces to pivot row `τ` turns `τ` into the interval
/// `[f(τ), f(σ))`; creators never paired become `[f(τ), +∞)`.
pub fn compute_persistence(filtration: &WitnessFiltration, max_hom_dim: usize) -> Result<Barcode> {
    if max_hom_dim > 1 {
        return Err(Error::param(format!(
            "homology is computed in dimensions 0 and 1 only, got max_hom_dim = {max_hom_dim}"
        )));
    }
    let simplices: Vec<&FilteredSimplex> = filtration
        .simplices()
        .iter()
        .filter(|s| s.dim() <= max_hom_dim + 1)
        .collect();
    let boundary = boundary_columns(&simplices, filtration.n_landmarks())?;

    let n = simplices.len();
    let mut columns = boundary;
    let mut pivot_of_row = vec![NONE; n];
    let mut killer = vec![false; n];
    let mut scratch: Vec<u32> = Vec::new();

    for dim in (1..=max_hom_dim + 1).rev() {
        for j in 0..n {
            if simplices[j].dim() != dim || columns[j].is_empty() {
                continue;
            }
            let mut col = std::mem::take(&mut columns[j]);
            while let Some(&low) = col.last() {
                let k = pivot_of_row[low as usize];
                if k == NONE {
                    pivot_of_row[low as usize] = j as u32;
                    killer[j] = true;
                    // twist: the pivot row's own column is known to vanish
                    columns[low as usize].clear();
                    break;
                }
                symmetric_difference(&col, &columns[k as usize], &mut scratch);
                std::mem::swap(&mut col, &mut scratch);
            }
            columns[j] = col;
        }
    }

    let mut intervals = Vec::new();
    for (i, s) in simplices.iter().enumerate() {
        if s.dim() > max_hom_dim || killer[i] {
            continue;
        }
        let death = match pivot_of_row[i] {
            NONE => f64::INFINITY,
            j => simplices[j as usize].appearance,
        };
        intervals.push(PersistenceInterval {
            dim: s.dim(),
            birth: s.appearance,
            death,
        });
    }
    intervals.sort_by(|a, b| {
        a.dim
            .cmp(&b.dim)
            .then(a.birth.total_cmp(&b.birth))
            .then(a.death.total_cmp(&b.death))
    });
    Ok(Barcode {
        intervals,
        alpha_max: filtration.alpha_max(),
    })
}

/// Sparse boundary columns (sorted row indices) in filtration order,
/// checking order, face presence and monotonicity along the way.
fn boundary_columns(simplices: &[&FilteredSimplex], n_landmarks: usize) -> Result<Vec<Vec<u32>>> {
    let mut vertex_pos = vec![NONE; n_landmarks];
    let mut edge_pos = EdgeLookup::new(n_landmarks);
    let mut columns = Vec::with_capacity(simplices.len());

    for (i, s) in simplices.iter().enumerate() {
        if i > 0 && simplices[i - 1].filtration_cmp(s) != std::cmp::Ordering::Less {
            return Err(Error::Internal(format!(
                "filtration not strictly ordered at {:?}",
                s.simplex
            )));
        }
        let v = s.simplex.vertices();
        if v.iter().any(|&x| x as usize >= n_landmarks) {
            return Err(Error::Internal(format!(
                "{:?} references a vertex beyond {n_landmarks} landmarks",
                s.simplex
            )));
        }
        let mut col: Vec<u32> = match *v {
            [a] => {
                vertex_pos[a as usize] = i as u32;
                Vec::new()
            }
            [a, b] => {
                edge_pos.insert(a, b, i as u32);
                vec![vertex_pos[a as usize], vertex_pos[b as usize]]
            }
            [a, b, c] => vec![edge_pos.get(a, b), edge_pos.get(a, c), edge_pos.get(b, c)],
            _ => unreachable!(),
        };
        for &face in &col {
            if face == NONE {
                return Err(Error::Internal(format!(
                    "{:?} appears before one of its faces",
                    s.simplex
                )));
            }
            if simplices[face as usize].appearance > s.appearance {
                return Err(Error::Internal(format!(
                    "{:?} is not monotone in its faces",
                    s.simplex
                )));
            }
        }
        col.sort_unstable();
        columns.push(col);
    }
    Ok(columns)
}

/// `out = a △ b` for sorted index lists.
fn symmetric_difference(a: &[u32], b: &[u32], out: &mut Vec<u32>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}
