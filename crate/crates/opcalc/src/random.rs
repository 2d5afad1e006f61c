//! Seeded random symmetric sequences for randomized checks.
//!
//! Components are direct sums of small cells: a representation placed in one degree
//! (zero differential) or two copies joined by an isomorphism (an acyclic pair). The
//! representations used are the trivial, the sign and the permutation representation.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

use crate::chaincore::{BasisElem, ChainComplex, Field, SparseMatrix};
use crate::symseq::perm;
use crate::symseq::{EquivariantComplex, SymSeq};

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug)]
enum Rep {
    Trivial,
    Sign,
    Perm,
}

fn rep_dim(r: Rep, n: usize) -> usize {
    match r {
        Rep::Perm => n,
        _ => 1,
    }
}

/// Matrix of s_i on a representation.
fn rep_gen(field: Field, r: Rep, n: usize, i: usize) -> SparseMatrix {
    match r {
        Rep::Trivial => SparseMatrix::identity(field, 1),
        Rep::Sign => SparseMatrix::identity(field, 1).scale(&field.int(-1)),
        Rep::Perm => {
            let t = perm::transposition(n, i);
            SparseMatrix::from_triplets(field, n, n, (0..n).map(|a| (t[a], a, field.one())))
        }
    }
}

/// Cells: (representation, degree, acyclic pair?).
type Cell = (Rep, i32, bool);

fn assemble(field: Field, n: usize, cells: &[Cell], tag: &str) -> EquivariantComplex {
    let mut basis = Vec::new();
    let mut trip = Vec::new();
    let mut blocks: Vec<(Rep, usize)> = Vec::new();
    for (c, &(r, q, pair)) in cells.iter().enumerate() {
        let m = rep_dim(r, n);
        let start = basis.len();
        for a in 0..m {
            basis.push(BasisElem::new(format!("{tag}{c}.{a}"), q));
        }
        blocks.push((r, start));
        if pair {
            for a in 0..m {
                basis.push(BasisElem::new(format!("{tag}{c}.{a}'"), q - 1));
                trip.push((start + m + a, start + a, field.one()));
            }
            blocks.push((r, start + m));
        }
    }
    let dim = basis.len();
    let d = SparseMatrix::from_triplets(field, dim, dim, trip);
    let complex = ChainComplex::new(field, basis, d).expect("random complex");
    let gens = (1..n)
        .map(|i| {
            let mut t = Vec::new();
            for &(r, start) in &blocks {
                for (a, b, x) in rep_gen(field, r, n, i).triplets() {
                    t.push((start + a, start + b, x.clone()));
                }
            }
            SparseMatrix::from_triplets(field, dim, dim, t)
        })
        .collect();
    EquivariantComplex::new_unchecked(n, Arc::new(complex), gens)
}

fn random_cells(rng: &mut Rng8, n: usize, max_cells: usize, degrees: (i32, i32), acyclic: bool) -> Vec<Cell> {
    let k = rng.gen_range(0..=max_cells);
    (0..k)
        .map(|_| {
            let r = match rng.gen_range(0..3) {
                0 => Rep::Trivial,
                1 if n >= 2 => Rep::Sign,
                2 if n >= 2 => Rep::Perm,
                _ => Rep::Trivial,
            };
            (r, rng.gen_range(degrees.0..=degrees.1), acyclic && rng.gen_bool(0.3))
        })
        .collect()
}

/// A random sequence; arity 1 may be forced to vanish.
pub fn random_seq(rng: &mut Rng8, field: Field, nmax: usize, max_cells: usize, reduced: bool) -> SymSeq {
    let comps: Vec<Arc<EquivariantComplex>> = (1..=nmax)
        .map(|n| {
            let cells = if reduced && n == 1 { vec![] } else { random_cells(rng, n, max_cells, (-1, 1), true) };
            Arc::new(assemble(field, n, &cells, "a"))
        })
        .collect();
    SymSeq::new(field, nmax, comps).expect("random sequence")
}

/// A random sequence without differential whose cells are representations of small dimension.
pub fn random_graded_seq(rng: &mut Rng8, field: Field, nmax: usize, max_cells: usize, reduced: bool) -> SymSeq {
    let comps: Vec<Arc<EquivariantComplex>> = (1..=nmax)
        .map(|n| {
            let cells = if reduced && n == 1 { vec![] } else { random_cells(rng, n, max_cells, (0, 1), false) };
            Arc::new(assemble(field, n, &cells, "g"))
        })
        .collect();
    SymSeq::new(field, nmax, comps).expect("random sequence")
}

/// An acyclic equivariant complex of arity n built from pairs.
pub fn random_acyclic(rng: &mut Rng8, field: Field, n: usize, max_cells: usize) -> EquivariantComplex {
    let mut cells = random_cells(rng, n, max_cells, (-1, 1), true);
    for c in cells.iter_mut() {
        c.2 = true;
    }
    if cells.is_empty() {
        cells.push((Rep::Trivial, 0, true));
    }
    assemble(field, n, &cells, "e")
}

/// A sequence with an acyclic component in every arity.
pub fn random_acyclic_seq(rng: &mut Rng8, field: Field, nmax: usize, max_cells: usize) -> SymSeq {
    let comps = (1..=nmax).map(|n| Arc::new(random_acyclic(rng, field, n, max_cells))).collect();
    SymSeq::new(field, nmax, comps).expect("random sequence")
}
