//! Brute-force reference computations that share no code with the composite or bar
//! machinery: set-partition enumeration and the order complex of the partition lattice.

use std::collections::{BTreeMap, HashMap};

use crate::chaincore::matrix::normalize;
use crate::chaincore::{BasisElem, ChainComplex, Field, SparseMatrix};

/// Set partitions of {0..n−1} as restricted growth strings.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = vec![];
    let mut stack = vec![vec![0usize]];
    while let Some(v) = stack.pop() {
        if v.len() == n {
            out.push(v);
            continue;
        }
        let m = *v.iter().max().unwrap();
        for b in 0..=m + 1 {
            let mut w = v.clone();
            w.push(b);
            stack.push(w);
        }
    }
    out.sort();
    out
}

pub fn bell(n: usize) -> usize {
    set_partitions(n).len()
}

fn block_sizes(p: &[usize]) -> Vec<usize> {
    let k = p.iter().max().map_or(0, |m| m + 1);
    (0..k).map(|b| p.iter().filter(|&&x| x == b).count()).collect()
}

/// χₙ(A∘B) as a sum over set partitions of n, from per-arity Euler characteristics.
pub fn composite_euler(ca: &[i64], cb: &[i64], n: usize) -> i64 {
    let at = |c: &[i64], k: usize| c.get(k.wrapping_sub(1)).copied().unwrap_or(0);
    set_partitions(n)
        .iter()
        .map(|p| {
            let sizes = block_sizes(p);
            at(ca, sizes.len()) * sizes.iter().map(|s| at(cb, *s)).product::<i64>()
        })
        .sum()
}

/// Reduced homology of the order complex of the proper part of Πₙ (augmented, so
/// the empty chain sits in degree −1).
pub fn partition_lattice_homology(n: usize, field: Field) -> BTreeMap<i32, usize> {
    let proper: Vec<Vec<usize>> = set_partitions(n).into_iter().filter(|p| {
        let k = block_sizes(p).len();
        k != 1 && k != n
    }).collect();
    // p ≤ q when every block of p lies inside a block of q
    let finer = |p: &[usize], q: &[usize]| p != q && (0..n).all(|i| (0..n).all(|j| p[i] != p[j] || q[i] == q[j]));
    let mut simplices: Vec<Vec<usize>> = vec![vec![]];
    let mut frontier: Vec<Vec<usize>> = vec![vec![]];
    while !frontier.is_empty() {
        let mut next = vec![];
        for c in &frontier {
            for x in 0..proper.len() {
                if c.last().map_or(true, |&l| finer(&proper[l], &proper[x])) {
                    let mut d = c.clone();
                    d.push(x);
                    next.push(d);
                }
            }
        }
        simplices.extend(next.iter().cloned());
        frontier = next;
    }
    let index: HashMap<&Vec<usize>, usize> = simplices.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let cols = simplices
        .iter()
        .map(|s| {
            normalize(
                (0..s.len())
                    .map(|i| {
                        let mut t = s.clone();
                        t.remove(i);
                        (index[&t], field.sign(i % 2 == 1))
                    })
                    .collect(),
            )
        })
        .collect();
    let basis = simplices.iter().map(|s| BasisElem::new(format!("{s:?}"), s.len() as i32 - 1)).collect();
    ChainComplex::new(field, basis, SparseMatrix::from_cols(field, simplices.len(), cols)).expect("order complex").homology()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_numbers() {
        assert_eq!((1..=6).map(bell).collect::<Vec<_>>(), vec![1, 2, 5, 15, 52, 203]);
    }

    #[test]
    fn partition_lattice() {
        let fact = |n: usize| (1..=n).product::<usize>();
        for n in 2..=5 {
            assert_eq!(partition_lattice_homology(n, Field::Q), [(n as i32 - 3, fact(n - 1))].into());
        }
    }

    #[test]
    fn composite_of_com_with_itself() {
        assert_eq!(composite_euler(&[1; 4], &[1; 4], 4), 15);
        assert_eq!(composite_euler(&[1, 0, 0], &[2, 3, 4], 3), 4);
    }
}
