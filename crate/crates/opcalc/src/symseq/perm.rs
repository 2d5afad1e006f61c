//! Permutations of {0..n−1} stored as image vectors.

pub type Perm = Vec<usize>;

pub fn identity(n: usize) -> Perm {
    (0..n).collect()
}

/// (a∘b)(i) = a(b(i)).
pub fn compose(a: &[usize], b: &[usize]) -> Perm {
    b.iter().map(|&i| a[i]).collect()
}

pub fn inverse(a: &[usize]) -> Perm {
    let mut inv = vec![0; a.len()];
    for (i, &j) in a.iter().enumerate() {
        inv[j] = i;
    }
    inv
}

/// Adjacent transposition s_i (1-based) swapping i−1 and i.
pub fn transposition(n: usize, i: usize) -> Perm {
    let mut p = identity(n);
    p.swap(i - 1, i);
    p
}

/// Word i₁…i_m with σ = s_{i₁}∘…∘s_{i_m}, of minimal length.
pub fn reduced_word(sigma: &[usize]) -> Vec<usize> {
    let mut word = Vec::new();
    let mut cur = sigma.to_vec();
    loop {
        // left descent: σ⁻¹(i) > σ⁻¹(i+1)
        let inv = inverse(&cur);
        match (0..cur.len().saturating_sub(1)).find(|&i| inv[i] > inv[i + 1]) {
            None => break,
            Some(i) => {
                word.push(i + 1);
                cur = compose(&transposition(cur.len(), i + 1), &cur);
            }
        }
    }
    word
}

/// Parity of the Koszul sign for reordering factors: position k of the new
/// order holds old factor `order[k]`.
pub fn koszul_odd(degrees: &[i32], order: &[usize]) -> bool {
    let mut odd = false;
    for a in 0..order.len() {
        if degrees[order[a]].rem_euclid(2) == 0 {
            continue;
        }
        for b in a + 1..order.len() {
            if order[b] < order[a] && degrees[order[b]].rem_euclid(2) == 1 {
                odd = !odd;
            }
        }
    }
    odd
}

/// All permutations of {0..n−1} in lexicographic order.
pub fn all(n: usize) -> Vec<Perm> {
    let mut out = Vec::new();
    let mut p = identity(n);
    loop {
        out.push(p.clone());
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1]) else { break };
        let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).unwrap();
        p.swap(i, j);
        p[i + 1..].reverse();
    }
    out
}

/// Sign of a permutation.
pub fn is_odd(p: &[usize]) -> bool {
    koszul_odd(&vec![1; p.len()], p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduced_words_rebuild_the_permutation() {
        for n in 1..=5 {
            for p in all(n) {
                let w = reduced_word(&p);
                let mut q = identity(n);
                for &i in &w {
                    q = compose(&q, &transposition(n, i));
                }
                assert_eq!(q, p);
                assert_eq!(w.len() % 2 == 1, is_odd(&p));
            }
        }
        assert_eq!(all(4).len(), 24);
    }

    #[test]
    fn koszul_signs() {
        assert!(koszul_odd(&[1, 1], &[1, 0]));
        assert!(!koszul_odd(&[1, 2], &[1, 0]));
        assert!(!koszul_odd(&[1, 1, 1], &[0, 1, 2]));
        assert!(!koszul_odd(&[1, 1, 1], &[1, 2, 0]));
    }
}
