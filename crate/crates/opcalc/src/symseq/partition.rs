//! Set partitions as sorted lists of bitmask blocks.

use super::perm::Perm;

/// Blocks as bitmasks, sorted by minimal element.
pub type Partition = Vec<u32>;

pub fn full(n: usize) -> u32 {
    if n == 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

pub fn min_elt(mask: u32) -> u32 {
    mask.trailing_zeros()
}

pub fn size(mask: u32) -> usize {
    mask.count_ones() as usize
}

pub fn elements(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |i| mask >> i & 1 == 1)
}

pub fn canonical(mut blocks: Vec<u32>) -> Partition {
    blocks.sort_by_key(|b| min_elt(*b));
    blocks
}

/// All partitions of the elements of `mask`, in lexicographic order of restricted-growth strings.
pub fn set_partitions(mask: u32) -> Vec<Partition> {
    let elts: Vec<usize> = elements(mask).collect();
    let mut out = Vec::new();
    let mut rgs = vec![0usize; elts.len()];
    fn rec(k: usize, maxb: usize, elts: &[usize], rgs: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if k == elts.len() {
            let nb = if elts.is_empty() { 0 } else { maxb + 1 };
            let mut blocks = vec![0u32; nb];
            for (i, &b) in rgs.iter().enumerate() {
                blocks[b] |= 1 << elts[i];
            }
            out.push(blocks);
            return;
        }
        for b in 0..=maxb + 1 {
            if k == 0 && b > 0 {
                break;
            }
            rgs[k] = b;
            rec(k + 1, if k == 0 { 0 } else { maxb.max(b) }, elts, rgs, out);
        }
    }
    if elts.is_empty() {
        return vec![vec![]];
    }
    rec(0, 0, &elts, &mut rgs, &mut out);
    out
}

pub fn all_partitions(n: usize) -> Vec<Partition> {
    set_partitions(full(n))
}

pub fn discrete(n: usize) -> Partition {
    (0..n).map(|i| 1u32 << i).collect()
}

pub fn top(n: usize) -> Partition {
    vec![full(n)]
}

/// Every block of `fine` lies inside a block of `coarse`.
pub fn refines(fine: &[u32], coarse: &[u32]) -> bool {
    fine.iter().all(|f| coarse.iter().any(|c| f & c == *f))
}

/// Blocks of `fine` inside `block`, in order.
pub fn children(block: u32, fine: &[u32]) -> Vec<u32> {
    fine.iter().copied().filter(|f| f & block == *f).collect()
}

/// Position of the block containing element `x`.
pub fn block_of(x: usize, p: &[u32]) -> usize {
    p.iter().position(|b| b >> x & 1 == 1).expect("element not covered")
}

/// All refinements of a partition, obtained by partitioning each block.
pub fn refinements(p: &[u32]) -> Vec<Partition> {
    let mut acc: Vec<Vec<u32>> = vec![vec![]];
    for b in p {
        let subs = set_partitions(*b);
        let mut next = Vec::with_capacity(acc.len() * subs.len());
        for a in &acc {
            for s in &subs {
                let mut v = a.clone();
                v.extend_from_slice(s);
                next.push(v);
            }
        }
        acc = next;
    }
    acc.into_iter().map(canonical).collect()
}

pub fn apply_perm(sigma: &[usize], mask: u32) -> u32 {
    elements(mask).fold(0, |m, i| m | 1 << sigma[i])
}

/// Image of a partition under σ, re-sorted, together with the block permutation π
/// (π(i) = new position of old block i).
pub fn permute_partition(sigma: &[usize], p: &[u32]) -> (Partition, Perm) {
    let imgs: Vec<u32> = p.iter().map(|b| apply_perm(sigma, *b)).collect();
    let q = canonical(imgs.clone());
    let pi = imgs.iter().map(|m| q.iter().position(|x| x == m).unwrap()).collect();
    (q, pi)
}

/// Order-relabelling of σ restricted to a set of items: item j (in order) goes to
/// the position of its image among the sorted images.
pub fn relabel(items: &[u32], sigma: &[usize]) -> Perm {
    let imgs: Vec<u32> = items.iter().map(|b| apply_perm(sigma, *b)).collect();
    let mut sorted = imgs.clone();
    sorted.sort_by_key(|b| min_elt(*b));
    imgs.iter().map(|m| sorted.iter().position(|x| x == m).unwrap()).collect()
}

/// Consecutive standard blocks of the given sizes.
pub fn std_blocks(sizes: &[usize]) -> Partition {
    let mut out = Vec::with_capacity(sizes.len());
    let mut start = 0;
    for &s in sizes {
        out.push(full(s) << start);
        start += s;
    }
    out
}

/// The permutation sending the standard consecutive blocks of λ's sizes onto λ's blocks, order-preservingly.
pub fn unshuffle(p: &[u32]) -> Perm {
    let n: usize = p.iter().map(|b| size(*b)).sum();
    let mut sigma = Vec::with_capacity(n);
    for b in p {
        sigma.extend(elements(*b));
    }
    sigma
}

/// Partition of {0..k−1} (positions in `items`) induced by grouping items inside the blocks of `coarse`.
pub fn grouping(items: &[u32], coarse: &[u32]) -> Partition {
    let groups = coarse
        .iter()
        .map(|c| items.iter().enumerate().filter(|(_, f)| *f & c == **f).fold(0u32, |m, (i, _)| m | 1 << i))
        .collect();
    canonical(groups)
}

pub fn fmt_partition(p: &[u32]) -> String {
    p.iter()
        .map(|b| {
            let s: Vec<String> = elements(*b).map(|i| (i + 1).to_string()).collect();
            format!("{{{}}}", s.join(""))
        })
        .collect::<Vec<_>>()
        .join("")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_numbers() {
        let counts: Vec<usize> = (1..=6).map(|n| all_partitions(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 5, 15, 52, 203]);
    }

    #[test]
    fn rgs_order() {
        let ps = all_partitions(3);
        let shown: Vec<String> = ps.iter().map(|p| fmt_partition(p)).collect();
        assert_eq!(shown, vec!["{123}", "{12}{3}", "{13}{2}", "{1}{23}", "{1}{2}{3}"]);
    }

    #[test]
    fn permuting_partitions() {
        let p = vec![0b011, 0b100];
        let (q, pi) = permute_partition(&[2, 1, 0], &p);
        assert_eq!(q, vec![0b001, 0b110]);
        assert_eq!(pi, vec![1, 0]);
        assert_eq!(relabel(&[0b001, 0b010], &[1, 0, 2]), vec![1, 0]);
    }

    #[test]
    fn unshuffles_and_groupings() {
        let p = vec![0b101, 0b010];
        assert_eq!(unshuffle(&p), vec![0, 2, 1]);
        assert_eq!(std_blocks(&[2, 1]), vec![0b011, 0b100]);
        assert_eq!(grouping(&[0b001, 0b010, 0b100], &p), vec![0b101, 0b010]);
        assert_eq!(refinements(&[0b011, 0b100]).len(), 2);
    }
}
