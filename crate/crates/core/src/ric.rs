//! Restricted invertibility at desk scale: the block operator `A = ⊕_N T_N`,
//! where `T_N` acts on the first `N` kernels of a fixed section, and an
//! exhaustive search for the partition of `{1..J}` whose worst part is best.
//!
//! Basis vector `j` is the `m`-th kernel of block `N`, enumerated
//! `(1,1), (2,1), (2,2), (3,1), …`.

use rayon::prelude::*;

use crate::error::{Error, Result, domain};
use crate::linalg::{CMatrix, pencil_extremes};
use crate::model_op::{KernelSection, section_spectrum};
use crate::scalar::Real;

/// Largest number of assignments an exhaustive search may visit.
pub const SEARCH_BUDGET: f64 = 1e8;

/// `j ↦ (N, m)` with `N = ⌊√(2j) + 1/2⌋`, `m = j - N(N-1)/2`.
pub fn enumerate_index(j: u64) -> Result<(u64, u64)> {
    if j == 0 {
        return Err(domain("indices start at 1"));
    }
    let mut n = ((2.0 * j as f64).sqrt() + 0.5).floor() as u64;
    // settle rounding so that N(N-1)/2 < j ≤ N(N+1)/2
    while n * (n - 1) / 2 >= j {
        n -= 1;
    }
    while n * (n + 1) / 2 < j {
        n += 1;
    }
    Ok((n, j - n * (n - 1) / 2))
}

/// Inverse of [`enumerate_index`].
pub fn index_of(n: u64, m: u64) -> Result<u64> {
    if !(1..=n).contains(&m) {
        return Err(domain(format!("need 1 ≤ m ≤ N, got N = {n}, m = {m}")));
    }
    Ok(n * (n - 1) / 2 + m)
}

/// `A = ⊕_{N ≤ n_max} T_N`, block `N` being the first `N` kernels of `base`.
#[derive(Clone, Debug)]
pub struct BlockOperator<T> {
    base: KernelSection<T>,
    n_max: usize,
}

impl<T: Real> BlockOperator<T> {
    pub fn new(base: KernelSection<T>, n_max: usize) -> Result<Self> {
        if n_max == 0 || n_max > base.len() {
            return Err(domain(format!("block count {n_max} must lie in 1..={}", base.len())));
        }
        Ok(Self { base, n_max })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn total_dim(&self) -> usize {
        self.n_max * (self.n_max + 1) / 2
    }

    pub fn block(&self, n: usize) -> KernelSection<T> {
        self.base.prefix(n)
    }

    pub fn blocks(&self) -> Vec<KernelSection<T>> {
        (1..=self.n_max).map(|n| self.block(n)).collect()
    }

    /// Sub-section of block `n` on the kernels `ms` (1-based, each ≤ `n`).
    fn sub_block(&self, n: usize, ms: &[usize]) -> KernelSection<T> {
        debug_assert!(ms.iter().all(|&m| 1 <= m && m <= n));
        self.base.restrict(&ms.iter().map(|m| m - 1).collect::<Vec<_>>())
    }
}

/// Assignment of basis indices `1..=J` to parts `1..=r`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Partition {
    /// `parts[j-1]` is the part (1-based) of index `j`.
    parts: Vec<usize>,
    r: usize,
}

impl Partition {
    pub fn new(parts: Vec<usize>, r: usize) -> Result<Self> {
        if r == 0 {
            return Err(domain("need at least one part"));
        }
        if let Some(&bad) = parts.iter().find(|&&s| s == 0 || s > r) {
            return Err(domain(format!("part {bad} outside 1..={r}")));
        }
        Ok(Self { parts, r })
    }

    pub fn trivial(len: usize) -> Self {
        Self {
            parts: vec![1; len],
            r: 1,
        }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Indices `j` in part `s`, grouped by block: `(N, [m…])`.
    fn blocks_of(&self, s: usize) -> Vec<(usize, Vec<usize>)> {
        let mut out: Vec<(usize, Vec<usize>)> = Vec::new();
        for (i, &p) in self.parts.iter().enumerate() {
            if p != s {
                continue;
            }
            let (n, m) = enumerate_index(i as u64 + 1).expect("positive index");
            let (n, m) = (n as usize, m as usize);
            match out.last_mut() {
                Some((bn, ms)) if *bn == n => ms.push(m),
                _ => out.push((n, vec![m])),
            }
        }
        out
    }
}

fn check_partition<T: Real>(a: &BlockOperator<T>, p: &Partition) -> Result<()> {
    if p.len() > a.total_dim() {
        return Err(domain(format!(
            "partition covers {} indices, operator has {}",
            p.len(),
            a.total_dim()
        )));
    }
    Ok(())
}

/// `inf ‖Ax‖/‖x‖` over `x` supported on part `s`, computed block by block;
/// `+∞` when the part is empty.
pub fn restricted_sigma_min<T: Real>(a: &BlockOperator<T>, p: &Partition, s: usize) -> Result<T> {
    check_partition(a, p)?;
    let mut best = T::infinity();
    for (n, ms) in p.blocks_of(s) {
        let sub = a.sub_block(n, &ms);
        best = best.min(section_spectrum(&sub)?.sigma_min);
    }
    Ok(best)
}

/// The same quantity from the assembled block-diagonal pencil.
pub fn dense_restricted_sigma_min<T: Real>(a: &BlockOperator<T>, p: &Partition, s: usize) -> Result<T> {
    check_partition(a, p)?;
    let groups = p.blocks_of(s);
    let dim: usize = groups.iter().map(|(_, ms)| ms.len()).sum();
    if dim == 0 {
        return Ok(T::infinity());
    }
    let mut g = CMatrix::zeros(dim);
    let mut d = Vec::with_capacity(dim);
    let mut off = 0;
    for (n, ms) in &groups {
        let sub = a.sub_block(*n, ms);
        for i in 0..ms.len() {
            for j in 0..ms.len() {
                g[(off + i, off + j)] = sub.gram()[(i, j)];
            }
        }
        d.extend_from_slice(sub.targets());
        off += ms.len();
    }
    Ok(pencil_extremes(&g, &d)?.sigma_min)
}

/// Result of an exhaustive partition search.
#[derive(Clone, Debug, PartialEq)]
pub struct BestPartition<T> {
    pub partition: Partition,
    /// `min_s restricted_sigma_min` of the best partition.
    pub value: T,
    /// Number of assignments visited (index 1 fixed in part 1).
    pub partitions_searched: u64,
}

/// `σ_min` of every non-empty subset of each block's kernels within `1..=J`.
struct SubsetTable<T> {
    /// `(N, offset of the block's first index)` per block.
    blocks: Vec<(usize, usize, usize)>,
    values: Vec<Vec<T>>,
}

impl<T: Real> SubsetTable<T> {
    fn new(a: &BlockOperator<T>, j_max: usize) -> Result<Self> {
        let mut blocks = Vec::new();
        let mut n = 1;
        while n * (n - 1) / 2 < j_max {
            let start = n * (n - 1) / 2;
            let avail = (j_max - start).min(n);
            blocks.push((n, start, avail));
            n += 1;
        }
        let values = blocks
            .par_iter()
            .map(|&(n, _, avail)| {
                let mut v = vec![T::infinity(); 1 << avail];
                for (mask, slot) in v.iter_mut().enumerate().skip(1) {
                    let ms: Vec<usize> = (0..avail).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect();
                    *slot = section_spectrum(&a.sub_block(n, &ms))?.sigma_min;
                }
                Ok(v)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { blocks, values })
    }

    fn value(&self, parts: &[usize], r: usize, masks: &mut [usize]) -> T {
        let mut worst = T::infinity();
        for (b, &(_, start, avail)) in self.blocks.iter().enumerate() {
            masks[..r].iter_mut().for_each(|m| *m = 0);
            for i in 0..avail {
                masks[parts[start + i]] |= 1 << i;
            }
            for &m in &masks[..r] {
                if m != 0 {
                    worst = worst.min(self.values[b][m]);
                }
            }
        }
        worst
    }
}

/// Exhaustive search over all assignments of `1..=j_max` to `r` parts (index
/// 1 in part 1) maximising the smallest restricted `σ_min`; ties go to the
/// lexicographically smallest assignment.
pub fn best_partition<T: Real>(a: &BlockOperator<T>, r: usize, j_max: usize) -> Result<BestPartition<T>> {
    if r == 0 || j_max == 0 {
        return Err(domain("need r ≥ 1 and J ≥ 1"));
    }
    if j_max > a.total_dim() {
        return Err(domain(format!(
            "J = {j_max} exceeds the {} materialised indices",
            a.total_dim()
        )));
    }
    if (r as f64).powi(j_max as i32) > SEARCH_BUDGET {
        return Err(Error::Budget(format!(
            "{r}^{j_max} assignments exceed the exhaustive budget of {SEARCH_BUDGET:e}; reduce J or r, or sample partitions"
        )));
    }
    let table = SubsetTable::new(a, j_max)?;
    let free = j_max - 1;
    // split the free digits into a parallel prefix and a sequential suffix
    let mut prefix_len = 0;
    while prefix_len < free && r.pow(prefix_len as u32) < 256 {
        prefix_len += 1;
    }
    let n_prefix = r.pow(prefix_len as u32);
    let chunk_best: Vec<(T, Vec<usize>)> = (0..n_prefix)
        .into_par_iter()
        .map(|pre| {
            let mut parts = vec![0usize; j_max];
            let mut x = pre;
            for i in (0..prefix_len).rev() {
                parts[1 + i] = x % r;
                x /= r;
            }
            let mut masks = vec![0usize; r];
            let mut best: (T, Vec<usize>) = (T::neg_infinity(), Vec::new());
            loop {
                let v = table.value(&parts, r, &mut masks);
                if v > best.0 {
                    best = (v, parts.clone());
                }
                // odometer over the suffix digits, last digit fastest
                let mut i = j_max;
                loop {
                    if i == 1 + prefix_len {
                        return best;
                    }
                    i -= 1;
                    parts[i] += 1;
                    if parts[i] < r {
                        break;
                    }
                    parts[i] = 0;
                }
            }
        })
        .collect();
    let mut best = chunk_best[0].clone();
    for c in &chunk_best[1..] {
        if c.0 > best.0 {
            best = c.clone();
        }
    }
    let partition = Partition::new(best.1.iter().map(|p| p + 1).collect(), r)?;
    Ok(BestPartition {
        partition,
        value: best.0,
        partitions_searched: (r as u64).pow(free as u32),
    })
}

/// One row of a decay table.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayRow<T> {
    pub r: usize,
    pub j: usize,
    pub best_value: T,
    pub partitions_searched: u64,
}

pub fn decay_table<T: Real>(a: &BlockOperator<T>, r: usize, j_list: &[usize]) -> Result<Vec<DecayRow<T>>> {
    j_list
        .iter()
        .map(|&j| {
            let b = best_partition(a, r, j)?;
            Ok(DecayRow {
                r,
                j,
                best_value: b.value,
                partitions_searched: b.partitions_searched,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::model_op::build_section;
    use num_complex::Complex;

    fn base(targets: &[Complex<f64>]) -> KernelSection<f64> {
        let zs: Vec<Point<f64>> = (0..targets.len())
            .map(|i| Point::half_plane(0.7 * i as f64 - 1.0, 0.5 + 0.3 * i as f64).unwrap())
            .collect();
        build_section(&zs, targets).unwrap()
    }

    #[test]
    fn index_examples() {
        assert_eq!(enumerate_index(1).unwrap(), (1, 1));
        assert_eq!(enumerate_index(3).unwrap(), (2, 2));
        assert_eq!(enumerate_index(6).unwrap(), (3, 3));
        assert!(enumerate_index(0).is_err());
        assert!(index_of(2, 3).is_err());
    }

    #[test]
    fn unit_targets_give_value_one() {
        let a = BlockOperator::new(base(&[Complex::new(1.0, 0.0); 4]), 4).unwrap();
        let b = best_partition(&a, 2, 6).unwrap();
        assert!((b.value - 1.0).abs() < 1e-12);
        assert_eq!(b.partition.parts()[0], 1);
        assert_eq!(b.partitions_searched, 32);
    }

    #[test]
    fn singleton_parts_give_min_modulus() {
        let t = [Complex::new(0.9, 0.1), Complex::new(0.2, 0.5), Complex::new(-0.7, 0.0)];
        let a = BlockOperator::new(base(&t), 2).unwrap();
        let b = best_partition(&a, 3, 3).unwrap();
        let min = t[..2].iter().map(|c| c.norm()).fold(f64::INFINITY, f64::min);
        assert!((b.value - min).abs() < 1e-12);
    }

    #[test]
    fn budget_guard() {
        let a = BlockOperator::new(base(&[Complex::new(1.0, 0.0); 8]), 8).unwrap();
        assert!(matches!(best_partition(&a, 3, 30), Err(Error::Budget(_))));
    }
}
