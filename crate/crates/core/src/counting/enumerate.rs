use rayon::prelude::*;

use super::mpoly::CompiledPoly;
use crate::arith::{Elem, FiniteField};
use crate::error::{Error, Result};

/// Points of one chart: a fixed prefix followed by `free` coordinates over the field.
pub(crate) struct Block {
    prefix: Vec<Elem>,
    free: usize,
}

/// Charts of P^n with representatives normalized so the first nonzero coordinate is 1.
pub(crate) fn projective_blocks(field: &FiniteField, n: usize) -> Vec<Block> {
    (0..=n)
        .map(|i| {
            let mut prefix = vec![field.zero(); i];
            prefix.push(field.one());
            Block { prefix, free: n - i }
        })
        .collect()
}

pub(crate) fn affine_block(n: usize) -> Vec<Block> {
    vec![Block { prefix: Vec::new(), free: n }]
}

fn block_sizes(field: &FiniteField, blocks: &[Block], budget: u128) -> Result<Vec<u128>> {
    let over = || Error::Budget { candidates: u128::MAX, budget };
    let mut sizes = Vec::with_capacity(blocks.len());
    let mut total: u128 = 0;
    for b in blocks {
        let s = field.order().checked_pow(b.free as u32).ok_or_else(over)?;
        total = total.checked_add(s).ok_or_else(over)?;
        sizes.push(s);
    }
    if total > budget {
        return Err(Error::Budget { candidates: total, budget });
    }
    Ok(sizes)
}

/// Number of candidates where every polynomial vanishes, split into `stripes`
/// contiguous ranges of the lexicographic candidate order.
pub(crate) fn count_zeros(
    field: &FiniteField,
    blocks: &[Block],
    polys: &[CompiledPoly],
    stripes: usize,
    budget: u128,
) -> Result<u128> {
    let sizes = block_sizes(field, blocks, budget)?;
    let total: u128 = sizes.iter().sum();
    let stripes = stripes.max(1) as u128;
    let bounds: Vec<(u128, u128)> =
        (0..stripes).map(|s| (total * s / stripes, total * (s + 1) / stripes)).collect();
    Ok(bounds
        .into_par_iter()
        .map(|(lo, hi)| count_range(field, blocks, &sizes, polys, lo, hi))
        .sum())
}

fn count_range(
    field: &FiniteField,
    blocks: &[Block],
    sizes: &[u128],
    polys: &[CompiledPoly],
    lo: u128,
    hi: u128,
) -> u128 {
    let q = field.order();
    let mut found = 0u128;
    let mut offset = 0u128;
    for (block, &size) in blocks.iter().zip(sizes) {
        let (start, end) = (lo.max(offset), hi.min(offset + size));
        offset += size;
        if start >= end {
            continue;
        }
        let k = block.free;
        let mut digits = vec![0u128; k];
        let mut local = start - (offset - size);
        for d in digits.iter_mut().rev() {
            *d = local % q;
            local /= q;
        }
        let mut point: Vec<Elem> = block.prefix.clone();
        point.extend(digits.iter().map(|&d| field.element(d)));
        let base = block.prefix.len();
        for _ in start..end {
            if polys.iter().all(|f| f.vanishes_at(field, &point)) {
                found += 1;
            }
            for j in (0..k).rev() {
                digits[j] += 1;
                if digits[j] < q {
                    point[base + j] = field.element(digits[j]);
                    break;
                }
                digits[j] = 0;
                point[base + j] = field.zero();
            }
        }
    }
    found
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projective_space_by_enumeration() {
        let f = FiniteField::prime_field(3).unwrap();
        for stripes in [1, 2, 5, 40] {
            let n = count_zeros(&f, &projective_blocks(&f, 2), &[], stripes, 1000).unwrap();
            assert_eq!(n, 13);
        }
        assert!(matches!(
            count_zeros(&f, &projective_blocks(&f, 2), &[], 1, 12),
            Err(Error::Budget { candidates: 13, budget: 12 })
        ));
    }
}
