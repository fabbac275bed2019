//! Coordinate-wise combinations of witness vectors.

use crate::error::{Error, Result};
use crate::formula::Assignment;

fn fold(
    witnesses: &[Assignment],
    op: impl Fn(bool, bool) -> bool,
) -> Result<Assignment> {
    let (first, rest) = witnesses
        .split_first()
        .ok_or_else(|| Error::usage("cannot combine an empty witness list"))?;
    let mut acc = first.bits().to_vec();
    for w in rest {
        if w.len() != acc.len() {
            return Err(Error::usage(format!(
                "witness lengths differ: {} vs {}",
                w.len(),
                acc.len()
            )));
        }
        for (a, &b) in acc.iter_mut().zip(w.bits()) {
            *a = op(*a, b);
        }
    }
    Ok(Assignment::new(acc))
}

/// XOR of an odd number of witnesses; affine relations are closed under it.
pub fn combine_xor(witnesses: &[Assignment]) -> Result<Assignment> {
    if witnesses.len() % 2 == 0 {
        return Err(Error::usage(format!(
            "XOR combination needs an odd number of witnesses, got {}",
            witnesses.len()
        )));
    }
    fold(witnesses, |a, b| a ^ b)
}

pub fn combine_or(witnesses: &[Assignment]) -> Result<Assignment> {
    fold(witnesses, |a, b| a | b)
}

pub fn combine_and(witnesses: &[Assignment]) -> Result<Assignment> {
    fold(witnesses, |a, b| a & b)
}

pub fn combine_majority(a: &Assignment, b: &Assignment, c: &Assignment) -> Result<Assignment> {
    if a.len() != b.len() || a.len() != c.len() {
        return Err(Error::usage("witness lengths differ"));
    }
    Ok(Assignment::new(
        (0..a.len())
            .map(|i| {
                let (x, y, z) = (a.get(i), b.get(i), c.get(i));
                (x & y) | (x & z) | (y & z)
            })
            .collect(),
    ))
}
