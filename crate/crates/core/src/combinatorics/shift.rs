use alloc::format;
use alloc::vec::Vec;

use crate::constructions::{all_pairs, check_pair, Pair};
use crate::error::{Error, Result};

/// Edge of the shift graph: `{x,y}` and `{y,z}` with `x < y < z`.
pub fn shift_adjacent(e: Pair, e2: Pair) -> Result<bool> {
    check_pair(e)?;
    check_pair(e2)?;
    Ok(adjacent(e, e2))
}

pub(crate) fn adjacent(e: Pair, e2: Pair) -> bool {
    e.1 == e2.0 || e2.1 == e.0
}

pub const MAX_TRIANGLE_CHECK: usize = 12;

/// Exhaustively checks every triple of vertices of the shift graph on
/// `[n]^(2)` for a triangle.
pub fn verify_triangle_free(n: usize) -> Result<bool> {
    if n < 3 {
        return Err(Error::invalid(format!("ground size must be at least 3, got {n}")));
    }
    if n > MAX_TRIANGLE_CHECK {
        return Err(Error::SizeLimit(format!("ground size {n} exceeds {MAX_TRIANGLE_CHECK}")));
    }
    let v: Vec<Pair> = all_pairs(n);
    for a in 0..v.len() {
        for b in a + 1..v.len() {
            if !adjacent(v[a], v[b]) {
                continue;
            }
            for c in b + 1..v.len() {
                if adjacent(v[a], v[c]) && adjacent(v[b], v[c]) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjacency_examples() {
        assert!(shift_adjacent((1, 2), (2, 3)).unwrap());
        assert!(shift_adjacent((2, 3), (1, 2)).unwrap());
        assert!(!shift_adjacent((1, 2), (3, 4)).unwrap());
        assert!(!shift_adjacent((1, 2), (1, 3)).unwrap());
        assert!(shift_adjacent((2, 1), (1, 3)).is_err());
    }

    #[test]
    fn triangle_free_range() {
        for n in [3, 5, 12] {
            assert!(verify_triangle_free(n).unwrap());
        }
        assert!(verify_triangle_free(2).is_err());
        assert!(matches!(verify_triangle_free(13), Err(Error::SizeLimit(_))));
    }
}
