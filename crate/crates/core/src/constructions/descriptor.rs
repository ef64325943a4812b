use alloc::boxed::Box;
use alloc::vec::Vec;

use super::brick::{brick_points, BrickSpec};
use super::segment::{all_pairs, segment_config_points, SegmentSpec};
use super::spread::{spread_points, SpreadSpec};
use crate::error::{Error, Result};
use crate::geometry::{product, PointConfig};

/// A countable configuration, described lazily and materialized on demand.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "type", rename_all = "lowercase"))]
pub enum ConfigDescriptor {
    Finite(PointConfig),
    Segment(SegmentSpec),
    Spread(SpreadSpec),
    Brick(BrickSpec),
    Product {
        left: Box<ConfigDescriptor>,
        right: Box<ConfigDescriptor>,
    },
}

impl ConfigDescriptor {
    pub fn product(left: ConfigDescriptor, right: ConfigDescriptor) -> Self {
        ConfigDescriptor::Product {
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    /// Right-nested product of the given factors.
    pub fn product_of(mut factors: Vec<ConfigDescriptor>) -> Option<Self> {
        let mut acc = factors.pop()?;
        while let Some(f) = factors.pop() {
            acc = ConfigDescriptor::product(f, acc);
        }
        Some(acc)
    }
}

/// Finite truncation over the ground set `[n]`. Products share one `n`.
pub fn materialize(desc: &ConfigDescriptor, n: usize) -> Result<PointConfig> {
    if n == 0 {
        return Err(Error::invalid("truncation parameter must be at least 1"));
    }
    match desc {
        ConfigDescriptor::Finite(c) => {
            c.validate()?;
            Ok(c.clone())
        }
        ConfigDescriptor::Segment(s) => segment_config_points(s, &all_pairs(n)),
        ConfigDescriptor::Spread(s) => {
            let ground: Vec<usize> = (1..=n).collect();
            spread_points(s, &ground)
        }
        ConfigDescriptor::Brick(b) => brick_points(b),
        ConfigDescriptor::Product { left, right } => {
            let a = materialize(left, n)?;
            let b = materialize(right, n)?;
            Ok(product(&a, &b))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::congruent;
    use crate::rational::int;
    use alloc::vec;

    #[test]
    fn truncation_sizes() {
        let seg = ConfigDescriptor::Segment(SegmentSpec::new(int(1), int(2)).unwrap());
        assert_eq!(materialize(&seg, 4).unwrap().len(), 6);
        let spread = ConfigDescriptor::Spread(SpreadSpec::new(vec![1.0, 0.5]).unwrap());
        assert_eq!(materialize(&spread, 4).unwrap().len(), 6);
        assert!(materialize(&seg, 0).is_err());
    }

    #[test]
    fn product_with_point() {
        let seg = ConfigDescriptor::Segment(SegmentSpec::new(int(1), int(2)).unwrap());
        let pt = ConfigDescriptor::Finite(PointConfig::from_rational_points(vec![vec![int(3)]]).unwrap());
        let p = materialize(&ConfigDescriptor::product(seg.clone(), pt), 4).unwrap();
        let s = materialize(&seg, 4).unwrap();
        assert_eq!(p.len(), 6);
        assert!(congruent(&p, &s, 0.0).unwrap().is_some());
        assert_eq!(p.label(0), "{1,2}*0");
    }
}
