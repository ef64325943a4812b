//! Text labels for pairs and tuples: `{i,j}` and `(j1,...,jk)`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

pub fn pair_label(e: (usize, usize)) -> String {
    format!("{{{},{}}}", e.0, e.1)
}

/// Parses `{i,j}`; also accepts a product label whose first factor is a
/// pair, such as `{1,2}*(3,4)`.
pub fn parse_pair_label(s: &str) -> Result<(usize, usize)> {
    let head = s.split('*').next().unwrap_or("");
    let bad = || Error::invalid(format!("label {s:?} does not start with a pair {{i,j}}"));
    let inner = head.trim().strip_prefix('{').and_then(|x| x.strip_suffix('}')).ok_or_else(bad)?;
    let (a, b) = inner.split_once(',').ok_or_else(bad)?;
    let i = a.trim().parse().map_err(|_| bad())?;
    let j = b.trim().parse().map_err(|_| bad())?;
    Ok((i, j))
}

pub fn tuple_label(t: &[usize]) -> String {
    let parts: Vec<String> = t.iter().map(|x| format!("{x}")).collect();
    format!("({})", parts.join(","))
}
