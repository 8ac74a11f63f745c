use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::domain::radial::MAX_ORDER;
use crate::error::{Error, Result};

/// Multi-index `alpha` with `|alpha| <= 3` in one or two dimensions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(components: &[usize]) -> Result<Self> {
        if components.is_empty() || components.len() > 2 {
            return Err(Error::InvalidParameter(format!(
                "multi-index length {} not in {{1, 2}}",
                components.len()
            )));
        }
        let order = components.iter().sum();
        if order > MAX_ORDER {
            return Err(Error::OrderUnsupported { order });
        }
        Ok(Self(components.to_vec()))
    }

    pub fn zero(dim: usize) -> Self {
        Self(vec![0; dim])
    }

    pub fn components(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn order(&self) -> usize {
        self.0.iter().sum()
    }

    /// `(-1)^|alpha|`.
    pub fn sign(&self) -> f64 {
        if self.order().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// Every multi-index of the given dimension with `|alpha| <= k`, by
    /// increasing order and then lexicographically.
    pub fn up_to(dim: usize, k: usize) -> Result<Vec<Self>> {
        if k > MAX_ORDER {
            return Err(Error::OrderUnsupported { order: k });
        }
        let mut out = Vec::new();
        for order in 0..=k {
            match dim {
                1 => out.push(Self(vec![order])),
                2 => out.extend((0..=order).rev().map(|a| Self(vec![a, order - a]))),
                _ => {
                    return Err(Error::InvalidParameter(format!(
                        "dimension {dim} not in {{1, 2}}"
                    )))
                }
            }
        }
        Ok(out)
    }
}

impl TryFrom<Vec<usize>> for MultiIndex {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(&v)
    }
}

impl From<MultiIndex> for Vec<usize> {
    fn from(m: MultiIndex) -> Self {
        m.0
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Accepts `1`, `(1)`, `1,0` or `(2, 1)`.
impl FromStr for MultiIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts = inner
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad multi-index component '{t}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(&parts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_counts() {
        assert_eq!(MultiIndex::up_to(1, 3).unwrap().len(), 4);
        // 1 + 2 + 3 indices of order 0, 1, 2
        let two = MultiIndex::up_to(2, 2).unwrap();
        assert_eq!(two.len(), 6);
        assert_eq!(two[1].components(), &[1, 0]);
    }

    #[test]
    fn order_limit() {
        assert_eq!(
            MultiIndex::new(&[2, 2]),
            Err(Error::OrderUnsupported { order: 4 })
        );
        assert!(MultiIndex::up_to(1, 4).is_err());
    }

    #[test]
    fn parse_and_display() {
        let m: MultiIndex = "(2, 1)".parse().unwrap();
        assert_eq!(m.to_string(), "(2,1)");
        assert_eq!(m.sign(), -1.0);
        assert_eq!("1".parse::<MultiIndex>().unwrap().components(), &[1]);
        assert!("a".parse::<MultiIndex>().is_err());
    }
}
