//! Textual partition-set specs: `all`, `standard`, or an explicit list such
//! as `0-1,2-3,4-5;0-2,1-3,4-5`.

use std::fmt;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use fermat_core::{PairPartition, PartitionSet, ProblemInstance};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartitionSpec {
    All,
    Standard,
    /// Normalized: pairs `j < k` sorted by `j`, partitions sorted and distinct.
    Explicit(Vec<PairPartition>),
}

impl PartitionSpec {
    /// The spec that renders `k` most compactly.
    pub fn of(k: &PartitionSet) -> Self {
        if k.is_all() {
            PartitionSpec::All
        } else if k.is_standard() {
            PartitionSpec::Standard
        } else {
            PartitionSpec::Explicit(k.as_slice().to_vec())
        }
    }

    pub fn resolve(&self, instance: &ProblemInstance) -> Result<PartitionSet> {
        Ok(match self {
            PartitionSpec::All => PartitionSet::all(instance),
            PartitionSpec::Standard => PartitionSet::standard(instance),
            PartitionSpec::Explicit(parts) => {
                let k = PartitionSet::new(instance.n(), parts.clone())?;
                if k.n() != instance.n() {
                    bail!("partitions are over n = {}, instance has n = {}", k.n(), instance.n());
                }
                k
            }
        })
    }
}

fn parse_pair(t: &str) -> Result<(usize, usize)> {
    let (a, b) = t.split_once('-').ok_or_else(|| anyhow!("pair {t:?} is not of the form j-k"))?;
    let num = |x: &str| x.trim().parse::<usize>().with_context(|| format!("bad index {x:?} in pair {t:?}"));
    Ok((num(a)?, num(b)?))
}

impl FromStr for PartitionSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "all" => return Ok(PartitionSpec::All),
            "standard" => return Ok(PartitionSpec::Standard),
            "" => bail!("empty partition spec"),
            _ => {}
        }
        let mut parts = Vec::new();
        for item in s.split(';') {
            let pairs = item.split(',').map(parse_pair).collect::<Result<Vec<_>>>()?;
            // Covering {0, …, n+1} with pairs forces n = 2·#pairs − 2.
            let n = (2 * pairs.len()).checked_sub(2).ok_or_else(|| anyhow!("empty partition in {s:?}"))?;
            parts.push(PairPartition::new(n, pairs)?);
        }
        let n = parts[0].n();
        if let Some(p) = parts.iter().find(|p| p.n() != n) {
            bail!("partition {p} does not cover the same index set as {}", parts[0]);
        }
        Ok(PartitionSpec::Explicit(PartitionSet::new(n, parts)?.as_slice().to_vec()))
    }
}

impl fmt::Display for PartitionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartitionSpec::All => f.write_str("all"),
            PartitionSpec::Standard => f.write_str("standard"),
            PartitionSpec::Explicit(parts) => {
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(";")?;
                    }
                    write!(f, "{p}")?;
                }
                Ok(())
            }
        }
    }
}
