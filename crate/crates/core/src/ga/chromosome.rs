use std::fmt;

use crate::domain::StrategyProfile;
use crate::error::{Error, Result};

/// Integer encoding of a profile: gene `i` is the 1-based federation of the i-th
/// server in ascending id order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Chromosome {
    pub genes: Vec<usize>,
}

impl Chromosome {
    pub fn new(genes: Vec<usize>) -> Self {
        Self { genes }
    }

    pub fn len(&self) -> usize {
        self.genes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }
}

impl fmt::Display for Chromosome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.genes.iter().map(usize::to_string).collect();
        f.write_str(&parts.join(" "))
    }
}

impl std::str::FromStr for Chromosome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.split_whitespace()
            .map(|g| g.parse().map_err(|_| Error::Chromosome(format!("bad gene `{g}`"))))
            .collect::<Result<_>>()
            .map(Chromosome::new)
    }
}

pub fn encode(profile: &StrategyProfile) -> Chromosome {
    Chromosome::new(profile.assignment().to_vec())
}

/// Decodes against a scenario with `servers` servers and `federations` federations.
pub fn decode(chromosome: &Chromosome, servers: usize, federations: usize) -> Result<StrategyProfile> {
    if chromosome.len() != servers {
        return Err(Error::Chromosome(format!(
            "length {} but the scenario has {servers} servers",
            chromosome.len()
        )));
    }
    if let Some((i, g)) = chromosome.genes.iter().enumerate().find(|(_, &g)| g == 0 || g > federations) {
        return Err(Error::Chromosome(format!("gene {i} = {g} outside 1..={federations}")));
    }
    Ok(StrategyProfile::new(federations, chromosome.genes.clone()))
}
