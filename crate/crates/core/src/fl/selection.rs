use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Selection {
    Uniform,
    /// Inclusion weight proportional to the client's sample count.
    Weighted,
}

impl std::str::FromStr for Selection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Selection::Uniform),
            "weighted" => Ok(Selection::Weighted),
            other => Err(Error::Config(format!("unknown selection `{other}`"))),
        }
    }
}

/// Draws `k` distinct clients among those with at least one sample, returned in
/// ascending order.
pub fn select_clients<R: Rng + ?Sized>(
    sizes: &[usize],
    k: usize,
    selection: Selection,
    rng: &mut R,
) -> Result<Vec<usize>> {
    let eligible: Vec<usize> = (0..sizes.len()).filter(|&i| sizes[i] > 0).collect();
    if k > eligible.len() {
        return Err(Error::Selection { requested: k, eligible: eligible.len() });
    }
    let picked = match selection {
        Selection::Uniform => index::sample(rng, eligible.len(), k).into_vec(),
        Selection::Weighted => {
            index::sample_weighted(rng, eligible.len(), |i| sizes[eligible[i]] as f64, k)
                .map_err(|e| Error::Model(format!("weighted selection: {e}")))?
                .into_vec()
        }
    };
    let mut out: Vec<usize> = picked.into_iter().map(|i| eligible[i]).collect();
    out.sort_unstable();
    Ok(out)
}
