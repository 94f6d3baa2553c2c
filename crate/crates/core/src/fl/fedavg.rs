use super::model::ModelParams;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Sample-size weighted mean of client models, reduced in the given order.
///
/// Computed as a running mean `acc += (w / W) (p - acc)`, which keeps every
/// coordinate inside the range of its inputs.
pub fn fed_avg<T: Scalar>(updates: &[(&ModelParams<T>, usize)]) -> Result<ModelParams<T>> {
    let Some(&(first, first_size)) = updates.first() else {
        return Err(Error::Model("no client updates to aggregate".into()));
    };
    if updates.iter().any(|u| u.1 == 0) {
        return Err(Error::Model("client update with zero samples".into()));
    }
    if let Some(bad) = updates.iter().find(|u| u.0.spec != first.spec) {
        return Err(Error::Model(format!(
            "spec mismatch: {:?} vs {:?}",
            bad.0.spec.widths, first.spec.widths
        )));
    }
    let mut acc = first.values.clone();
    let mut lo = acc.clone();
    let mut hi = acc.clone();
    let mut total = first_size;
    for &(params, size) in &updates[1..] {
        total += size;
        let w = T::of_usize(size) / T::of_usize(total);
        for (j, (a, &p)) in acc.iter_mut().zip(&params.values).enumerate() {
            lo[j] = lo[j].min(p);
            hi[j] = hi[j].max(p);
            *a = (*a + w * (p - *a)).max(lo[j]).min(hi[j]);
        }
    }
    Ok(ModelParams { spec: first.spec.clone(), values: acc })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fl::ModelSpec;

    fn p(values: Vec<f64>) -> ModelParams<f64> {
        ModelParams { spec: ModelSpec::linear(values.len() - 1), values }
    }

    #[test]
    fn weighted_mean_by_hand() {
        let out = fed_avg(&[(&p(vec![0.0, 0.0]), 1), (&p(vec![1.0, 1.0]), 3)]).unwrap();
        assert_eq!(out.values, vec![0.75, 0.75]);
    }

    #[test]
    fn identical_and_single_inputs() {
        let a = p(vec![0.1, -0.7, 3.3]);
        assert_eq!(fed_avg(&[(&a, 5)]).unwrap(), a);
        assert_eq!(fed_avg(&[(&a, 5), (&a, 2), (&a, 9)]).unwrap(), a);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(fed_avg::<f64>(&[]).is_err());
        assert!(fed_avg(&[(&p(vec![0.0, 0.0]), 0)]).is_err());
        assert!(fed_avg(&[(&p(vec![0.0, 0.0]), 1), (&p(vec![0.0, 0.0, 0.0]), 1)]).is_err());
    }
}
