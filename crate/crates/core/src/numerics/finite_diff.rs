use std::collections::BTreeMap;

use crate::error::Result;
use crate::numerics::Tensor;
use crate::params::ParamStore;

/// Central-difference gradient of a scalar function.
pub fn finite_diff_grad<F>(mut f: F, x: &Tensor, h: f64) -> Result<Tensor>
where
    F: FnMut(&Tensor) -> Result<f64>,
{
    let mut probe = x.clone();
    let mut grad = Tensor::zeros(x.shape());
    for i in 0..x.numel() {
        let orig = probe.data()[i];
        probe.data_mut()[i] = orig + h;
        let up = f(&probe)?;
        probe.data_mut()[i] = orig - h;
        let down = f(&probe)?;
        probe.data_mut()[i] = orig;
        grad.data_mut()[i] = (up - down) / (2.0 * h);
    }
    Ok(grad)
}

/// Denominator floor of [`relative_error`].
pub const NORM_FLOOR: f64 = 1e-5;

/// `‖a − b‖ / max(‖a‖, ‖b‖, NORM_FLOOR)`.
///
/// The floor keeps gradients that vanish identically (a key bias under
/// softmax, say) from turning rounding noise into a relative error of one.
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    diff / na.max(nb).max(NORM_FLOOR)
}

/// Compares analytic parameter gradients against central differences.
///
/// `loss` evaluates the scalar objective for a parameter store; `analytic`
/// holds the gradients produced by `backward`. Up to `max_coords` coordinates
/// per parameter are probed (evenly strided). Returns the relative error per
/// parameter name.
pub fn check_param_grads<F>(
    store: &ParamStore,
    analytic: &BTreeMap<String, Tensor>,
    mut loss: F,
    h: f64,
    max_coords: usize,
) -> Result<BTreeMap<String, f64>>
where
    F: FnMut(&ParamStore) -> Result<f64>,
{
    let mut probe = store.clone();
    let mut out = BTreeMap::new();
    for (name, value) in store.iter() {
        let n = value.numel();
        let stride = (n / max_coords.max(1)).max(1);
        let coords: Vec<usize> = (0..n).step_by(stride).take(max_coords).collect();
        let mut numeric = Vec::with_capacity(coords.len());
        let mut exact = Vec::with_capacity(coords.len());
        let grad = &analytic[name];
        for &i in &coords {
            let orig = value.data()[i];
            probe.get_mut(name).expect("present").data_mut()[i] = orig + h;
            let up = loss(&probe)?;
            probe.get_mut(name).expect("present").data_mut()[i] = orig - h;
            let down = loss(&probe)?;
            probe.get_mut(name).expect("present").data_mut()[i] = orig;
            numeric.push((up - down) / (2.0 * h));
            exact.push(grad.data()[i]);
        }
        out.insert(name.clone(), relative_error(&exact, &numeric));
    }
    Ok(out)
}
