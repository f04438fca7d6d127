//! Central-difference cross-check for jet derivatives.

use super::{Jet, JetContext};
use crate::error::Result;
use crate::scalar::Real;

/// Maximum absolute discrepancy between jet Taylor coefficients and finite
/// differences, indexed by derivative order (`per_order[0]` compares values).
#[derive(Clone, Debug, PartialEq)]
pub struct FdResiduals {
    pub per_order: Vec<f64>,
    pub steps: Vec<f64>,
}

impl FdResiduals {
    pub fn max(&self) -> f64 {
        self.per_order.iter().cloned().fold(0.0, f64::max)
    }
}

/// Step balancing truncation and rounding for a `k`-th derivative.
pub fn default_step(k: usize) -> f64 {
    f64::EPSILON.powf(1.0 / (k as f64 + 2.0))
}

const STENCIL: [(f64, f64); 4] = [(2.0, -1.0), (1.0, 8.0), (-1.0, -8.0), (-2.0, 1.0)];

fn nested<T: Real>(
    field: &dyn Fn(&[Jet<T>]) -> Result<Jet<T>>,
    p: &mut Vec<f64>,
    vars: &[usize],
    h: f64,
) -> Result<f64> {
    let Some((&v, rest)) = vars.split_first() else {
        let pt: Vec<T> = p.iter().map(|&x| T::lit(x)).collect();
        let ctx = JetContext::new(&pt, 0)?;
        return Ok(field(&ctx.coordinates())?.value().to_f64_lossy());
    };
    let x0 = p[v];
    let mut acc = 0.0;
    for (s, w) in STENCIL {
        p[v] = x0 + s * h;
        acc += w * nested(field, p, rest, h)?;
    }
    p[v] = x0;
    Ok(acc / (12.0 * h))
}

fn second_diag<T: Real>(
    field: &dyn Fn(&[Jet<T>]) -> Result<Jet<T>>,
    p: &mut Vec<f64>,
    v: usize,
    h: f64,
) -> Result<f64> {
    let x0 = p[v];
    let mut acc = 0.0;
    for (s, w) in [(-2.0, -1.0), (-1.0, 16.0), (0.0, -30.0), (1.0, 16.0), (2.0, -1.0)] {
        p[v] = x0 + s * h;
        acc += w * nested(field, p, &[], h)?;
    }
    p[v] = x0;
    Ok(acc / (12.0 * h * h))
}

/// Compares the order-`order` jet of `field` at `p` against 5-point central
/// stencils. `h = None` picks [`default_step`] per derivative order.
pub fn finite_difference_check<T: Real>(
    field: &dyn Fn(&[Jet<T>]) -> Result<Jet<T>>,
    p: &[f64],
    order: usize,
    h: Option<f64>,
) -> Result<FdResiduals> {
    let seed: Vec<T> = p.iter().map(|&x| T::lit(x)).collect();
    let ctx = JetContext::new(&seed, order)?;
    let jet = field(&ctx.coordinates())?;
    let layout = ctx.layout().clone();
    let mut per_order = vec![0.0f64; order + 1];
    let mut steps = vec![0.0f64; order + 1];
    let mut pt = p.to_vec();
    for (idx, e) in layout.exponents().iter().enumerate() {
        let k: usize = e.iter().map(|&x| x as usize).sum();
        let step = h.unwrap_or_else(|| default_step(k));
        steps[k] = step;
        let mut vars = Vec::with_capacity(k);
        for (var, &c) in e.iter().enumerate() {
            vars.extend(std::iter::repeat_n(var, c as usize));
        }
        let deriv = if k == 2 && vars[0] == vars[1] {
            second_diag(field, &mut pt, vars[0], step)?
        } else {
            nested(field, &mut pt, &vars, step)?
        };
        let fd_coeff = deriv / layout.factorial(idx);
        let jet_coeff = jet.coeffs()[idx].to_f64_lossy();
        per_order[k] = per_order[k].max((fd_coeff - jet_coeff).abs());
    }
    Ok(FdResiduals { per_order, steps })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_reproduced() {
        let f = |x: &[Jet<f64>]| -> Result<Jet<f64>> {
            Ok(&(&x[0] * &x[1]) * &x[0] + x[1].scale(3.0) + 1.0)
        };
        let r = finite_difference_check(&f, &[0.3, -0.7], 3, Some(1e-2)).unwrap();
        assert!(r.max() < 1e-9, "{r:?}");
    }

    #[test]
    fn rational_function_order_three() {
        let f = |x: &[Jet<f64>]| (&x[0] * &x[0] + 1.0).recip();
        let r = finite_difference_check(&f, &[0.5], 3, Some(1e-3)).unwrap();
        assert!(r.max() < 1e-6, "{r:?}");
    }

    #[test]
    fn exponential_of_sum() {
        let f = |x: &[Jet<f64>]| Ok((&x[0] + &x[1]).exp());
        let r = finite_difference_check(&f, &[0.0, 0.0], 2, Some(1e-3)).unwrap();
        assert!(r.max() < 1e-6, "{r:?}");
    }
}
