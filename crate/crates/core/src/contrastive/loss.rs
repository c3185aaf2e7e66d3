//! InfoNCE and its closed-form gradient.

use alloc::vec::Vec;

use super::dot;
use crate::math;
use crate::{Error, Result};

fn check(query: &[f64], key: &[f64], negatives: &[&[f64]], tau: f64) -> Result<()> {
    if negatives.is_empty() {
        return Err(Error::input("InfoNCE needs at least one negative"));
    }
    if !(tau > 0.0) {
        return Err(Error::input("temperature must be positive"));
    }
    let d = query.len();
    if key.len() != d || negatives.iter().any(|n| n.len() != d) {
        return Err(Error::input("InfoNCE vectors differ in dimension"));
    }
    Ok(())
}

/// `-log(e^pos / (e^pos + Σ e^neg))`, stabilized by shifting every logit by
/// their maximum. When the positive is the largest logit the result is
/// computed as `log1p(Σ e^(neg - pos))`, which stays strictly positive.
pub fn infonce_from_logits(positive: f64, negatives: &[f64]) -> f64 {
    let top = negatives.iter().copied().fold(positive, f64::max);
    if top == positive {
        let s: f64 = negatives.iter().map(|l| math::exp(l - positive)).sum();
        libm::log1p(s)
    } else {
        let s: f64 = math::exp(positive - top)
            + negatives.iter().map(|l| math::exp(l - top)).sum::<f64>();
        top - positive + math::ln(s)
    }
}

pub fn infonce(query: &[f64], key: &[f64], negatives: &[&[f64]], tau: f64) -> Result<f64> {
    check(query, key, negatives, tau)?;
    let pos = dot(query, key) / tau;
    let neg: Vec<f64> = negatives.iter().map(|n| dot(query, n) / tau).collect();
    Ok(infonce_from_logits(pos, &neg))
}

#[derive(Debug, Clone, PartialEq)]
pub struct InfoNceGrad {
    pub loss: f64,
    pub d_query: Vec<f64>,
    pub d_key: Vec<f64>,
    pub d_negatives: Vec<Vec<f64>>,
}

/// Loss and gradients. With `p` the softmax over `[q·k, q·n_1, ...] / τ`:
/// `∂/∂q = ((p₀ - 1) k + Σ pₙ nₙ) / τ`, `∂/∂k = (p₀ - 1) q / τ`,
/// `∂/∂nₙ = pₙ q / τ`.
pub fn infonce_grad(query: &[f64], key: &[f64], negatives: &[&[f64]], tau: f64) -> Result<InfoNceGrad> {
    check(query, key, negatives, tau)?;
    let pos = dot(query, key) / tau;
    let neg: Vec<f64> = negatives.iter().map(|n| dot(query, n) / tau).collect();
    let top = neg.iter().copied().fold(pos, f64::max);
    let e0 = math::exp(pos - top);
    let en: Vec<f64> = neg.iter().map(|l| math::exp(l - top)).collect();
    let z = e0 + en.iter().sum::<f64>();
    let p0 = e0 / z;

    let d = query.len();
    let mut d_query: Vec<f64> = key.iter().map(|k| (p0 - 1.0) * k / tau).collect();
    for (n, e) in negatives.iter().zip(&en) {
        let pn = e / z;
        for i in 0..d {
            d_query[i] += pn * n[i] / tau;
        }
    }
    let d_key = query.iter().map(|q| (p0 - 1.0) * q / tau).collect();
    let d_negatives = en
        .iter()
        .map(|e| {
            let pn = e / z;
            query.iter().map(|q| pn * q / tau).collect()
        })
        .collect();
    Ok(InfoNceGrad {
        loss: infonce_from_logits(pos, &neg),
        d_query,
        d_key,
        d_negatives,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn unit(i: usize, d: usize) -> Vec<f64> {
        let mut v = vec![0.0; d];
        v[i] = 1.0;
        v
    }

    #[test]
    fn equal_similarities_give_log_one_plus_n() {
        let q = unit(0, 3);
        let negs: Vec<Vec<f64>> = (0..4).map(|_| q.clone()).collect();
        let refs: Vec<&[f64]> = negs.iter().map(|v| v.as_slice()).collect();
        let l = infonce(&q, &q, &refs, 0.2).unwrap();
        assert!((l - 5f64.ln()).abs() < 1e-12);
        assert!((l - 1.609_44).abs() < 1e-5);
    }

    #[test]
    fn closed_form_values() {
        // Oracle: scalar evaluation of -log(e^(sp/τ) / (e^(sp/τ) + Σ e^(sn/τ))).
        let oracle = |sp: f64, sn: &[f64], tau: f64| {
            let num = (sp / tau).exp();
            -(num / (num + sn.iter().map(|s| (s / tau).exp()).sum::<f64>())).ln()
        };
        let l = infonce_from_logits(1.0 / 0.2, &[0.0; 4]);
        assert!((l - oracle(1.0, &[0.0; 4], 0.2)).abs() < 1e-12);
        assert!((l - 0.026_595_0).abs() < 1e-6);

        let l = infonce_from_logits(0.5 / 0.2, &[0.5 / 0.2, -0.5 / 0.2]);
        assert!((l - oracle(0.5, &[0.5, -0.5], 0.2)).abs() < 1e-12);
        assert!((l - 0.696_510_5).abs() < 1e-6);
    }

    #[test]
    fn empty_negatives_rejected() {
        let q = unit(0, 2);
        assert!(matches!(infonce(&q, &q, &[], 0.2), Err(Error::InvalidInput(_))));
        assert!(infonce_grad(&q, &q, &[], 0.2).is_err());
    }

    #[test]
    fn equal_vectors_have_zero_query_gradient() {
        let q = vec![0.6, 0.8];
        let negs = [q.as_slice(), q.as_slice(), q.as_slice()];
        let g = infonce_grad(&q, &q, &negs, 0.2).unwrap();
        assert!(g.d_query.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn unused_dimension_has_zero_gradient() {
        let q = vec![0.6, 0.8, 0.0];
        let k = vec![0.8, 0.6, 0.0];
        let n = vec![-1.0, 0.0, 0.0];
        let g = infonce_grad(&q, &k, &[&n], 0.5).unwrap();
        assert_eq!(g.d_query[2], 0.0);
        assert_eq!(g.d_key[2], 0.0);
        assert_eq!(g.d_negatives[0][2], 0.0);
    }

    #[test]
    fn strongly_separated_loss_stays_positive() {
        let l = infonce_from_logits(1.0 / 0.07, &[-1.0 / 0.07]);
        assert!(l > 0.0);
    }
}
