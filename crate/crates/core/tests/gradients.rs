//! Analytic gradients against central finite differences.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use tubelet_core::contrastive::{
    backward, forward, infonce, infonce_grad, EncoderDims, EncoderParams,
};
use tubelet_core::seed;

const STEP: f64 = 1e-5;
/// Relative error is measured against max(|analytic|, |numeric|, FLOOR):
/// components smaller than the floor are held to an absolute error of
/// FLOOR·TOL, above the ~1e-10 noise of central differences at this step.
const FLOOR: f64 = 1e-4;
const TOL: f64 = 1e-5;

fn rel_err(a: f64, n: f64) -> f64 {
    (a - n).abs() / a.abs().max(n.abs()).max(FLOOR)
}

fn unit(rng: &mut seed::Rng, d: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n).collect()
}

fn dims() -> EncoderDims {
    EncoderDims {
        frames: 2,
        grid: 2,
        hidden: 16,
        proj_hidden: 12,
        embed: 6,
    }
}

#[test]
fn infonce_gradient_matches_finite_differences() {
    let mut worst: f64 = 0.0;
    for inst in 0..100u64 {
        let tau = [0.07, 0.2, 1.0][inst as usize % 3];
        let mut rng = seed::rng(seed::split_index(1, "infonce-fd", inst));
        let d = 6;
        let q = unit(&mut rng, d);
        let k = unit(&mut rng, d);
        let negs: Vec<Vec<f64>> = (0..rng.gen_range(1..6)).map(|_| unit(&mut rng, d)).collect();
        let refs: Vec<&[f64]> = negs.iter().map(|v| v.as_slice()).collect();
        let g = infonce_grad(&q, &k, &refs, tau).unwrap();

        for i in 0..d {
            let fd = |v: &[f64], which: usize| {
                let mut lo = v.to_vec();
                let mut hi = v.to_vec();
                lo[i] -= STEP;
                hi[i] += STEP;
                let eval = |x: &[f64]| match which {
                    0 => infonce(x, &k, &refs, tau).unwrap(),
                    _ => infonce(&q, x, &refs, tau).unwrap(),
                };
                (eval(&hi) - eval(&lo)) / (2.0 * STEP)
            };
            worst = worst.max(rel_err(g.d_query[i], fd(&q, 0)));
            worst = worst.max(rel_err(g.d_key[i], fd(&k, 1)));
            for (n, dn) in g.d_negatives.iter().enumerate() {
                let mut lo = negs.clone();
                let mut hi = negs.clone();
                lo[n][i] -= STEP;
                hi[n][i] += STEP;
                let l = |set: &Vec<Vec<f64>>| {
                    let r: Vec<&[f64]> = set.iter().map(|v| v.as_slice()).collect();
                    infonce(&q, &k, &r, tau).unwrap()
                };
                worst = worst.max(rel_err(dn[i], (l(&hi) - l(&lo)) / (2.0 * STEP)));
            }
        }
    }
    assert!(worst <= TOL, "max relative error {worst:e}");
}

#[test]
fn encoder_gradient_matches_finite_differences() {
    let dims = dims();
    let mut worst: f64 = 0.0;
    let mut draws = 0u64;
    for inst in 0..100u64 {
        let tau = [0.07, 0.2, 1.0][inst as usize % 3];
        // Redraw the rare instance whose output is exactly zero, where
        // normalization is undefined.
        let (params, x, mut rng) = loop {
            draws += 1;
            let mut rng = seed::rng(seed::split_index(2, "encoder-fd", draws));
            let mut params = EncoderParams::init(dims, draws).unwrap();
            // Nonzero biases keep pre-activations off the ReLU kink at 0.
            for layer in &mut params.layers {
                layer.bias.iter_mut().for_each(|b| *b = rng.gen_range(-0.2..0.2));
            }
            let x: Vec<f64> = (0..dims.input_dim()).map(|_| rng.gen_range(-0.5..0.5)).collect();
            if forward(&params, &x).is_ok() {
                break (params, x, rng);
            }
        };
        let k = unit(&mut rng, dims.embed);
        let negs: Vec<Vec<f64>> = (0..4).map(|_| unit(&mut rng, dims.embed)).collect();
        let refs: Vec<&[f64]> = negs.iter().map(|v| v.as_slice()).collect();
        let loss = |p: &EncoderParams| {
            let z = forward(p, &x).unwrap().embedding();
            infonce(z.as_slice(), &k, &refs, tau).unwrap()
        };

        let cache = forward(&params, &x).unwrap();
        let g = infonce_grad(cache.embedding().as_slice(), &k, &refs, tau).unwrap();
        let mut grads = EncoderParams::zeros(dims);
        backward(&params, &cache, &g.d_query, 1.0, &mut grads);
        let analytic: Vec<f64> = grads.blocks().flatten().copied().collect();
        let flat: Vec<f64> = params.blocks().flatten().copied().collect();

        for (i, a) in analytic.iter().enumerate() {
            let mut lo = flat.clone();
            let mut hi = flat.clone();
            lo[i] -= STEP;
            hi[i] += STEP;
            let n = (loss(&EncoderParams::from_blocks(dims, &hi).unwrap())
                - loss(&EncoderParams::from_blocks(dims, &lo).unwrap()))
                / (2.0 * STEP);
            worst = worst.max(rel_err(*a, n));
        }
    }
    assert!(worst <= TOL, "max relative error {worst:e}");
}
