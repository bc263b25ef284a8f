use cpm_core::inference::{conditional_distribution, conditional_median};
use cpm_core::rng::{stream_rng, Stream};
use cpm_core::simulate::{simulate_dataset, true_conditional, Residual, ScenarioSpec, Transform};
use cpm_core::{fit_cpm, FitOptions, LinkFamily};
use rand::Rng;

#[test]
fn dbg_exp_medians() {
    let beta = vec![0.5, 0.6, 0.4, 0.5, 0.3, 0.45, 0.35, 0.55, 0.25, 0.4];
    let seed = 131u64;
    let spec = ScenarioSpec {
        n: 10_000, p: 10,
        transform: Transform::Exp,
        residual: Residual::Logistic,
        beta: Some(beta.clone()),
        seed,
    };
    let sim = simulate_dataset(&spec).unwrap();
    let whole = fit_cpm(&sim.data, LinkFamily::Logit, &FitOptions::default()).unwrap();
    let mut pick = stream_rng(seed + 1, Stream::MonteCarlo);
    for _ in 0..10 {
        let row = pick.gen_range(0..sim.data.n());
        let x0: Vec<f64> = (0..10).map(|j| sim.data.x[[row, j]]).collect();
        let eta0: f64 = beta.iter().zip(&x0).map(|(b, x)| b * x).sum();
        let (_, true_median) = true_conditional(&spec, &x0, 100_000).unwrap();
        let dist = conditional_distribution(&whole, &x0).unwrap();
        let med = conditional_median(&dist);
        // where does the fitted cdf cross 0.5 in eta terms?
        let fitted_eta_at_med = whole.beta.iter().zip(&x0).map(|(b, x)| b * x).sum::<f64>();
        println!("row {row}: eta0={eta0:.4} exp(eta0)={:.4} truth_mc={true_median:.4} fitted={med:.4} rel={:.3} beta_eta={fitted_eta_at_med:.4}",
            eta0.exp(), (med - true_median).abs() / true_median.abs());
    }
    // grid sparsity near the problem medians
    let m = whole.distinct.len();
    println!("grid M={m}, y range [{:.4}, {:.4}]", whole.distinct[0], whole.distinct[m-1]);
}
