//! Feed one utility stream through every budget manager and compare the
//! realized labeling rates with the target budget.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use rvc_stream::budget::{
    quantile_decide, random_decide, split_decide, varun_decide, QuantileFilterState, SpentState,
    VarUnState,
};
use rvc_stream::core::RngSeed;

fn main() {
    let steps = 5000;
    println!(
        "{:>8} {:>10} {:>10} {:>10} {:>10}",
        "budget", "varun", "split", "random", "quantile"
    );
    for b in [0.05, 0.1, 0.2, 0.4] {
        let mut rng = RngSeed(7).stream(0);
        let mut varun = VarUnState::default();
        let mut split = VarUnState::default();
        let mut random = SpentState::default();
        let mut quantile = QuantileFilterState::default();
        let mut counts = [0usize; 4];
        for _ in 0..steps {
            // bounded utility for the threshold managers, unbounded for the
            // quantile filter (it never assumes a fixed range)
            let u: f64 = rng.gen();
            let z: f64 = StandardNormal.sample(&mut rng);
            let eta: f64 = rng.gen();
            let (l, s) = varun_decide(varun, u, b);
            varun = s;
            counts[0] += l as usize;
            let (l, s) = split_decide(split, u, b, 0.5, eta, &mut rng);
            split = s;
            counts[1] += l as usize;
            let (l, s) = random_decide(random, u, b);
            random = s;
            counts[2] += l as usize;
            let (l, s) = quantile_decide(quantile, z.abs() * 3.0, b);
            quantile = s;
            counts[3] += l as usize;
        }
        let rate = |c: usize| c as f64 / steps as f64;
        println!(
            "{b:>8.2} {:>10.3} {:>10.3} {:>10.3} {:>10.3}",
            rate(counts[0]),
            rate(counts[1]),
            rate(counts[2]),
            rate(counts[3])
        );
    }
}
