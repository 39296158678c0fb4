//! The greedy expansion can return a wider interval than the narrowest one
//! that reaches the same mass. This example finds such distributions.

use ordinal_conformal::methods::{exact_interval, greedy_interval, greedy_trace};
use ordinal_conformal::{Lambda, ScoreVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> ordinal_conformal::Result<()> {
    let f = ScoreVector::new(vec![0.30, 0.05, 0.35, 0.05, 0.25])?;
    let trace = greedy_trace(&f);
    println!("scores {:?}", f.probs());
    println!("greedy order {:?}", trace.order.iter().map(|y| y.0).collect::<Vec<_>>());
    for lam in [0.3, 0.6, 0.7, 0.9] {
        let l = Lambda::new(lam)?;
        println!("lambda={lam}: greedy {:?}, exact {:?}", greedy_interval(&f, l), exact_interval(&f, l));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut wider, total) = (0, 20_000);
    for _ in 0..total {
        let w: Vec<f64> = (0..6).map(|_| rng.random::<f64>()).collect();
        let f = ScoreVector::from_weights(w)?;
        let l = Lambda::new(rng.random::<f64>())?;
        let (g, e) = (greedy_interval(&f, l), exact_interval(&f, l));
        assert!(f.mass(g) + 1e-12 >= f.mass(e).min(l.value().unwrap()));
        if g.len() > e.len() {
            wider += 1;
        }
    }
    println!("\ngreedy wider than exact in {wider} of {total} random K=6 cases");
    Ok(())
}
