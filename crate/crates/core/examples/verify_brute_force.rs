// Cross-checks the enumeration against an exhaustive sweep of the feature
// space on a handful of random models.

use std::error::Error;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use xpg::synth::{random_dag, random_instance, random_tree, ModelSpec};
use xpg::{enumerate_xps, BruteForce, Caps, Xpg};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let mut rng = StdRng::seed_from_u64(3);
    for k in 0..6 {
        let spec = ModelSpec {
            features: rng.gen_range(3..=7),
            max_domain: 4,
            max_nodes: 60,
            classes: 2,
        };
        let dg = if k % 2 == 0 { random_tree(&mut rng, &spec) } else { random_dag(&mut rng, &spec) };
        let v = random_instance(&mut rng, &dg);
        let e = enumerate_xps(&Xpg::build(&dg, &v)?);
        let bf = BruteForce::with_caps(&dg, &v, Caps::default())?;
        let agree = e.axps() == bf.axps()? && e.cxps() == bf.cxps()?;
        println!(
            "{} m={} nodes={:>2}: {} AXps, {} CXps, brute force {}",
            if dg.is_tree() { "tree" } else { "dag " },
            spec.features,
            dg.nodes().len(),
            e.axps().len(),
            e.cxps().len(),
            if agree { "agrees" } else { "DISAGREES" }
        );
        assert!(agree);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("example failed");
}
