// Contrastive explanations of a decision tree read directly off its paths,
// compared with the general enumeration.

use std::error::Error;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::SeedableRng;
use xpg::synth::{random_instance, random_tree, ModelSpec};
use xpg::{enumerate_tree_cxps, enumerate_xps, Xpg};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let mut rng = StdRng::seed_from_u64(11);
    for nodes in [50, 500, 5000] {
        let spec = ModelSpec { features: 16, max_domain: 4, max_nodes: nodes, classes: 2 };
        let dt = random_tree(&mut rng, &spec);
        let v = random_instance(&mut rng, &dt);
        let x = Xpg::build(&dt, &v)?;

        let t = Instant::now();
        let listed = enumerate_tree_cxps(&x)?;
        let fast = t.elapsed();
        let t = Instant::now();
        let enumerated = enumerate_xps(&x).cxps();
        let slow = t.elapsed();

        assert_eq!(listed, enumerated);
        println!(
            "{:>5} nodes: {:>3} CXps, path listing {:>8.1} us, full enumeration {:>8.1} us",
            dt.nodes().len(),
            listed.len(),
            fast.as_secs_f64() * 1e6,
            slow.as_secs_f64() * 1e6
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("example failed");
}
