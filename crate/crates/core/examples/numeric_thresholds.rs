// Explanations for a tree over real-valued features.

use std::error::Error;

use rand::rngs::StdRng;
use rand::SeedableRng;
use xpg::synth::{random_instance, random_numeric_tree};
use xpg::{enumerate_xps, BruteForce, Caps, Xpg};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let mut rng = StdRng::seed_from_u64(5);
    let dg = random_numeric_tree(&mut rng, 4, 31);
    println!("numeric tree with {} nodes", dg.nodes().len());
    for _ in 0..4 {
        let v = random_instance(&mut rng, &dg);
        let e = enumerate_xps(&Xpg::build(&dg, &v)?);
        println!("  {:?} -> class {}: AXps {:?}", v.render(&dg), dg.classify_label(&v)?, e.axps());
        let bf = BruteForce::with_caps(&dg, &v, Caps::default())?;
        assert_eq!(e.axps(), bf.axps()?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("example failed");
}
