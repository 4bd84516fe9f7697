// Lists every AXp and CXp of an instance with the SAT-oracle loop and
// checks the hitting-set duality between the two families.

use std::error::Error;

use rand::rngs::StdRng;
use rand::SeedableRng;
use xpg::synth::{random_dag, random_instance, ModelSpec};
use xpg::{check_duality, enumerate_xps, fixtures, union_of, Instance, Xpg};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let dt = fixtures::hardware_tree();
    let v = Instance::parse(&dt, &["O", "L", "Y", "P"])?;
    let x = Xpg::build(&dt, &v)?;
    let all = enumerate_xps(&x);
    for rec in &all.records {
        println!("{:>3}  {:?}  ({:.1} us)", rec.explanation.kind, rec.explanation.features, rec.elapsed.as_secs_f64() * 1e6);
    }
    println!("{} explanations, {} oracle calls", all.len(), all.solve_calls);

    let mut rng = StdRng::seed_from_u64(7);
    let spec = ModelSpec { features: 8, max_domain: 3, max_nodes: 50, classes: 3 };
    let dg = random_dag(&mut rng, &spec);
    let v = random_instance(&mut rng, &dg);
    let x = Xpg::build(&dg, &v)?;
    let e = enumerate_xps(&x);
    let (axps, cxps) = (e.axps(), e.cxps());
    println!("\nrandom DAG with {} nodes: {} AXps, {} CXps", dg.nodes().len(), axps.len(), cxps.len());
    println!("AXps: {axps:?}");
    println!("CXps: {cxps:?}");
    assert!(check_duality(&axps, &cxps));
    assert_eq!(union_of(&axps), union_of(&cxps));
    assert_eq!(e.solve_calls, e.len() + 1);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("example failed");
}
