// Compiles a decision list to a reduced OBDD and explains one of its
// predictions.

use std::error::Error;

use xpg::{compile_dl, enumerate_xps, parse_dl, FeatureValue, Instance, Xpg};

const RULES: &str = r#"[
    {"literals": [1, 2], "class": 1},
    {"literals": [-1, 2], "class": 0},
    {"literals": [], "class": 0}
]"#;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let dl = parse_dl(RULES)?;
    let bdd = compile_dl(&dl, None)?;
    println!("{} rules -> OBDD with {} internal nodes", dl.rules().len(), bdd.num_internal());
    assert!(bdd.is_reduced() && bdd.is_ordered());

    let dg = bdd.to_decision_graph();
    for bits in 0..4u32 {
        let x = [bits & 1 == 1, bits & 2 == 2];
        let v = Instance::new(x.iter().map(|&b| FeatureValue::Category(b as usize)).collect());
        println!("  x1={} x2={} -> {}", x[0] as u8, x[1] as u8, dg.classify_label(&v)?);
        assert_eq!(bdd.eval(&x), dl.eval(&x));
    }

    let v = Instance::new(vec![FeatureValue::Category(0), FeatureValue::Category(1)]);
    let e = enumerate_xps(&Xpg::build(&dg, &v)?);
    println!("why 0 at x1=0, x2=1? AXps {:?}, CXps {:?}", e.axps(), e.cxps());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("example failed");
}
