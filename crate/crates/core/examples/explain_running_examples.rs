// One AXp and one CXp for the two bundled example models.
//
// ```text
// cargo run --example explain_running_examples
// ```

use std::error::Error;

use xpg::{find_axp, find_cxp, fixtures, DeletionOrder, FeatureSet, Instance, Xpg};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let dt = fixtures::hardware_tree();
    let v = Instance::parse(&dt, &["O", "L", "Y", "P"])?;
    println!("decision tree predicts {} for {:?}", dt.classify_label(&v)?, v.render(&dt));

    let x = Xpg::build(&dt, &v)?;
    let all = FeatureSet::full(dt.num_features());
    let axp = find_axp(&x, &all, &DeletionOrder::Ascending)?;
    println!("AXp: {}", describe(&dt, &axp.features));
    assert_eq!(axp.features, FeatureSet::from([0, 3]));

    for order in [DeletionOrder::Ascending, DeletionOrder::Descending] {
        let cxp = find_cxp(&x, &all, &order)?;
        println!("CXp ({order:?} deletion): {}", describe(&dt, &cxp.features));
    }

    let mdd = fixtures::rgb_omdd();
    let v = Instance::parse(&mdd, &["0", "1", "2"])?;
    let x = Xpg::build(&mdd, &v)?;
    println!("\nOMDD predicts {} for {:?}", mdd.classify_label(&v)?, v.render(&mdd));
    let axp = find_axp(&x, &FeatureSet::full(3), &DeletionOrder::Ascending)?;
    println!("AXp: {}", describe(&mdd, &axp.features));
    assert_eq!(axp.features, FeatureSet::from([0]));
    Ok(())
}

fn describe(dg: &xpg::DecisionGraph, set: &FeatureSet) -> String {
    let names: Vec<&str> = set.iter().map(|i| dg.features()[i].name.as_str()).collect();
    format!("{{{}}}", names.join(", "))
}

#[allow(dead_code)]
fn main() {
    run_example().expect("example failed");
}
