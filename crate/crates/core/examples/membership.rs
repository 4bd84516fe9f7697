// Which features take part in some explanation?

use std::error::Error;

use xpg::{fixtures, membership, Instance, MembershipKind, Xpg};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    for (dg, row) in [
        (fixtures::hardware_tree(), vec!["O", "L", "Y", "P"]),
        (fixtures::rgb_omdd(), vec!["0", "1", "2"]),
    ] {
        let v = Instance::parse(&dg, &row)?;
        let x = Xpg::build(&dg, &v)?;
        println!("instance {row:?} ({})", if x.is_tree() { "tree" } else { "DAG" });
        for (i, f) in dg.features().iter().enumerate() {
            let member = membership(&x, i, MembershipKind::Either);
            println!("  {:<13} {}", f.name, if member { "relevant" } else { "irrelevant" });
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("example failed");
}
