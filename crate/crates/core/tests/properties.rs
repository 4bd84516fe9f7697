//! Property tests over randomly generated models.

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use xpg::dlc::compile_dl;
use xpg::enumerate::{check_duality, enumerate_tree_cxps, enumerate_with, enumerate_xps, union_of, EnumerationConfig};
use xpg::explain::{find_axp, find_cxp, DeletionOrder, XpKind};
use xpg::features::FeatureSet;
use xpg::model::{DecisionGraph, Instance, NodeId};
use xpg::schema::{from_doc, to_doc, NodeDoc};
use xpg::synth::{random_dag, random_dl, random_instance, random_numeric_tree, random_svector, random_tree, ModelSpec};
use xpg::validate::validate;
use xpg::verify::BruteForce;
use xpg::xpg::{SVector, Xpg};

fn small_spec(rng: &mut StdRng, max_features: usize) -> ModelSpec {
    ModelSpec {
        features: rng.gen_range(1..=max_features),
        max_domain: rng.gen_range(2..=4),
        max_nodes: rng.gen_range(3..=50),
        classes: rng.gen_range(2..=3),
    }
}

fn model(seed: u64, max_features: usize) -> (DecisionGraph, Instance) {
    let mut rng = StdRng::seed_from_u64(seed);
    let spec = small_spec(&mut rng, max_features);
    let dg = match seed % 3 {
        0 => random_tree(&mut rng, &spec),
        1 => random_dag(&mut rng, &spec),
        _ => random_numeric_tree(&mut rng, spec.features, spec.max_nodes),
    };
    let v = random_instance(&mut rng, &dg);
    (dg, v)
}

fn points(dg: &DecisionGraph) -> Vec<Instance> {
    let mut out = vec![Vec::new()];
    for cells in dg.representative_points() {
        out = out
            .into_iter()
            .flat_map(|p: Vec<_>| {
                cells.iter().map(move |c| {
                    let mut q = p.clone();
                    q.push(*c);
                    q
                })
            })
            .collect();
    }
    out.into_iter().map(Instance::new).collect()
}

fn sorted(mut sets: Vec<FeatureSet>) -> Vec<FeatureSet> {
    sets.sort();
    sets
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn generated_models_validate(seed in any::<u64>()) {
        let (dg, _) = model(seed, 8);
        let report = validate(&dg);
        prop_assert!(report.is_ok(), "{:?}", report.errors);
    }

    #[test]
    fn classify_is_total(seed in any::<u64>()) {
        let (dg, _) = model(seed, 5);
        for p in points(&dg) {
            prop_assert!(dg.classify(&p).is_ok());
        }
    }

    #[test]
    fn every_terminal_is_reachable(seed in any::<u64>()) {
        let (dg, _) = model(seed, 5);
        let reached: std::collections::HashSet<usize> =
            points(&dg).iter().map(|p| dg.terminal_for(p).unwrap()).collect();
        for (k, node) in dg.nodes().iter().enumerate() {
            if dg.out_edges(k).is_empty() {
                prop_assert!(reached.contains(&k), "terminal {} unreached", node.id);
            }
        }
    }

    #[test]
    fn classify_ignores_node_numbering(seed in any::<u64>()) {
        let (dg, _) = model(seed, 5);
        let mut rng = StdRng::seed_from_u64(seed ^ 0x5eed);
        let mut doc = to_doc(&dg);
        let mut fresh: Vec<i64> = (0..doc.nodes.len() as i64).map(|k| 1000 - 7 * k).collect();
        fresh.shuffle(&mut rng);
        let rename = |id: &NodeId| -> NodeId {
            let k = dg.node_index(id).unwrap();
            NodeId::Int(fresh[k])
        };
        for n in &mut doc.nodes {
            match n {
                NodeDoc::Decision { id, .. } | NodeDoc::Terminal { id, .. } => *id = rename(id),
            }
        }
        for e in &mut doc.edges {
            e.from = rename(&e.from);
            e.to = rename(&e.to);
        }
        doc.root = rename(&doc.root);
        doc.nodes.shuffle(&mut rng);
        doc.edges.shuffle(&mut rng);
        let renamed = from_doc(&doc).unwrap();
        for p in points(&dg) {
            prop_assert_eq!(dg.classify(&p).unwrap(), renamed.classify(&p).unwrap());
        }
    }

    #[test]
    fn evaluation_is_monotone(seed in any::<u64>()) {
        let (dg, v) = model(seed, 10);
        let x = Xpg::build(&dg, &v).unwrap();
        let m = x.num_vars();
        let mut rng = StdRng::seed_from_u64(seed.wrapping_add(1));
        for _ in 0..20 {
            let s = random_svector(&mut rng, m);
            let mut t = s.clone();
            for b in t.0.iter_mut() {
                *b |= rng.gen_bool(0.3);
            }
            prop_assert!(s.precedes(&t));
            prop_assert!(!x.evaluate(&s) || x.evaluate(&t));
        }
        prop_assert!(x.evaluate(&SVector::ones(m)));
        if x.has_zero_terminal() {
            prop_assert!(!x.evaluate(&SVector::zeros(m)));
        }
    }

    #[test]
    fn complement_law(seed in any::<u64>()) {
        let (dg, v) = model(seed, 10);
        let x = Xpg::build(&dg, &v).unwrap();
        let m = x.num_vars();
        for bits in 0u32..(1 << m) {
            let mask: Vec<bool> = (0..m).map(|i| bits >> i & 1 == 1).collect();
            let free = FeatureSet::from_mask(&mask);
            prop_assert_eq!(x.reach_zero(&free), !x.evaluate(&SVector::freeing(&free, m)));
        }
    }

    #[test]
    fn extraction_is_sound_for_any_order(seed in any::<u64>()) {
        let (dg, v) = model(seed, 8);
        let x = Xpg::build(&dg, &v).unwrap();
        let m = x.num_vars();
        let mut rng = StdRng::seed_from_u64(seed.wrapping_mul(3));
        let mut perm: Vec<usize> = (0..m).collect();
        perm.shuffle(&mut rng);
        let bf = BruteForce::new(&dg, &v).unwrap();
        let axps = bf.axps().unwrap();
        let cxps = bf.cxps().unwrap();
        for order in [DeletionOrder::Ascending, DeletionOrder::Descending, DeletionOrder::Permutation(perm)] {
            let a = find_axp(&x, &FeatureSet::full(m), &order).unwrap();
            prop_assert!(a.is_valid_for(&x));
            prop_assert!(axps.contains(&a.features));
            if let Ok(c) = find_cxp(&x, &FeatureSet::full(m), &order) {
                prop_assert!(c.is_valid_for(&x));
                prop_assert!(cxps.contains(&c.features));
            } else {
                prop_assert!(cxps.is_empty());
            }
        }
    }

    #[test]
    fn enumeration_matches_brute_force(seed in any::<u64>()) {
        let (dg, v) = model(seed, 8);
        let x = Xpg::build(&dg, &v).unwrap();
        let e = enumerate_xps(&x);
        let bf = BruteForce::new(&dg, &v).unwrap();
        prop_assert_eq!(sorted(e.axps()), sorted(bf.axps().unwrap()));
        prop_assert_eq!(sorted(e.cxps()), sorted(bf.cxps().unwrap()));
    }

    #[test]
    fn duality_and_union(seed in any::<u64>()) {
        let (dg, v) = model(seed, 10);
        let x = Xpg::build(&dg, &v).unwrap();
        let e = enumerate_with(&x, EnumerationConfig { order: DeletionOrder::Descending, ..Default::default() });
        prop_assert!(check_duality(&e.axps(), &e.cxps()));
        prop_assert_eq!(union_of(&e.axps()), union_of(&e.cxps()));
        prop_assert_eq!(e.solve_calls, e.len() + 1);
    }

    #[test]
    fn brute_force_sets_are_dual(seed in any::<u64>()) {
        let (dg, v) = model(seed, 7);
        let bf = BruteForce::new(&dg, &v).unwrap();
        prop_assert!(check_duality(&bf.axps().unwrap(), &bf.cxps().unwrap()));
    }

    #[test]
    fn sufficiency_and_change_are_monotone(seed in any::<u64>()) {
        let (dg, v) = model(seed, 7);
        let bf = BruteForce::new(&dg, &v).unwrap();
        let m = dg.num_features();
        let mut rng = StdRng::seed_from_u64(seed.rotate_left(7));
        for _ in 0..10 {
            let small = random_svector(&mut rng, m).fixed();
            let mut big = small.clone();
            big.insert(rng.gen_range(0..m));
            prop_assert!(!bf.is_sufficient(&small).unwrap() || bf.is_sufficient(&big).unwrap());
            prop_assert!(!bf.can_change(&small).unwrap() || bf.can_change(&big).unwrap());
        }
    }

    #[test]
    fn tree_cxps_agree(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let spec = small_spec(&mut rng, 10);
        let dt = random_tree(&mut rng, &spec);
        let v = random_instance(&mut rng, &dt);
        let x = Xpg::build(&dt, &v).unwrap();
        let tree = enumerate_tree_cxps(&x).unwrap();
        let e = enumerate_xps(&x);
        prop_assert_eq!(sorted(tree), sorted(e.of_kind(XpKind::CXp).cloned().collect()));
    }

    #[test]
    fn compiled_lists_agree(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let n = rng.gen_range(1..=10);
        let rules = rng.gen_range(0..=8);
        let dl = random_dl(&mut rng, n, rules, 4);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let bdd = compile_dl(&dl, Some(&order)).unwrap();
        prop_assert!(bdd.is_reduced() && bdd.is_ordered());
        let dg = bdd.to_decision_graph();
        for bits in 0u32..(1 << n) {
            let x: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
            let fields: Vec<&str> = x.iter().map(|&b| if b { "1" } else { "0" }).collect();
            let want = dl.eval(&x);
            prop_assert_eq!(bdd.eval(&x), want);
            prop_assert_eq!(dg.classify(&Instance::parse(&dg, &fields).unwrap()).unwrap(), usize::from(want));
        }
    }
}
