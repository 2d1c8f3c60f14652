// SPDX-License-Identifier: Apache-2.0

use std::sync::OnceLock;

use proptest::prelude::*;
use tpl_core::arith::kronecker;
use tpl_core::bqf::{class_group_structure, Discriminant};
use tpl_core::exec::Execution;
use tpl_core::quat::{build_algebra, maximal_order, right_ideal_classes, ShimuraSet};
use tpl_core::special::{alternative_embedding, base_embedding, cocycle_check, fibers, gross_point_fibers, phi_map};

const PRIMES: [u64; 6] = [2, 3, 7, 11, 23, 37];

fn sets() -> &'static [ShimuraSet] {
    static CELL: OnceLock<Vec<ShimuraSet>> = OnceLock::new();
    CELL.get_or_init(|| {
        PRIMES
            .iter()
            .map(|&q| right_ideal_classes(&maximal_order(&build_algebra(q).unwrap()).unwrap()).unwrap())
            .collect()
    })
}

/// A fundamental discriminant `-n` in which `q` is inert.
fn inert(n: i64, q: u64) -> Option<Discriminant> {
    let d = Discriminant::new(-n).ok()?;
    (kronecker(-n, q) == -1).then_some(d)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 40, ..ProptestConfig::default() })]

    #[test]
    fn fibers_count_gross_points(l in 0..PRIMES.len(), n in 3i64..800) {
        let set = &sets()[l];
        let Some(d) = inert(n, set.q()) else { return Ok(()) };
        let group = class_group_structure(d).unwrap();
        let emb = base_embedding(set, d).unwrap();
        let phi = phi_map(&group, &emb, set, Execution::Sequential).unwrap();
        prop_assert_eq!(phi[group.identity()], emb.base);
        let f = fibers(&phi, set.len());
        prop_assert_eq!(f.iter().sum::<u64>() as usize, group.order());
        prop_assert_eq!(f, gross_point_fibers(set, d).unwrap());
    }

    #[test]
    fn cocycle_holds(l in 0..PRIMES.len(), n in 3i64..400) {
        let set = &sets()[l];
        let Some(d) = inert(n, set.q()) else { return Ok(()) };
        let group = class_group_structure(d).unwrap();
        prop_assume!(group.order() <= 20);
        let emb = base_embedding(set, d).unwrap();
        let report = cocycle_check(&group, &emb, set, Execution::default()).unwrap();
        prop_assert_eq!(report.pairs, group.order() * group.order());
        prop_assert!(report.failures.is_empty());
    }

    #[test]
    fn fibers_do_not_depend_on_the_embedding(l in 0..PRIMES.len(), n in 3i64..800) {
        let set = &sets()[l];
        let Some(d) = inert(n, set.q()) else { return Ok(()) };
        let group = class_group_structure(d).unwrap();
        let emb = base_embedding(set, d).unwrap();
        let Ok(alt) = alternative_embedding(set, &emb) else { return Ok(()) };
        prop_assert_ne!(&alt.omega, &emb.omega);
        let a = phi_map(&group, &emb, set, Execution::Sequential).unwrap();
        let b = phi_map(&group, &alt, set, Execution::default()).unwrap();
        prop_assert_eq!(fibers(&a, set.len()), fibers(&b, set.len()));
    }
}

#[test]
fn split_discriminants_have_no_embedding() {
    let set = &sets()[3];
    for n in [7, 19, 35] {
        let d = Discriminant::new(-n).unwrap();
        assert!(base_embedding(set, d).is_err(), "-{n} at q = 11");
    }
}
