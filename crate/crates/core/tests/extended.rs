//! Wider-scope versions of the acceptance checks. The two slow ones are
//! ignored by default; run them with
//! `cargo test -p cotree-core --test extended -- --ignored`.

use cotree_core::analysis::{pair_leq, pair_leq_table, pi_map, LeqPTable};
use cotree_core::duality::{algebra_embedding, dual_algebra};
use cotree_core::morphism::leq_p;
use cotree_core::{enumerate_cotrees, CoTree};

#[test]
fn tau_grid_to_six() {
    for m in 0..7usize {
        for k in 0..7usize {
            for m2 in 0..7usize {
                for k2 in 0..7usize {
                    let a = CoTree::tau(m, k).unwrap();
                    let b = CoTree::tau(m2, k2).unwrap();
                    assert_eq!(
                        leq_p(&a, &b).is_some(),
                        m <= m2 && k <= k2,
                        "tau({m},{k}) vs tau({m2},{k2})"
                    );
                }
            }
        }
    }
}

#[test]
fn comb_oracle_to_ten_nodes() {
    for t in enumerate_cotrees(10) {
        assert_eq!(t.comb_number(), t.comb_number_bruteforce(), "{t:?}");
    }
}

#[test]
#[ignore = "takes ~10 s; covered at 5 nodes by the acceptance suite"]
fn fin_duality_to_six_nodes() {
    let trees: Vec<CoTree> = enumerate_cotrees(6).collect();
    let duals: Vec<_> = trees.iter().map(|t| dual_algebra(t.poset()).unwrap()).collect();
    for (i, a) in duals.iter().enumerate() {
        for (j, b) in duals.iter().enumerate() {
            assert_eq!(
                algebra_embedding(a, b).is_some(),
                leq_p(&trees[i], &trees[j]).is_some(),
                "{:?} vs {:?}",
                trees[i],
                trees[j]
            );
        }
    }
}

#[test]
#[ignore = "takes ~5 s; covered at 7 nodes by the acceptance suite"]
fn pi_reflection_to_eight_nodes() {
    let trees: Vec<CoTree> = enumerate_cotrees(8).collect();
    let table = LeqPTable::build(&trees);
    for n in [3usize, 4] {
        let members: Vec<&CoTree> = trees
            .iter()
            .filter(|t| !t.is_singleton() && t.in_t(n).unwrap())
            .collect();
        let images: Vec<_> = members.iter().map(|t| pi_map(t).unwrap()).collect();
        for (i, a) in images.iter().enumerate() {
            for (j, b) in images.iter().enumerate() {
                if pair_leq_table(a, b, &table) {
                    assert!(
                        table.leq(members[i].code(), members[j].code()),
                        "pi fails to reflect {} vs {}",
                        members[i].code(),
                        members[j].code()
                    );
                }
            }
        }
    }
}

#[test]
fn pair_leq_agrees_with_its_table_form() {
    let trees: Vec<CoTree> = enumerate_cotrees(5).collect();
    let table = LeqPTable::build(&trees);
    let images: Vec<_> = trees
        .iter()
        .filter(|t| !t.is_singleton())
        .map(|t| pi_map(t).unwrap())
        .collect();
    for a in &images {
        for b in &images {
            assert_eq!(pair_leq(a, b), pair_leq_table(a, b, &table));
        }
    }
}
