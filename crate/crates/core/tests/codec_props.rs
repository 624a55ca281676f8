mod common;

use depbench::seqlab::{decode, encode, read_labels, write_labels, RepairPolicy};
use depbench::tree::{enumerate_trees, validate, DepTree, RootPolicy};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn tree(heads: Vec<usize>) -> DepTree {
    let rels = heads
        .iter()
        .map(|&h| if h == 0 { "root" } else { "dep" }.to_string())
        .collect();
    DepTree::new(heads, rels).unwrap()
}

fn counts(heads: &[usize]) -> (usize, usize) {
    let leftward = heads.iter().enumerate().filter(|&(i, &h)| h > i + 1).count();
    let rightward = heads.iter().enumerate().filter(|&(i, &h)| h != 0 && h < i + 1).count();
    (leftward, rightward)
}

#[test]
fn symbol_counts_match_arc_directions() {
    for n in 1..=6 {
        for heads in enumerate_trees(n, false).unwrap() {
            let labels = encode(&tree(heads.clone()));
            let (leftward, rightward) = counts(&heads);
            let sum =
                |f: fn(&depbench::seqlab::Brackets) -> usize| labels.iter().map(|l| f(&l.brackets)).sum::<usize>();
            assert_eq!(sum(|b| b.k_back), leftward, "{heads:?}");
            assert_eq!(sum(|b| b.has_lt as usize), leftward, "{heads:?}");
            assert_eq!(sum(|b| b.k_fwd), rightward, "{heads:?}");
            assert_eq!(sum(|b| b.has_gt as usize), rightward, "{heads:?}");
        }
    }
}

#[test]
fn nonprojective_trees_still_decode_to_trees() {
    for n in 1..=6 {
        for heads in enumerate_trees(n, false).unwrap() {
            let d = decode(&encode(&tree(heads.clone())), RepairPolicy::SingleRoot).unwrap();
            assert!(validate(d.tree.heads(), RootPolicy::Single).ok, "{heads:?}");
        }
    }
}

#[test]
fn label_files_round_trip() {
    let sequences: Vec<_> = enumerate_trees(4, true)
        .unwrap()
        .into_iter()
        .map(|h| encode(&tree(h)))
        .collect();
    assert_eq!(read_labels(&write_labels(&sequences)).unwrap(), sequences);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn random_projective_trees_round_trip(seed in any::<u64>(), n in 1usize..=40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = tree(common::random_projective_tree(&mut rng, n));
        let d = decode(&encode(&t), RepairPolicy::SingleRoot).unwrap();
        prop_assert_eq!(d.tree, t);
        prop_assert!(d.repairs.is_empty());
    }

    #[test]
    fn multi_root_repair_yields_forests(seed in any::<u64>(), n in 1usize..=30) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = tree(common::random_tree(&mut rng, n));
        let d = decode(&encode(&t), RepairPolicy::MultiRoot).unwrap();
        prop_assert!(validate(d.tree.heads(), RootPolicy::Multiple).ok);
    }
}
