use std::collections::BTreeSet;

use mapda::combinatorics::{binom, binom_big, cyclic_regular_design, enumerate_subsets, Subset, SubsetRanker};
use mapda::knapsack::{build_instance, rotate_family, solve_brute, solve_dp, KnapsackInstance, KnapsackItem};
use mapda::placement::{group_stats, partition_columns, user_retrieve_array, SystemParams};
use proptest::prelude::*;

fn system() -> impl Strategy<Value = SystemParams> {
    (3usize..=8)
        .prop_flat_map(|n| (Just(n), 1..n))
        .prop_flat_map(|(n, r)| (Just(n), Just(r), 1..=n - r, 1usize..=12, 0..r))
        .prop_map(|(n, r, t, l, b)| SystemParams::new(n, r, t, l, b).unwrap())
}

fn anchor_for(p: &SystemParams, pick: usize) -> Subset {
    let all = enumerate_subsets(Subset::full(p.num_nodes), p.anchor_size());
    all[pick % all.len()]
}

fn instance() -> impl Strategy<Value = KnapsackInstance> {
    (prop::collection::vec((1u64..=6, 0u64..=20), 0..=14), 0u64..=25).prop_map(|(items, capacity)| KnapsackInstance {
        anchor: Subset::EMPTY,
        items: items
            .into_iter()
            .map(|(weight, value)| KnapsackItem { group: Subset::EMPTY, level: 0, weight, value, col_nulls: 1 })
            .collect(),
        capacity,
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pascal_rule(n in 1u64..60, k in 1i64..60) {
        prop_assert_eq!(binom(n, k).unwrap() as u128, binom(n - 1, k - 1).unwrap() as u128 + binom(n - 1, k).unwrap() as u128);
        prop_assert_eq!(binom_big(n, k), num_bigint::BigUint::from(binom(n, k).unwrap()));
    }

    #[test]
    fn ranks_follow_lex_order(bits in any::<u16>(), other in any::<u16>()) {
        let a = Subset::from_bits(bits as u64);
        let b = Subset::from_bits(other as u64);
        if a.len() == b.len() {
            let r = SubsetRanker::new(16, a.len()).unwrap();
            prop_assert_eq!(r.rank(a).cmp(&r.rank(b)), a.cmp(&b));
        }
    }

    #[test]
    fn partition_covers_each_column_once(p in system(), pick in any::<usize>()) {
        let a = anchor_for(&p, pick);
        let parts = partition_columns(&p, a).unwrap();
        let mut seen = BTreeSet::new();
        for g in &parts {
            for d in &g.columns {
                prop_assert_eq!(d.difference(a), g.group);
                prop_assert!(seen.insert(*d));
            }
        }
        prop_assert_eq!(seen.len() as u64, p.users());
    }

    #[test]
    fn group_stats_match_tallies(p in system(), pick in any::<usize>()) {
        let a = anchor_for(&p, pick);
        let u = user_retrieve_array(&p).unwrap();
        let rows: Vec<usize> = (0..u.rows()).filter(|&i| u.row_labels()[i].is_subset_of(a)).collect();
        for g in partition_columns(&p, a).unwrap() {
            let cols: Vec<usize> = (0..u.cols()).filter(|&j| g.columns.contains(&u.col_labels()[j])).collect();
            let sub = u.select(&rows, &cols);
            let st = group_stats(&p, a, g.group).unwrap();
            prop_assert_eq!(st.columns as usize, sub.cols());
            for c in 0..sub.cols() {
                prop_assert_eq!(st.nulls_per_col as usize, sub.rows() - sub.stars_in_col(c));
            }
            for r in 0..sub.rows() {
                let nulls = sub.cols() - sub.stars_in_row(r);
                prop_assert!(nulls == 0 || nulls as u64 == st.nulls_per_row);
            }
        }
    }

    #[test]
    fn dp_agrees_with_brute_force(inst in instance()) {
        let dp = solve_dp(&inst).unwrap();
        let brute = solve_brute(&inst).unwrap();
        prop_assert_eq!(dp.phi, brute.phi);
        prop_assert_eq!(&dp.selected, &brute.selected);
    }

    #[test]
    fn rotations_preserve_value_and_balance(p in system()) {
        let inst = build_instance(&p, p.canonical_anchor()).unwrap();
        let base = solve_dp(&inst).unwrap();
        let fam = rotate_family(&inst, &base).unwrap();
        let mut hits = vec![0u64; inst.items.len()];
        for h in 0..fam.ell {
            let rot = fam.rotation(h);
            let scored = inst.evaluate(&rot.selected).unwrap();
            prop_assert_eq!((scored.phi, scored.psi), (base.phi, base.psi));
            for (i, &x) in rot.selected.iter().enumerate() {
                hits[i] += x as u64;
            }
        }
        for lv in &fam.levels {
            let want = fam.ell * lv.chosen / lv.count;
            for i in lv.start..lv.start + lv.count as usize {
                prop_assert_eq!(hits[i], want);
            }
        }
    }

    #[test]
    fn value_per_weight_decreases_with_level(p in system()) {
        let inst = build_instance(&p, p.canonical_anchor()).unwrap();
        let levels = inst.levels();
        for w in levels.windows(2) {
            let (x, y) = (inst.items[w[0].start], inst.items[w[1].start]);
            prop_assert!(x.value as u128 * y.weight as u128 > y.value as u128 * x.weight as u128);
        }
    }

    #[test]
    fn cyclic_designs_are_regular(v in 1u64..=12, k in 1u64..=12) {
        prop_assume!(k <= v);
        let d = cyclic_regular_design(v, k).unwrap();
        let mut count = vec![0u64; v as usize + 1];
        for b in &d.blocks {
            prop_assert_eq!(b.len() as u64, k);
            prop_assert_eq!(b.iter().collect::<BTreeSet<_>>().len() as u64, k);
            for &x in b {
                count[x] += 1;
            }
        }
        prop_assert!(count[1..].iter().all(|&c| c == d.replication));
    }
}
