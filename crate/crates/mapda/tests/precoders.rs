//! Zero-forcing precoders against a pseudo-inverse oracle.

use mapda::delivery::{build_precoders, Channel};
use mapda::mapda::Entry;
use mapda::placement::SystemParams;
use mapda::{construct_knapsack, construct_sub_network, Mapda, Solver};
use nalgebra::{DMatrix, DVector};

fn check_against_pinv(m: &Mapda, seed: u64) {
    let ch = Channel::gaussian(m.cols(), m.antennas(), seed);
    for s in 1..=m.symbols() {
        let plan = build_precoders(m, s, &ch).unwrap();
        for (k, &(user, row)) in plan.served.iter().enumerate() {
            let mut targets = vec![user];
            targets.extend(plan.served.iter().filter(|&&(j, _)| j != user && m.get(row, j) != Entry::Star).map(|&(j, _)| j));
            let a = DMatrix::from_fn(targets.len(), m.antennas(), |i, c| ch.row(targets[i])[c]);
            let mut e1 = DVector::zeros(targets.len());
            e1[0] = 1.0;
            let want = a.pseudo_inverse(1e-12).unwrap() * e1;
            for (x, y) in plan.precoders[k].iter().zip(want.iter()) {
                assert!((x - y).abs() < 1e-9, "symbol {s} user {user}: {x} vs {y}");
            }
        }
    }
}

#[test]
fn knapsack_construction_matches_pseudo_inverse() {
    let p = SystemParams::new(5, 3, 1, 2, 1).unwrap();
    let c = construct_knapsack(&p, Solver::Dp).unwrap();
    for seed in 0..5 {
        check_against_pinv(&c.mapda, seed);
    }
}

#[test]
fn optimal_construction_matches_pseudo_inverse() {
    let p = SystemParams::new(6, 2, 2, 5, 0).unwrap();
    let c = construct_knapsack(&p, Solver::Optimal).unwrap();
    check_against_pinv(&c.mapda, 42);
}

#[test]
fn sub_network_construction_matches_pseudo_inverse() {
    let p = SystemParams::new(7, 2, 2, 3, 0).unwrap();
    let c = construct_sub_network(&p, 5).unwrap();
    check_against_pinv(&c.mapda, 9);
}
