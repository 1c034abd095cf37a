use mapda::assembly::{predict_family, ClosedForm};
use mapda::baselines::{baseline_metrics, BaselineSpec};
use mapda::{
    construct_knapsack, construct_knapsack_best_shift, construct_merged, construct_sub_network, dof_upper_bound, metrics, predict_metrics, verify,
    verify_compact, FilledArray, Mapda, Solver, SystemParams,
};
use num_bigint::BigInt;
use num_rational::BigRational;

fn params(n: usize, r: usize, t: usize, l: usize, b: usize) -> SystemParams {
    SystemParams::new(n, r, t, l, b).unwrap()
}

fn int(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

#[test]
fn lambda5_knapsack_construction() {
    let c = construct_knapsack(&params(5, 3, 1, 2, 1), Solver::Dp).unwrap();
    let rep = verify(&c.mapda);
    assert!(rep.valid, "{:?}", rep.failures());
    let m = metrics(&c.mapda).unwrap();
    assert_eq!(m.tuple(), Some((10, 15, 9, 10)));
    assert_eq!(m.sum_dof, int(6));
    assert!(m.per_symbol_counts.unwrap().iter().all(|&r| r == 6));
    assert_eq!(c.filled.pi().unwrap(), 3);
}

#[test]
fn lambda6_merged_construction() {
    let c = construct_merged(&params(6, 3, 2, 3, 2)).unwrap();
    assert!(verify(&c.mapda).valid);
    let m = metrics(&c.mapda).unwrap();
    assert_eq!(m.tuple(), Some((20, 45, 36, 10)));
    assert_eq!(m.sum_dof, int(18));
    let closed = predict_metrics(&c.params, ClosedForm::Merged).unwrap();
    assert_eq!((closed.tuple(), closed.sum_dof), (m.tuple(), m.sum_dof));
}

#[test]
fn merged_construction_rejects_bad_parameters() {
    assert!(construct_merged(&params(6, 3, 2, 4, 2)).is_err());
    assert!(construct_merged(&params(7, 3, 2, 3, 2)).is_err());
    assert!(construct_merged(&params(6, 3, 2, 3, 1)).is_err());
}

#[test]
fn optimal_constructions_meet_the_ceiling() {
    for (n, l, f, g) in [(6, 5, 105u64, 14i64), (7, 7, 189, 18)] {
        let c = construct_knapsack(&params(n, 2, 2, l, 0), Solver::Optimal).unwrap();
        assert!(verify(&c.mapda).valid);
        let m = metrics(&c.mapda).unwrap();
        assert_eq!(m.subpacketization, f.into());
        assert_eq!(m.sum_dof, int(g));
        assert_eq!(m.sum_dof, dof_upper_bound(&c.mapda).unwrap());
    }
}

#[test]
fn subnetwork_construction_matches_formulas() {
    let p = params(9, 3, 2, 4, 0);
    let c = construct_sub_network(&p, 6).unwrap();
    assert!(verify(&c.mapda).valid);
    let m = metrics(&c.mapda).unwrap();
    assert_eq!(m.tuple(), Some((84, 144, 84, 252)));
    assert_eq!(m.sum_dof, int(20));
    let closed = predict_metrics(&p, ClosedForm::Single { lambda_prime: 6 }).unwrap();
    let pr = baseline_metrics(&BaselineSpec::Pr { nodes: 9, access_degree: 3, t: 2, antennas: 4 }).unwrap();
    assert_eq!(closed.tuple(), m.tuple());
    assert_eq!(pr.tuple(), m.tuple());
    assert!(construct_sub_network(&p, 7).is_err());
    assert!(construct_sub_network(&p, 4).is_err());
}

#[test]
fn predictions_match_constructions() {
    for n in 4..=7 {
        for r in 1..n.min(4) {
            for t in 1..=(n - r).min(3) {
                for b in 0..r {
                    for l in [1, 2, 3, 5] {
                        let p = params(n, r, t, l, b);
                        for solver in [Solver::Dp, Solver::Greedy] {
                            let c = construct_knapsack(&p, solver).unwrap();
                            let m = metrics(&c.mapda).unwrap();
                            let pred = predict_family(&p, c.family.as_ref().unwrap()).unwrap();
                            assert_eq!(m.tuple(), pred.tuple(), "{p:?} {solver:?}");
                            if solver == Solver::Greedy {
                                let closed = predict_metrics(&p, ClosedForm::Greedy).unwrap();
                                assert_eq!(closed.tuple(), pred.tuple(), "{p:?}");
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn automatic_shift_picks_largest_dof() {
    let p = params(6, 3, 1, 3, 0);
    let c = construct_knapsack_best_shift(&p, Solver::Dp).unwrap();
    let best = metrics(&c.mapda).unwrap();
    for b in 0..3 {
        let other = metrics(&construct_knapsack(&p.with_shift(b).unwrap(), Solver::Dp).unwrap().mapda).unwrap();
        assert!(other.sum_dof < best.sum_dof || (other.sum_dof == best.sum_dof && other.subpacketization >= best.subpacketization));
    }
}

#[test]
fn compact_form_round_trips_and_verifies() {
    let c = construct_knapsack(&params(6, 3, 2, 3, 2), Solver::Dp).unwrap();
    let json = c.filled.to_compact_json().unwrap();
    let (back, declared) = FilledArray::from_compact_json(&json).unwrap();
    assert_eq!(back.pi().unwrap(), c.filled.pi().unwrap());
    let rep = verify_compact(&back, declared);
    assert!(rep.valid, "{:?}", rep.failures());
    assert_eq!(metrics(&mapda::replicate(&back).unwrap()).unwrap().tuple(), metrics(&c.mapda).unwrap().tuple());
    let expanded = Mapda::from_json(&c.mapda.to_json()).unwrap();
    assert_eq!(expanded, c.mapda);
}

#[test]
fn compact_verification_agrees_with_expanded() {
    let c = construct_knapsack(&params(6, 2, 2, 3, 1), Solver::Greedy).unwrap();
    let a = verify(&c.mapda);
    let b = verify_compact(&c.filled, None);
    assert!(a.valid && b.valid);
    assert_eq!(a.c1.modal_stars, b.c1.modal_stars);
}
