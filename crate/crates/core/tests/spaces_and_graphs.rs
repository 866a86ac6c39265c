use std::sync::Arc;

use proptest::prelude::*;
use treeprod::hyper_approx::{ApproxGraph, ContainmentMode, DEFAULT_SEED};
use treeprod::metric_space::{generate_space, validate_metric, Net, ScaleParams, SpaceKind};
use treeprod::rational::ratio;

fn kind() -> impl Strategy<Value = SpaceKind> {
    prop_oneof![
        (1u32..6).prop_map(|depth| SpaceKind::Cantor { depth }),
        (2u32..40).prop_map(|n| SpaceKind::Circle { n }),
        (2u32..7).prop_map(|n| SpaceKind::Grid { n }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn nets_are_separated_and_maximal(kind in kind(), den in 6i64..12) {
        let space = generate_space(kind).unwrap();
        prop_assert!(validate_metric(&space.rows()).is_ok());
        let scale = ScaleParams::for_space(&space, ratio(1, den), None).unwrap();
        for level in scale.k0()..=scale.max_level() + 1 {
            let net = Net::at_level(&space, &scale, level);
            for (i, &a) in net.centers.iter().enumerate() {
                for &b in &net.centers[i + 1..] {
                    prop_assert!(*space.dist(a, b) >= net.separation);
                }
            }
            for z in 0..space.len() {
                prop_assert!(net.centers.iter().any(|&c| *space.dist(z, c) < net.separation));
            }
        }
    }

    #[test]
    fn k0_brackets_the_diameter(kind in kind(), den in 6i64..20) {
        let space = generate_space(kind).unwrap();
        let r = ratio(1, den);
        let scale = ScaleParams::for_space(&space, r.clone(), None).unwrap();
        prop_assert!(*space.diam() < scale.scale(scale.k0()));
        prop_assert!(*space.diam() >= scale.scale(scale.k0() + 1));
    }
}

#[test]
fn approximation_suites_pass_on_small_spaces() {
    for kind in [
        SpaceKind::Cantor { depth: 3 },
        SpaceKind::Circle { n: 27 },
        SpaceKind::Grid { n: 4 },
    ] {
        let space = Arc::new(generate_space(kind).unwrap());
        let scale = ScaleParams::for_space(&space, ratio(1, 6), None).unwrap();
        let graph = ApproxGraph::build(space, scale, ContainmentMode::Certificate).unwrap();
        let dist = graph.distances();
        let report = graph.verify(&dist, DEFAULT_SEED);
        assert!(report.passed(), "{kind}: {report:#?}");
        let delta = graph.estimate_delta(&dist, DEFAULT_SEED);
        assert!(delta.exhaustive && delta.delta.to_f64() >= 0.0);
    }
}

#[test]
fn pointwise_mode_builds_the_same_vertices() {
    let space = Arc::new(generate_space(SpaceKind::Circle { n: 27 }).unwrap());
    let scale = ScaleParams::for_space(&space, ratio(1, 9), Some(2)).unwrap();
    let a = ApproxGraph::build(space.clone(), scale.clone(), ContainmentMode::Certificate).unwrap();
    let b = ApproxGraph::build(space, scale, ContainmentMode::Pointwise).unwrap();
    assert_eq!(a.vertices(), b.vertices());
    assert!(b.verify(&b.distances(), 1).passed());
}
