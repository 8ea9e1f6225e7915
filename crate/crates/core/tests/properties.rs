use proptest::prelude::*;

use shiftcolor::coloring::{Color, PartialColoring};
use shiftcolor::group::{Element, Group};
use shiftcolor::ideal::{Ideal, IdealSpec};
use shiftcolor::join::{check_join_tuple, derived_join_from_local, JoinFn};
use shiftcolor::oracle::{extension_oracle, Outcome};
use shiftcolor::packing::RadiusSeq;
use shiftcolor::radius::{Bound, Radius};
use shiftcolor::sim::{self, sparse, SimulationConfig};

fn z1() -> Group {
    Group::Lattice { dim: 1 }
}

fn arb_group() -> impl Strategy<Value = Group> {
    prop_oneof![
        Just(Group::Lattice { dim: 1 }),
        Just(Group::Lattice { dim: 2 }),
        Just(Group::Lattice { dim: 3 }),
        Just(Group::Free { rank: 2 }),
        Just(Group::Free { rank: 3 }),
    ]
}

fn arb_element(g: Group) -> BoxedStrategy<Element> {
    match g {
        Group::Lattice { dim } => proptest::collection::vec(-12i64..12, dim as usize)
            .prop_map(Element::Lattice)
            .boxed(),
        Group::Free { rank } => {
            let letters: String = (0..rank as u8)
                .flat_map(|i| [(b'a' + i) as char, (b'A' + i) as char])
                .collect();
            proptest::string::string_regex(&format!("[{letters}]{{0,8}}"))
                .unwrap()
                .prop_map(|s| Element::word(&s).unwrap())
                .boxed()
        }
    }
}

fn group_and_elements(n: usize) -> impl Strategy<Value = (Group, Vec<Element>)> {
    arb_group().prop_flat_map(move |g| (Just(g), proptest::collection::vec(arb_element(g), n)))
}

fn arb_z1_coloring(colors: u32, span: i64, max: usize) -> impl Strategy<Value = PartialColoring> {
    proptest::collection::btree_map(-span..=span, 0..colors, 0..=max).prop_map(|m| {
        PartialColoring::from_entries(z1(), m.into_iter().map(|(x, c)| (Element::int(x), c)))
            .unwrap()
    })
}

fn shipped_ideals() -> Vec<IdealSpec> {
    vec![
        IdealSpec::proper(z1(), 3),
        IdealSpec::proper(z1(), 2),
        IdealSpec::distance_constrained(
            z1(),
            RadiusSeq::from_ints(&[1, 3, 7, 15]),
            vec![
                Bound::Finite(Radius::ZERO),
                Bound::Finite(Radius::int(9)),
                Bound::Infinite,
                Bound::Infinite,
            ],
        )
        .unwrap(),
        IdealSpec::not_universal(
            z1(),
            RadiusSeq::from_ints(&[1, 3, 7, 15]),
            RadiusSeq::from_ints(&[5, 13, 29, 61]),
        )
        .unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn metric_axioms((g, v) in group_and_elements(3)) {
        let (a, b, c) = (&v[0], &v[1], &v[2]);
        let d = |x: &Element, y: &Element| g.dist(x, y).unwrap();
        prop_assert_eq!(d(a, b), d(b, a));
        prop_assert!(d(a, c) <= d(a, b) + d(b, c));
        prop_assert_eq!(d(a, b), d(&g.mul(a, c).unwrap(), &g.mul(b, c).unwrap()));
        prop_assert_eq!(d(a, a), 0);
        prop_assert_eq!(d(a, b) == 0, a == b);
        prop_assert_eq!(d(&g.identity(), a), a.norm());
    }

    #[test]
    fn group_laws((g, v) in group_and_elements(3)) {
        let (a, b, c) = (&v[0], &v[1], &v[2]);
        let m = |x: &Element, y: &Element| g.mul(x, y).unwrap();
        prop_assert_eq!(m(&m(a, b), c), m(a, &m(b, c)));
        prop_assert_eq!(m(a, &g.inverse(a).unwrap()), g.identity());
        prop_assert_eq!(m(&g.identity(), a), a.clone());
    }

    #[test]
    fn balls_are_metric_balls((g, v) in group_and_elements(1), r in 0u64..4) {
        let center = &v[0];
        let ball = g.ball(center, Radius::int(r)).unwrap();
        let bigger = g.ball(center, Radius::int(r + 1)).unwrap();
        prop_assert_eq!(ball.len() as u128, g.ball_size(r));
        prop_assert!(ball.iter().all(|x| bigger.contains(x)));
        let inner: Vec<&Element> = bigger.iter().filter(|x| g.dist(center, x).unwrap() <= r).collect();
        prop_assert_eq!(inner.len(), ball.len());
        // translating the identity ball on the right gives the ball around `center`
        let mut moved: Vec<Element> = g
            .ball(&g.identity(), Radius::int(r))
            .unwrap()
            .iter()
            .map(|o| g.mul(o, center).unwrap())
            .collect();
        moved.sort();
        let mut sorted = ball.clone();
        sorted.sort();
        prop_assert_eq!(moved, sorted);
    }

    #[test]
    fn fractional_radii_floor(g in arb_group(), p in 0u64..8, q in 2u64..5) {
        let r = Radius::new(p, q).unwrap();
        let id = g.identity();
        prop_assert_eq!(g.ball(&id, r).unwrap(), g.ball(&id, Radius::int(r.floor())).unwrap());
    }

    #[test]
    fn membership_is_shift_and_restriction_invariant(
        phi in arb_z1_coloring(4, 20, 6), t in -30i64..30, mask in any::<u8>()
    ) {
        for ideal in shipped_ideals() {
            let inside = ideal.contains(&phi).unwrap();
            prop_assert_eq!(inside, ideal.contains(&phi.shift(&Element::int(t)).unwrap()).unwrap());
            if inside {
                let dom = phi.domain_vec();
                let sub = phi.restrict(dom.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, g)| g));
                prop_assert!(ideal.contains(&sub).unwrap());
            }
        }
    }

    #[test]
    fn admits_agrees_with_contains(phi in arb_z1_coloring(4, 15, 5), x in -20i64..20, c in 0u32..4) {
        let g = Element::int(x);
        prop_assume!(!phi.contains_point(&g));
        for ideal in shipped_ideals() {
            if !ideal.contains(&phi).unwrap() {
                continue;
            }
            let col = Color::Nat(c);
            let expect = match ideal.contains(&phi.with(&g, col).unwrap()) {
                Ok(b) => b,
                Err(_) => continue,
            };
            prop_assert_eq!(ideal.admits(&phi, &g, col).unwrap(), expect);
        }
    }

    #[test]
    fn local_ideals_join_under_their_locality(
        a in arb_z1_coloring(3, 6, 4), b in arb_z1_coloring(3, 6, 4), gap in 0i64..40
    ) {
        for ideal in shipped_ideals() {
            // colors that may occur only once have no locality radius
            let Some(r) = ideal.locality_fn() else { continue };
            let join = derived_join_from_local(r);
            let far = b.shift(&Element::int(-(gap + 20))).unwrap();
            if let Some(v) = check_join_tuple(&ideal, &join, &[a.clone(), far]).unwrap() {
                prop_assert!(false, "join failure {:?}", v.union);
            }
        }
    }

    #[test]
    fn reduced_extension_stays_inside(points in proptest::collection::vec(-6i64..6, 1..5)) {
        let spec = IdealSpec::reduced(IdealSpec::proper(z1(), 3), JoinFn::constant(Radius::int(1))).unwrap();
        let mut phi = PartialColoring::empty(z1());
        for x in points {
            let g = Element::int(x);
            if phi.contains_point(&g) {
                continue;
            }
            let c = spec.extend(&phi, &g).unwrap().expect("P' is extendable");
            prop_assert!(spec.admits(&phi, &g, c).unwrap());
            phi.insert(g, c).unwrap();
            prop_assert!(spec.contains(&phi).unwrap());
        }
    }

    #[test]
    fn oracle_witnesses_extend_and_verify(phi in arb_z1_coloring(3, 5, 4)) {
        let p3 = IdealSpec::proper(z1(), 3);
        prop_assume!(p3.contains(&phi).unwrap());
        let r = extension_oracle(&p3, &phi, Radius::int(3), 2, 1_000_000).unwrap();
        prop_assert_eq!(r.outcome, Outcome::Witness);
        let w = r.witness.unwrap();
        prop_assert!(phi.is_subset_of(&w));
        prop_assert!(p3.contains(&w).unwrap());
        prop_assert_eq!(r.witness_verified, Some(true));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn simulation_traces_are_valid(seed in any::<u64>(), steps in 0usize..16) {
        let ideal = IdealSpec::proper(z1(), 3);
        let config = SimulationConfig::new(ideal.clone(), 20, 4, steps, seed);
        let trace = sim::run(&config).unwrap();
        prop_assert!(trace.is_monotone());
        prop_assert!(trace.same_step_conflicts().is_empty());
        prop_assert!(ideal.contains(&trace.final_coloring).unwrap());
        let v = sim::trace_validate(&trace, &ideal, &ideal.locality_fn().unwrap()).unwrap();
        prop_assert!(v.is_clean());
        prop_assert_eq!(trace.steps.len(), steps);
    }

    #[test]
    fn sparse_runs_are_separated(seed in any::<u64>(), m in 0usize..5) {
        let d = RadiusSeq::from_ints(&[1, 3, 7, 15, 31]);
        let run = sparse::sparse_run(&z1(), &d, 60, m, seed).unwrap();
        prop_assert!(sparse::separation_violations(&run.coloring, &d).unwrap().is_empty());
        prop_assert!(run.coloring.colors().all(|c| c.nat().unwrap() < m as u32));
    }
}
