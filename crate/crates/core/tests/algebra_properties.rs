use proptest::prelude::*;
use sobolev_groupoid::bundle::{
    convolve_sections, section_inner, section_involution, BundleMeasureSet, Section,
};
use sobolev_groupoid::groupoid::{
    axiom_check, enumerate_bisections, fibre, haar_invariance_check, random_arrow_functions,
    Direction, GroupoidTables, HaarSystem,
};

fn symmetric(n: usize) -> impl Strategy<Value = Vec<Vec<bool>>> {
    prop::collection::vec(prop::bool::ANY, n * n).prop_map(move |bits| {
        let mut m = vec![vec![false; n]; n];
        for i in 0..n {
            for j in i..n {
                m[i][j] = bits[i * n + j];
                m[j][i] = bits[i * n + j];
            }
        }
        m
    })
}

fn groupoid() -> impl Strategy<Value = GroupoidTables> {
    (1usize..6).prop_flat_map(symmetric).prop_map(|m| {
        let names = (0..m.len()).map(|i| format!("f{i}")).collect();
        GroupoidTables::from_matrix(names, &m).unwrap()
    })
}

fn integer_section(g: &GroupoidTables, seed: &[i8]) -> Section {
    Section::new(
        g,
        (0..g.arrow_count())
            .map(|a| seed[a % seed.len()] as f64)
            .collect(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn axioms_hold_where_defined(g in groupoid()) {
        let r = axiom_check(&g);
        prop_assert!(r.unit_law && r.inverse_law);
        prop_assert!(r.associativity_violations.is_empty());
        for a in 0..g.arrow_count() {
            prop_assert_eq!(g.inverse[g.inverse[a]], a);
            prop_assert_eq!(g.source(g.inverse[a]), g.target(a));
        }
        for f in 0..g.object_count() {
            let t = fibre(&g, f, Direction::Target).unwrap();
            let s = fibre(&g, f, Direction::Source).unwrap();
            prop_assert_eq!(t.len(), s.len());
        }
    }

    #[test]
    fn bisections_are_closed_on_full_patterns(n in 1usize..5) {
        let g = GroupoidTables::full(n);
        let all = enumerate_bisections(&g, usize::MAX).unwrap();
        let factorial: usize = (1..=n).product();
        prop_assert_eq!(all.len(), factorial);
        for a in &all {
            for b in &all {
                let c = a.compose(b, &g).unwrap();
                prop_assert!(all.contains(&c));
            }
        }
    }

    #[test]
    fn constant_weights_are_invariant_on_full_patterns(n in 1usize..5, c in 0.01..10.0f64, seed in 0u64..1000) {
        let g = GroupoidTables::full(n);
        let h = HaarSystem::constant(&g, c).unwrap();
        let panel = random_arrow_functions(&g, 20, seed);
        prop_assert_eq!(haar_invariance_check(&g, &h, &panel).unwrap().max_defect, 0.0);
    }

    #[test]
    fn full_convolution_is_an_associative_star_algebra(
        n in 1usize..5,
        a in prop::collection::vec(-9i8..10, 16),
        b in prop::collection::vec(-9i8..10, 16),
        c in prop::collection::vec(-9i8..10, 16),
    ) {
        let g = GroupoidTables::full(n);
        let h = HaarSystem::counting(&g);
        let (x, y, z) = (integer_section(&g, &a), integer_section(&g, &b), integer_section(&g, &c));
        let conv = |p: &Section, q: &Section| convolve_sections(p, q, &g, &h).unwrap().section;
        prop_assert_eq!(conv(&conv(&x, &y), &z), conv(&x, &conv(&y, &z)));
        let e = Section::identity(&g);
        prop_assert_eq!(conv(&e, &x), x.clone());
        prop_assert_eq!(conv(&x, &e), x.clone());
        let star = |p: &Section| section_involution(p, &g).unwrap();
        prop_assert_eq!(star(&conv(&x, &y)), conv(&star(&y), &star(&x)));
    }

    #[test]
    fn partial_star_identity_where_emitted(g in groupoid(), a in prop::collection::vec(-9i8..10, 8), b in prop::collection::vec(-9i8..10, 8)) {
        let h = HaarSystem::counting(&g);
        let (x, y) = (integer_section(&g, &a), integer_section(&g, &b));
        let star = |p: &Section| section_involution(p, &g).unwrap();
        let lhs = star(&convolve_sections(&x, &y, &g, &h).unwrap().section);
        let rhs = convolve_sections(&star(&y), &star(&x), &g, &h).unwrap().section;
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn inner_product_is_positive_definite(g in groupoid(), v in prop::collection::vec(-1.0..1.0f64, 25)) {
        let b = BundleMeasureSet::new(&g, &HaarSystem::counting(&g)).unwrap();
        let s = Section::new(&g, (0..g.arrow_count()).map(|a| v[a]).collect()).unwrap();
        let q = section_inner(&s, &s, &b).unwrap();
        if s.values().iter().any(|&x| x != 0.0) {
            prop_assert!(q > 0.0);
        } else {
            prop_assert_eq!(q, 0.0);
        }
        let zero = Section::zeros(&g);
        prop_assert_eq!(section_inner(&zero, &zero, &b).unwrap(), 0.0);
    }
}
