use proptest::prelude::*;

use tamkit::compilers::counter::{labels, make_counter, CounterSpec};
use tamkit::compilers::{
    compile_grid_repeat, compile_multi_pixel, compile_single_pixel, compile_square_pattern, compile_stripes,
    label_namespace, CompiledSystem,
};
use tamkit::diag::compile_pn_lift;
use tamkit::model::Dir;
use tamkit::patterns::{two_color_palette, Pattern};

fn systems() -> Vec<(String, CompiledSystem)> {
    let checker = Pattern::from_fn(8, 8, two_color_palette(), |x, y| ((x + y) % 2) as u16);
    vec![
        ("single".into(), compile_single_pixel(16, 10, 2).unwrap()),
        ("multi".into(), compile_multi_pixel(16, &[(2, 2), (10, 2), (2, 12)]).unwrap()),
        ("stripes".into(), compile_stripes(16, 3, 5).unwrap()),
        ("square".into(), compile_square_pattern(&checker).unwrap()),
        ("grid".into(), compile_grid_repeat(&checker, 3).unwrap()),
        ("lift".into(), compile_pn_lift(&[1, 0, 1], 9).unwrap()),
    ]
}

#[test]
fn every_label_is_namespaced() {
    for (name, cs) in systems() {
        for label in labels(cs.system.tiles()) {
            let ns = label_namespace(&label);
            assert!(!ns.is_empty() && ns.len() < label.len(), "{name}: label {label:?} has no namespace");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn distinct_counter_namespaces_are_disjoint(w in 1u32..5, s in 0u64..8, len in 0u64..8, a in "[a-m]{1,3}", b in "[n-z]{1,3}") {
        let end = (s + len).min((1 << w) - 1);
        let start = s.min(end);
        let x = make_counter(&CounterSpec::new(w, start, end, Dir::N, &a)).unwrap();
        let y = make_counter(&CounterSpec::new(w, start, end, Dir::E, &b)).unwrap();
        let lx = labels(x.system.tiles());
        let ly = labels(y.system.tiles());
        prop_assert!(lx.iter().all(|l| label_namespace(l) == a));
        prop_assert!(lx.is_disjoint(&ly));
    }
}
