use proptest::prelude::*;
use quadsolid::dsl::{format, parse};
use quadsolid::{ImplicitSolid, Polynomial, QuadricForm};

fn coefficient() -> impl Strategy<Value = f64> {
    prop_oneof![
        3 => -10.0f64..10.0,
        1 => (-10i32..=10).prop_map(f64::from),
        1 => Just(0.0),
    ]
}

fn polynomial() -> impl Strategy<Value = Polynomial> {
    proptest::collection::vec(coefficient(), 10).prop_map(|c| Polynomial {
        xx: c[0],
        yy: c[1],
        zz: c[2],
        xy: c[3],
        xz: c[4],
        yz: c[5],
        x: c[6],
        y: c[7],
        z: c[8],
        c: c[9],
    })
}

fn matrices(s: &ImplicitSolid) -> Vec<[[f64; 4]; 4]> {
    s.constraints().iter().map(|h| *h.form.matrix()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn format_then_parse_is_exact(polys in proptest::collection::vec(polynomial(), 1..4)) {
        let solid = ImplicitSolid::from_forms(polys.iter().map(QuadricForm::from_polynomial)).unwrap();
        let text = format(&solid);
        let back = parse(&text).unwrap();
        prop_assert_eq!(matrices(&back), matrices(&solid), "{}", text);
        prop_assert_eq!(format(&back), text);
    }

    #[test]
    fn term_order_and_spacing_do_not_matter(p in polynomial(), seed in any::<u64>(), pad in 0usize..3) {
        let terms: Vec<String> = p
            .terms()
            .iter()
            .filter(|(_, c)| *c != 0.0)
            .map(|(name, c)| if name.is_empty() { format!("{c:?}") } else { format!("{c:?}*{name}") })
            .collect();
        prop_assume!(!terms.is_empty());
        let mut shuffled = terms.clone();
        // deterministic permutation driven by the seed
        let mut state = seed;
        for i in (1..shuffled.len()).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            shuffled.swap(i, (state >> 33) as usize % (i + 1));
        }
        let sep = " ".repeat(pad);
        let a = parse(&format!("{} <= 0", terms.join(" + "))).unwrap();
        let b = parse(&format!("{sep}{}{sep}<={sep}0{sep}", shuffled.join(&format!("{sep}+{sep}")))).unwrap();
        prop_assert_eq!(matrices(&a), matrices(&b));
    }
}

#[test]
fn reparse_of_formatted_source_is_stable() {
    let src = "x^2+y^2 <= z^2 + 1\n  2x - 3.5*y*z >= -4 # comment\n0.1*x*x <= 2";
    let once = parse(src).unwrap();
    let again = parse(&format(&once)).unwrap();
    assert_eq!(matrices(&once), matrices(&again));
}
