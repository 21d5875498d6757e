use proptest::prelude::*;

use steinlab::intcore::IntMatrix;
use steinlab::steinness::{classify, ModulusSpec, Verdict};

/// Products of elementary shears and sign flips: always unimodular.
fn unimodular(dim: usize) -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec((0..dim, 0..dim, -2i64..=2, any::<bool>()), 1..6).prop_map(move |ops| {
        let mut m = IntMatrix::identity(dim);
        for (i, j, c, flip) in ops {
            let mut e = IntMatrix::identity(dim);
            if i != j {
                e.set(i, j, c.into());
            } else if flip {
                e.set(i, i, (-1).into());
            }
            m = m.mul(&e);
        }
        m
    })
}

fn modulus() -> impl Strategy<Value = ModulusSpec> {
    prop_oneof![
        (0.5f64..200.0).prop_map(ModulusSpec::Finite),
        Just(ModulusSpec::Infinity),
        Just(ModulusSpec::TwoInfinity),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inverse_has_the_same_verdict(m in (2usize..=3).prop_flat_map(unimodular), md in modulus()) {
        let inv = m.inverse_unimodular().unwrap();
        let a = classify(&m, md, 1e-10).unwrap();
        let b = classify(&inv, md, 1e-10).unwrap();
        if !matches!(a.verdict, Verdict::Indeterminate { .. })
            && !matches!(b.verdict, Verdict::Indeterminate { .. })
        {
            prop_assert_eq!(a.verdict, b.verdict);
        }
    }

    #[test]
    fn conjugation_preserves_the_verdict(
        m in unimodular(3),
        p in unimodular(3),
        md in modulus(),
    ) {
        let conj = p.mul(&m).mul(&p.inverse_unimodular().unwrap());
        let a = classify(&m, md, 1e-10).unwrap();
        let b = classify(&conj, md, 1e-10).unwrap();
        if !matches!(a.verdict, Verdict::Indeterminate { .. })
            && !matches!(b.verdict, Verdict::Indeterminate { .. })
        {
            prop_assert_eq!(a.verdict, b.verdict);
        }
    }
}
