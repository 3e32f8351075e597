use polyjac::formats::{SystemDoc, TermDoc, Variant};
use polyjac_core::discretize::{assemble, ProblemKind, ProblemSpec};
use proptest::prelude::*;

#[test]
fn bundled_systems_roundtrip_through_json() {
    for kind in ProblemKind::ALL {
        let (sys, _) = assemble(&ProblemSpec::new(kind, 7)).unwrap();
        let text = serde_json::to_string(&SystemDoc::from_system(&sys)).unwrap();
        let doc: SystemDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(doc.to_system().unwrap(), sys, "{kind}");
    }
}

#[test]
fn invalid_documents_are_rejected() {
    let base = SystemDoc { n: 1, d: None, terms: vec![], b: vec![1.0] };
    let mut doc = base.clone();
    doc.b = vec![1.0, 2.0];
    assert!(doc.to_system().is_err());
    let mut doc = base.clone();
    doc.terms.push(TermDoc { variant: Variant::Power, matrices: vec![vec![vec![1.0]], vec![vec![1.0]]], exponent: 2.0 });
    assert!(doc.to_system().is_err());
    let mut doc = base.clone();
    doc.terms.push(TermDoc { variant: Variant::PointwiseProduct, matrices: vec![vec![vec![1.0]], vec![vec![1.0]]], exponent: -1.0 });
    assert!(doc.to_system().is_err());
    let mut doc = base;
    doc.d = Some(vec![vec![1.0, 2.0]]);
    assert!(doc.to_system().is_err());
    assert!(serde_json::from_str::<SystemDoc>(r#"{"n":1,"b":[1],"extra":0}"#).is_err());
}

proptest! {
    #[test]
    fn random_documents_roundtrip_exactly(
        n in 1usize..5,
        entries in prop::collection::vec(-1e6..1e6f64, 64),
        s in prop::sample::select(vec![0.5, 1.0, 2.0, 1.5]),
    ) {
        let mat = |off: usize| (0..n).map(|i| (0..n).map(|j| entries[(off + i * n + j) % 64]).collect()).collect::<Vec<Vec<f64>>>();
        let doc = SystemDoc {
            n,
            d: Some(mat(0)),
            terms: vec![
                TermDoc { variant: Variant::PointwiseProduct, matrices: vec![mat(7), mat(13)], exponent: s },
                TermDoc { variant: Variant::Power, matrices: vec![mat(29)], exponent: 3.0 },
            ],
            b: (0..n).map(|i| entries[(41 + i) % 64]).collect(),
        };
        let text = serde_json::to_string(&doc).unwrap();
        let back: SystemDoc = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &doc);
        let sys = back.to_system().unwrap();
        prop_assert_eq!(SystemDoc::from_system(&sys), doc);
    }
}
