mod common;

use std::collections::HashMap;

use lambdagen::format::parse_debruijn;
use lambdagen::recursive::enumerate;
use lambdagen::rng::seeded;
use lambdagen::typing::{check, infer, sample_typed, TypedMethod, TypedSampler};
use lambdagen::{Error, SizeModel, Term};

#[test]
fn combinator_types() {
    let cases = [
        ("\\ 0", "a -> a"),
        ("\\ \\ 1", "a -> b -> a"),
        ("\\ \\ 0", "a -> b -> b"),
        ("\\ \\ \\ ((2 0) (1 0))", "(a -> b -> c) -> (a -> b) -> a -> c"),
        ("\\ \\ (1 (1 0))", "(a -> a) -> a -> a"),
        ("\\ \\ \\ ((2 0) 1)", "(a -> b -> c) -> b -> a -> c"),
    ];
    for (text, expected) in cases {
        let t = parse_debruijn(text).unwrap();
        let ty = infer(&t).unwrap();
        assert_eq!(ty.to_string(), expected);
        assert!(check(&t, &ty));
    }
    for text in ["\\ (0 0)", "(\\ (0 0) \\ (0 0))", "\\ \\ ((0 1) (1 0))"] {
        assert_eq!(infer(&parse_debruijn(text).unwrap()), Err(Error::NotTypeable), "{text}");
    }
}

#[test]
fn typed_samples_are_uniform_over_typeable_terms() {
    let model = SizeModel::natural();
    let class: Vec<Term> = enumerate(&model, 0, 7).unwrap().into_iter().filter(|t| infer(t).is_ok()).collect();
    let position: HashMap<&Term, usize> = class.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let mut sampler = TypedSampler::new(7, model, TypedMethod::Recursive, 10_000).unwrap();
    let mut rng = seeded(31);
    let mut hits = vec![0u64; class.len()];
    for _ in 0..100 * class.len() {
        let (t, ty) = sampler.sample(&mut rng).unwrap();
        assert_eq!(infer(&t).unwrap(), ty);
        hits[position[&t]] += 1;
    }
    let (stat, ok) = common::uniform_at(&hits, 0.001);
    assert!(ok, "statistic {stat}");
}

#[test]
fn boltzmann_typed_samples_type_check() {
    let mut rng = seeded(32);
    for _ in 0..10 {
        let (t, ty) = sample_typed(25, SizeModel::natural(), TypedMethod::Boltzmann, &mut rng, 1_000_000).unwrap();
        assert!(t.is_closed());
        assert!(check(&t, &ty));
    }
}
