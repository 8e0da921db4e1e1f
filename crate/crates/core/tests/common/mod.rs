//! Seeded random instances shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use veronese::exterior::{DForm, VectorField};
use veronese::polyring::{rat, Poly};

pub fn random_poly<R: Rng>(rng: &mut R, nvars: usize, max_terms: usize, max_deg: u32) -> Poly {
    let mut p = Poly::zero(nvars);
    for _ in 0..rng.gen_range(0..=max_terms) {
        let mut exps = vec![0u32; nvars];
        let mut budget = rng.gen_range(0..=max_deg);
        while budget > 0 {
            exps[rng.gen_range(0..nvars)] += 1;
            budget -= 1;
        }
        let c = rat(rng.gen_range(-5..=5), rng.gen_range(1..=3));
        p = &p + &Poly::monomial(c, exps);
    }
    p
}

pub fn random_form<R: Rng>(rng: &mut R, dim: usize, degree: usize) -> DForm {
    let mut f = DForm::zero(dim, degree);
    if degree > dim {
        return f;
    }
    for _ in 0..rng.gen_range(0..=3) {
        let mut idx: Vec<usize> = (0..dim).collect();
        while idx.len() > degree {
            idx.remove(rng.gen_range(0..idx.len()));
        }
        f.add_term(&idx, random_poly(rng, dim, 3, 2)).expect("valid covectors");
    }
    f
}

pub fn random_field<R: Rng>(rng: &mut R, dim: usize) -> VectorField {
    VectorField::new((0..dim).map(|_| random_poly(rng, dim, 2, 2)).collect()).expect("dim components")
}

pub fn random_point<R: Rng>(rng: &mut R, dim: usize) -> Vec<veronese::polyring::Rat> {
    (0..dim).map(|_| rat(rng.gen_range(-7..=7), rng.gen_range(1..=4))).collect()
}
