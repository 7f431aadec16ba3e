//! Shared fixtures for the criterion benches.

use std::sync::Arc;

use dunkl_core::{int, OperatorContext, Polynomial, Result, SystemSpec};

/// Systems benchmarked throughout: rank one, a product, and two non-product groups.
pub fn systems() -> Vec<(&'static str, SystemSpec)> {
    vec![
        ("z2", SystemSpec::z2(&[int(1)]).expect("valid")),
        ("z2x2", SystemSpec::z2(&[int(1), int(2)]).expect("valid")),
        ("s3", SystemSpec::symmetric(3, int(1)).expect("valid")),
        ("b2", SystemSpec::hyperoctahedral(2, int(1), int(1)).expect("valid")),
    ]
}

pub fn context(spec: &SystemSpec) -> Result<Arc<OperatorContext>> {
    Ok(Arc::new(OperatorContext::new(Arc::new(spec.build()?))?))
}

/// Sum of every monomial of total degree `degree` in `nvars` variables.
pub fn dense_homogeneous(nvars: usize, degree: u32) -> Polynomial {
    let mut terms = Vec::new();
    let mut exps = vec![0u32; nvars];
    fill(&mut exps, 0, degree, &mut terms);
    Polynomial::from_terms(nvars, terms.into_iter().map(|e| (e, int(1)))).expect("consistent arity")
}

fn fill(exps: &mut [u32], at: usize, left: u32, out: &mut Vec<Vec<u32>>) {
    if at + 1 == exps.len() {
        exps[at] = left;
        out.push(exps.to_vec());
        return;
    }
    for e in 0..=left {
        exps[at] = e;
        fill(exps, at + 1, left - e, out);
    }
}
