//! Thread-parallel drivers whose results match the sequential ones exactly.

use contraction_core::falsifier::{run_trial, Finding, InstanceGenerator, Target};
use contraction_core::{
    CertificationReport, Certifier, CertifyError, CertifyOptions, ContractionSpec, MetricSpace,
    PhiSpec, SelfMap,
};
use rayon::prelude::*;

/// [`contraction_core::certify`] with rows of the pair domain spread over threads.
pub fn certify_parallel(
    space: &MetricSpace,
    map: &SelfMap,
    phi: &PhiSpec,
    spec: &ContractionSpec,
    options: CertifyOptions,
) -> Result<CertificationReport, CertifyError> {
    let certifier = Certifier::new(space, map, phi, spec, options)?;
    let rows: Vec<_> = (0..certifier.domain().len())
        .into_par_iter()
        .map(|i| certifier.row(i))
        .collect();
    Ok(certifier.assemble(rows))
}

/// [`contraction_core::falsifier::hunt`] with trials spread over threads, findings in index order.
pub fn hunt_parallel(
    gen: &InstanceGenerator,
    trials: u64,
    target: Target,
    options: &CertifyOptions,
) -> Vec<Finding> {
    (0..trials)
        .into_par_iter()
        .filter_map(|i| run_trial(gen, i, target, options))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use contraction_core::falsifier::hunt;
    use contraction_core::{certify, corpus, VariantKind};

    #[test]
    fn matches_sequential_certify() {
        let inst = corpus::example10(60).unwrap();
        for spec in [
            inst.spec.clone().unwrap(),
            ContractionSpec::TmMax,
            ContractionSpec::HegedusSzilagyi,
        ] {
            let a = certify(
                &inst.space,
                &inst.map,
                &inst.phi,
                &spec,
                CertifyOptions::default(),
            )
            .unwrap();
            let b = certify_parallel(
                &inst.space,
                &inst.map,
                &inst.phi,
                &spec,
                CertifyOptions::default(),
            )
            .unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn matches_sequential_hunt() {
        let gen = InstanceGenerator::new(9);
        let target = Target::Separation(VariantKind::TypeIII, VariantKind::TmMax);
        let options = CertifyOptions::default();
        assert_eq!(
            hunt(&gen, 200, target, &options),
            hunt_parallel(&gen, 200, target, &options)
        );
    }
}
