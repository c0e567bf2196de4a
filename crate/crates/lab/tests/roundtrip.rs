use contraction_core::falsifier::{generate, random_spec, InstanceGenerator};
use contraction_core::{corpus, parse_rational, CertifyOptions, ContractionSpec, VariantKind};
use contraction_lab::commands;
use contraction_lab::instance::instance_to_json;
use contraction_lab::{load_instance, parse_instance, save_instance, LoadOptions};

fn reports(inst: &contraction_core::Instance, spec: &ContractionSpec) -> Vec<String> {
    let opts = CertifyOptions {
        include_fixed_points: true,
        ..CertifyOptions::default()
    };
    vec![
        commands::certify(inst, spec, opts.clone(), None)
            .unwrap()
            .render(false),
        commands::fixpoints(inst).render(false),
        commands::check_metric(inst).render(false),
        commands::phi_check(inst, &[]).render(false),
        commands::validate(inst, spec, opts, None)
            .unwrap()
            .render(false),
    ]
}

#[test]
fn written_files_reload_to_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let one = parse_rational("1").unwrap();
    let two = parse_rational("2").unwrap();
    let mut instances = vec![
        corpus::example10(30).unwrap(),
        corpus::example10_finite(15).unwrap(),
        corpus::example13(30).unwrap(),
        corpus::example7_grid(&one, &two).unwrap(),
    ];
    let gen = InstanceGenerator::new(77);
    for i in 0..40 {
        let mut inst = generate(&gen, i);
        inst.spec = Some(random_spec(
            &mut gen.rng(i),
            VariantKind::ALL[i as usize % 6],
        ));
        instances.push(inst);
    }
    for (i, inst) in instances.iter().enumerate() {
        let path = dir.path().join(format!("{i}.json"));
        save_instance(&path, inst).unwrap();
        let back = load_instance(&path, LoadOptions::default()).unwrap();
        assert_eq!(&back, inst, "instance {i}");
        let spec = inst.spec.clone().unwrap();
        assert_eq!(reports(&back, &spec), reports(inst, &spec), "instance {i}");
        assert_eq!(
            instance_to_json(&back),
            std::fs::read_to_string(&path).unwrap()
        );
    }
}

#[test]
fn piecewise_phi_round_trips() {
    let text = r#"{"space": {"kind": "absdiff-window", "values": ["0", "1", "3"]},
                  "map": {"kind": "table", "images": ["0", "0", "1"]},
                  "phi": {"family": "piecewise-table", "breakpoints": ["0", "1"], "slopes": ["1/2", "1/3"]},
                  "contraction": {"variant": "hegedus-szilagyi"}}"#;
    let inst = parse_instance(text, "t", LoadOptions::default()).unwrap();
    let again = parse_instance(&instance_to_json(&inst), "t", LoadOptions::default()).unwrap();
    assert_eq!(inst, again);
    let r = commands::certify(
        &inst,
        inst.spec.as_ref().unwrap(),
        CertifyOptions::default(),
        None,
    )
    .unwrap();
    assert_eq!(r.json["phi_check"], "sampled");
}
