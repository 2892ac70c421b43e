mod golden_family_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/golden_family.rs"));
}

#[test]
fn golden_family_example_runs() {
    golden_family_example::run_example().expect("golden_family example should run");
}

mod exact_field_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/exact_field.rs"));
}

#[test]
fn exact_field_example_runs() {
    exact_field_example::run_example().expect("exact_field example should run");
}

mod series_ops_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/series_ops.rs"));
}

#[test]
fn series_ops_example_runs() {
    series_ops_example::run_example().expect("series_ops example should run");
}

mod canonical_forms_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/canonical_forms.rs"));
}

#[test]
fn canonical_forms_example_runs() {
    canonical_forms_example::run_example().expect("canonical_forms example should run");
}

mod tensor_and_hom_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/tensor_and_hom.rs"));
}

#[test]
fn tensor_and_hom_example_runs() {
    tensor_and_hom_example::run_example().expect("tensor_and_hom example should run");
}

mod fourier_transforms_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/fourier_transforms.rs"));
}

#[test]
fn fourier_transforms_example_runs() {
    fourier_transforms_example::run_example().expect("fourier_transforms example should run");
}

mod rigidity_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/rigidity.rs"));
}

#[test]
fn rigidity_example_runs() {
    rigidity_example::run_example().expect("rigidity example should run");
}

mod operator_oracle_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/operator_oracle.rs"));
}

#[test]
fn operator_oracle_example_runs() {
    operator_oracle_example::run_example().expect("operator_oracle example should run");
}

mod cli_session_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/cli_session.rs"));
}

#[test]
fn cli_session_example_runs() {
    cli_session_example::run_example().expect("cli_session example should run");
}
