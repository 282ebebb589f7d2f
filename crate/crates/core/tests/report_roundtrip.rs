use eislab::report::{
    render_report, render_timeseries, run, ReportFormat, RunReport, REPORT_FORMAT_VERSION,
};
use eislab::scenario::{ModelSpec, Scenario};

fn preset(name: &str) -> RunReport {
    let spec = ModelSpec {
        name: name.into(),
        gamma: Some(1.0),
        blocks: None,
        dim: None,
        hamiltonian: None,
    };
    run(&Scenario::for_model(name, spec).unwrap())
}

#[test]
fn json_round_trip_is_lossless() {
    for name in [
        "dephasing_qubit",
        "amplitude_damping_qubit",
        "depolarizing_qubit",
    ] {
        let rep = preset(name);
        assert_eq!(rep.format_version, REPORT_FORMAT_VERSION);
        let back = RunReport::from_json(&rep.to_json()).unwrap();
        assert_eq!(back, rep, "{name}");
        assert_eq!(back.to_json(), rep.to_json());
    }
}

#[test]
fn timing_block_comes_last() {
    let json = preset("dephasing_qubit").to_json();
    let timing = json.find("\"timing\"").unwrap();
    for key in ["\"ledger\"", "\"analyses\"", "\"timeseries\""] {
        assert!(json.find(key).unwrap() < timing, "{key}");
    }
}

#[test]
fn text_and_csv_renderings() {
    let rep = preset("amplitude_damping_qubit");
    let text = render_report(&rep, ReportFormat::Text);
    assert!(text.contains("amplitude_damping_qubit"));
    let csv = render_timeseries(&rep).unwrap();
    let header = csv.lines().next().unwrap();
    assert!(header.contains("fixed_distance"));
    assert_eq!(csv.lines().count(), rep.timeseries.rows.len() + 1);
}
