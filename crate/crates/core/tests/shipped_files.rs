//! Files shipped in the repository stay in sync with the library.

use std::path::PathBuf;

use corridor_sim::RunConfig;

fn repo_file(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}

#[test]
fn default_config_file_matches_defaults() {
    let text = std::fs::read_to_string(repo_file("configs/default.json")).unwrap();
    assert_eq!(RunConfig::from_json(&text).unwrap(), RunConfig::default());
}

#[test]
fn schema_lists_every_report_field() {
    let text = std::fs::read_to_string(repo_file("schema/blockage_report.schema.json")).unwrap();
    let schema: serde_json::Value = serde_json::from_str(&text).unwrap();
    let item = &schema["items"];
    let props = item["properties"].as_object().unwrap();
    let required: Vec<&str> = item["required"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(item["additionalProperties"], false);

    let mut cache = corridor_sim::ReportCache::new();
    let out = corridor_sim::run(RunConfig {
        run_length: 600.0,
        p_spawn: 60.0,
        ..RunConfig::default()
    })
    .unwrap();
    assert!(!out.reports.is_empty());
    cache.clone_from(&out.reports);
    let json: serde_json::Value = serde_json::from_str(&cache.to_json()).unwrap();
    let first = json[0].as_object().unwrap();
    let mut keys: Vec<&str> = first.keys().map(String::as_str).collect();
    keys.sort_unstable();
    let mut listed: Vec<&str> = props.keys().map(String::as_str).collect();
    listed.sort_unstable();
    assert_eq!(keys, listed);
    let mut req = required.clone();
    req.sort_unstable();
    assert_eq!(req, listed);
}
