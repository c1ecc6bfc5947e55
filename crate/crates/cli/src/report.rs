//! Human- and machine-readable summaries of propagation and search
//! results. The JSON form keeps every map sorted so identical inputs
//! produce identical bytes.

use std::collections::BTreeMap;

use arrayprop::model::{Assignment, CspModel, DomainTable};
use arrayprop::rules::ClosureResult;
use arrayprop::stats::PropagationStats;

use crate::printer::domain_text;

/// One `name: {values}` line per declared variable (constants are omitted),
/// in declaration order.
pub fn render_domains(m: &CspModel, table: &DomainTable) -> String {
    let mut out = String::new();
    for id in m.var_ids() {
        if m.var(id).frozen {
            continue;
        }
        out.push_str(&format!("{}: {}\n", m.var(id).name, domain_text(m, table.get(id))));
    }
    out
}

/// One `counter: value` line per statistic, alphabetically.
pub fn render_stats(stats: &PropagationStats) -> String {
    let mut out = String::new();
    for (key, value) in stats.as_map() {
        out.push_str(&format!("{}: {}\n", key, value));
    }
    out
}

/// Space-separated `name=value` pairs for declared variables.
pub fn render_solution(m: &CspModel, asgn: &Assignment) -> String {
    let parts: Vec<String> = m
        .var_ids()
        .filter(|&id| !m.var(id).frozen)
        .map(|id| {
            let token = m.token(asgn.get(id));
            format!("{}={}", m.var(id).name, token)
        })
        .collect();
    parts.join(" ")
}

/// The `--json` propagation report: `{domains, stats, status}`.
pub fn json_report(m: &CspModel, result: &ClosureResult) -> serde_json::Value {
    let mut domains: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for id in m.var_ids() {
        if m.var(id).frozen {
            continue;
        }
        let values = crate::printer::canon_values(m, result.table.get(id).iter())
            .iter()
            .map(|&v| m.token(v).to_string())
            .collect();
        domains.insert(m.var(id).name.clone(), values);
    }
    let stats: BTreeMap<String, u64> =
        result.stats.as_map().into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    serde_json::json!({
        "domains": domains,
        "stats": stats,
        "status": if result.failed { "failed" } else { "stable" },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_model;
    use arrayprop::rules::{rsarr_closure, ClosureOptions};

    const SHARED_ARRAY: &str = "\
var x in {p, q, r};
var z in {i, j};
var y in {k, l, m};
var u in {i, j};
var v in {k, l, m};
array a [{i, j}, {k, l, m}] = ((p, q, r), (p, q, r));
constraint v != l;
constraint a[u, v] = x;
constraint a[z, y] = q;
";

    #[test]
    fn domains_report_shows_shared_array_results() {
        let m = parse_model(SHARED_ARRAY).unwrap();
        let r = rsarr_closure(&m, &ClosureOptions::default());
        let text = render_domains(&m, &r.table);
        assert!(text.contains("x: {p, r}\n"), "{}", text);
        assert!(text.contains("y: {l}\n"), "{}", text);
        assert!(!text.contains("q:"), "constants must not be listed: {}", text);
    }

    #[test]
    fn json_is_deterministic() {
        let m = parse_model(SHARED_ARRAY).unwrap();
        let r = rsarr_closure(&m, &ClosureOptions::default());
        let a = serde_json::to_string(&json_report(&m, &r)).unwrap();
        let b = serde_json::to_string(&json_report(&m, &r)).unwrap();
        assert_eq!(a, b);
        let v: serde_json::Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["status"], "stable");
        assert_eq!(v["domains"]["y"], serde_json::json!(["l"]));
    }

    #[test]
    fn solution_line_uses_declared_names() {
        let m = parse_model("var x in {A};\nvar y in {1};\n").unwrap();
        let sols = arrayprop::oracle::enumerate_solutions(&m, 1000).unwrap();
        assert_eq!(render_solution(&m, &sols[0]), "x=A y=1");
    }
}
