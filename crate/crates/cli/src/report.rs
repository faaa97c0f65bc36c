//! The JSON report document written by `check` and `scan`.

use std::collections::BTreeMap;

use fermat_core::criterion::{PrimitivityReport, Verdict};
use serde::{Deserialize, Serialize};

use crate::spec::PartitionSpec;

/// Bumped on any change to the fields below.
pub const SCHEMA_VERSION: u32 = 1;

/// JSON schema of [`ReportDocument`], shipped with the crate.
#[cfg(test)]
pub const SCHEMA: &str = include_str!("../schema/report.schema.json");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub n: usize,
    pub m: usize,
    /// Rendered [`PartitionSpec`].
    #[serde(rename = "K")]
    pub k: String,
    pub gamma: u64,
    pub rank: u64,
    pub d0: u64,
    /// Keyed by the prime, as a decimal string.
    pub dp: BTreeMap<String, u64>,
    /// `PRIMITIVE`, `TORSION_DETECTED` or `INCONCLUSIVE(<stage>)`.
    pub verdict: String,
    /// Decimal strings, so factors of any size survive.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torsion_factors: Option<Vec<String>>,
    pub engine: String,
    pub timings_ms: BTreeMap<String, u64>,
}

pub fn verdict_label(v: &Verdict) -> String {
    match v {
        Verdict::Inconclusive { stage, .. } => format!("INCONCLUSIVE({stage})"),
        other => other.to_string(),
    }
}

impl ReportDocument {
    pub fn new(r: &PrimitivityReport) -> Self {
        ReportDocument {
            schema_version: SCHEMA_VERSION,
            n: r.n,
            m: r.m,
            k: PartitionSpec::of(&r.k).to_string(),
            gamma: r.gamma,
            rank: r.rank,
            d0: r.d0,
            dp: r.dp.iter().map(|(p, d)| (p.to_string(), *d)).collect(),
            verdict: verdict_label(&r.verdict),
            torsion_factors: r.torsion_factors.as_ref().map(|f| f.iter().map(ToString::to_string).collect()),
            engine: r.engine.to_string(),
            timings_ms: r.timings.iter().map(|(k, t)| (k.to_string(), t.as_millis() as u64)).collect(),
        }
    }

    pub fn is_inconclusive(&self) -> bool {
        self.verdict.starts_with("INCONCLUSIVE")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use fermat_core::criterion::{primitivity_check, Options};
    use fermat_core::zlattice::Route;
    use fermat_core::{PartitionSet, ProblemInstance};
    use proptest::prelude::*;
    use serde_json::Value;

    fn sample() -> ReportDocument {
        let inst = ProblemInstance::new(2, 4).unwrap();
        let opts = Options { snf: Some(Route::D), ..Options::default() };
        ReportDocument::new(&primitivity_check(&inst, &PartitionSet::standard(&inst), &opts).unwrap())
    }

    #[test]
    fn standard_surface() {
        let doc = sample();
        assert_eq!((doc.gamma, doc.rank, doc.d0), (9, 10, 18));
        assert_eq!(doc.k, "standard");
        assert_eq!(doc.dp, BTreeMap::from([("2".to_string(), 18)]));
        assert_eq!(doc.verdict, "PRIMITIVE");
        assert_eq!(doc.torsion_factors, Some(vec![]));
    }

    #[test]
    fn field_names() {
        let v: Value = serde_json::from_str(&sample().to_json()).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        let mut want = vec![
            "schema_version", "n", "m", "K", "gamma", "rank", "d0", "dp", "verdict", "torsion_factors", "engine",
            "timings_ms",
        ];
        want.sort();
        assert_eq!(keys, want);
    }

    #[test]
    fn schema_lists_the_same_fields() {
        let schema: Value = serde_json::from_str(SCHEMA).unwrap();
        let props: Vec<&str> = schema["properties"].as_object().unwrap().keys().map(String::as_str).collect();
        let doc: Value = serde_json::from_str(&sample().to_json()).unwrap();
        let keys: Vec<&str> = doc.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(props, keys);
        assert_eq!(schema["properties"]["schema_version"]["const"], SCHEMA_VERSION);
        let required = schema["required"].as_array().unwrap();
        assert!(required.iter().all(|r| props.contains(&r.as_str().unwrap())));
        assert!(!required.contains(&Value::from("torsion_factors")));
    }

    #[test]
    fn rejects_unknown_fields() {
        let mut v: Value = serde_json::from_str(&sample().to_json()).unwrap();
        v["extra"] = Value::from(1);
        assert!(serde_json::from_value::<ReportDocument>(v).is_err());
    }

    proptest! {
        #[test]
        fn json_roundtrip(
            n in 0usize..20, m in 3usize..300, gamma in any::<u32>(), d0 in any::<u32>(),
            dp in prop::collection::btree_map(2u64..300, any::<u64>(), 0..4),
            verdict in "PRIMITIVE|TORSION_DETECTED|INCONCLUSIVE\\([a-z]+\\)",
            torsion in prop::option::of(prop::collection::vec("[1-9][0-9]{0,40}", 0..5)),
            timings in prop::collection::btree_map("[a-z]{1,8}", any::<u64>(), 0..4),
        ) {
            let doc = ReportDocument {
                schema_version: SCHEMA_VERSION,
                n, m,
                k: "all".into(),
                gamma: gamma as u64,
                rank: gamma as u64 + 1,
                d0: d0 as u64,
                dp: dp.into_iter().map(|(p, d)| (p.to_string(), d)).collect(),
                verdict,
                torsion_factors: torsion,
                engine: "linear".into(),
                timings_ms: timings,
            };
            let back: ReportDocument = serde_json::from_str(&doc.to_json()).unwrap();
            prop_assert_eq!(back, doc);
        }
    }
}
