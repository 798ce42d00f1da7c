//! Static analysis: variables, connectivity, well-designedness, UNION
//! normal form and complexity fragments.

mod unf;
mod vars;
mod well_designed;

use serde::Serialize;

pub use unf::{
    classify_fragment, is_union_normal_form, operators_used, to_union_normal_form,
    unions_only_at_top_or_in_optional_right, Complexity, FragmentLabel, Operator,
};
pub use vars::{connected, occurrences, vars_of, HasVars};
pub use well_designed::{check_pattern, check_well_designed, Location, Violation, WellDesignedReport};

use crate::syntax::{serialize_pattern, Query};

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub well_designed: WellDesignedReport,
    pub union_normal_form: bool,
    pub fragment: FragmentLabel,
    /// Normalized pattern text, when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unf: Option<String>,
}

pub fn analyze(q: &Query, with_unf: bool) -> AnalysisReport {
    let wd = check_well_designed(q);
    let fragment = classify_fragment(&q.pattern, &wd);
    AnalysisReport {
        union_normal_form: is_union_normal_form(&q.pattern),
        unf: with_unf.then(|| serialize_pattern(&to_union_normal_form(&q.pattern), &q.prefixes)),
        well_designed: wd,
        fragment,
    }
}

impl AnalysisReport {
    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let ops: Vec<String> = self
            .fragment
            .operators_used
            .iter()
            .map(|o| serde_json::to_value(o).expect("enum").as_str().unwrap_or("").to_string())
            .collect();
        s.push_str(&format!("fragment: {}\n", self.fragment.label));
        s.push_str(&format!("operators: {}\n", if ops.is_empty() { "-".to_string() } else { ops.join(" ") }));
        s.push_str(&format!("union normal form: {}\n", yes_no(self.union_normal_form)));
        s.push_str(&format!("well-designed: {}\n", yes_no(self.well_designed.well_designed)));
        for v in &self.well_designed.filter_violations {
            s.push_str(&format!("  FILTER at {}: {}\n", v.location, join_vars(&v.variables)));
        }
        for v in &self.well_designed.opt_violations {
            s.push_str(&format!("  OPTIONAL at {}: {}\n", v.location, join_vars(&v.variables)));
        }
        if let Some(u) = &self.unf {
            s.push_str("unf:\n");
            s.push_str(u);
        }
        s
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn join_vars(vs: &std::collections::BTreeSet<crate::syntax::Variable>) -> String {
    vs.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}
