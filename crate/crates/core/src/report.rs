//! Machine-readable report structures. All serialization is deterministic:
//! fixed field order, sorted rows, and no timing or environment data inside
//! report payloads (wall-clock timing goes to stderr).

use num_traits::Signed;
use serde::Serialize;

use crate::cyclo::Cyclo;
use crate::numeric::{approx_cyclo, decimal_of};
use crate::verify::CheckOutcome;

pub const SCHEMA_VERSION: u32 = 1;

/// An exact cyclotomic value: root order, exact coordinates as
/// numerator/denominator strings, and a decimal approximation for human
/// inspection.
#[derive(Clone, Debug, Serialize)]
pub struct CycloJson {
    pub n: u64,
    pub coeffs: Vec<[String; 2]>,
    pub approx: String,
}

impl CycloJson {
    pub fn of(x: &Cyclo) -> CycloJson {
        let a = approx_cyclo(x, 64);
        CycloJson {
            n: x.order(),
            coeffs: x
                .coeffs()
                .iter()
                .map(|c| [c.numer().to_string(), c.denom().to_string()])
                .collect(),
            approx: format!(
                "{}{}{}i",
                decimal_of(&a.re, 6),
                if a.im.is_negative() { "-" } else { "+" },
                decimal_of(&a.im.abs(), 6)
            ),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ValueRow {
    pub name: String,
    pub value: CycloJson,
}

#[derive(Clone, Debug, Serialize)]
pub struct FieldJson {
    pub p: u64,
    pub f: u32,
    pub q: u64,
    pub modulus: Vec<u64>,
    pub generator: u64,
}

impl FieldJson {
    pub fn of(ctx: &crate::ffield::FieldCtx) -> FieldJson {
        FieldJson {
            p: ctx.p,
            f: ctx.f,
            q: ctx.q,
            modulus: ctx.modulus.clone(),
            generator: ctx.g.0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CountRow {
    pub w: Vec<u64>,
    pub r: u32,
    pub method: String,
    pub value: CycloJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub integer: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LSeriesJson {
    pub w: Vec<u64>,
    pub numerator: Vec<CycloJson>,
    pub denominator: Vec<CycloJson>,
    pub k: u64,
    pub certified_through: usize,
    pub sources: Vec<crate::lfun::CountSource>,
}

impl LSeriesJson {
    pub fn of(l: &crate::lfun::LSeries) -> LSeriesJson {
        LSeriesJson {
            w: l.class_w.clone(),
            numerator: l.numerator.iter().map(CycloJson::of).collect(),
            denominator: l.denominator.iter().map(CycloJson::of).collect(),
            k: l.k,
            certified_through: l.certified_through,
            sources: l.sources.clone(),
        }
    }
}

/// Top-level report: schema version, the echoed configuration, and the
/// command-specific payload.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub config: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldJson>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub values: Vec<ValueRow>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub counts: Vec<CountRow>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub lseries: Vec<LSeriesJson>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub checks: Vec<CheckOutcome>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub zeta_series: Vec<String>,
}

impl Report {
    pub fn new(command: &str, config: serde_json::Value) -> Report {
        Report {
            schema: SCHEMA_VERSION,
            command: command.to_string(),
            config,
            field: None,
            values: Vec::new(),
            counts: Vec::new(),
            lseries: Vec::new(),
            checks: Vec::new(),
            zeta_series: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }

    /// Flat CSV rendering: one row per value/count/check.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("kind,name,detail,value\n");
        let esc = |s: &str| {
            if s.contains(',') || s.contains('"') {
                format!("\"{}\"", s.replace('"', "\"\""))
            } else {
                s.to_string()
            }
        };
        for v in &self.values {
            out.push_str(&format!("value,{},,{}\n", esc(&v.name), esc(&v.value.approx)));
        }
        for c in &self.counts {
            out.push_str(&format!(
                "count,w={:?} r={},{},{}\n",
                c.w,
                c.r,
                esc(&c.method),
                esc(c.integer.as_deref().unwrap_or(&c.value.approx))
            ));
        }
        for c in &self.checks {
            out.push_str(&format!(
                "check,{},{},{}\n",
                esc(&c.name),
                esc(c.witness.as_deref().unwrap_or("")),
                if c.pass { "pass" } else { "FAIL" }
            ));
        }
        out
    }

    /// Human-readable text rendering.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# {} (schema {})\n", self.command, self.schema));
        if let Some(fj) = &self.field {
            out.push_str(&format!(
                "field: q = {}^{} = {}, modulus {:?}, generator {}\n",
                fj.p, fj.f, fj.q, fj.modulus, fj.generator
            ));
        }
        for v in &self.values {
            out.push_str(&format!("{} = {}\n", v.name, v.value.approx));
        }
        for c in &self.counts {
            out.push_str(&format!(
                "N[w={:?}, r={}] ({}) = {}\n",
                c.w,
                c.r,
                c.method,
                c.integer.as_deref().unwrap_or(&c.value.approx)
            ));
        }
        for l in &self.lseries {
            out.push_str(&format!(
                "L[w={:?}] k={} certified<=t^{}: num deg {}, den deg {}\n",
                l.w,
                l.k,
                l.certified_through,
                l.numerator.len().saturating_sub(1),
                l.denominator.len().saturating_sub(1)
            ));
        }
        if !self.zeta_series.is_empty() {
            out.push_str(&format!("zeta series: {:?}\n", self.zeta_series));
        }
        for c in &self.checks {
            out.push_str(&format!(
                "[{}] {}{}\n",
                if c.pass { "pass" } else { "FAIL" },
                c.name,
                c.witness.as_ref().map(|w| format!(" ({})", w)).unwrap_or_default()
            ));
        }
        out
    }
}
