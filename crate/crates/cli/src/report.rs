use std::fmt::Write as _;

use median_hardy::{CheckKind, Scalar, VerificationReport};
use serde_json::{json, Value};

pub const SCHEMA: u32 = 1;

/// One row of the report: a single check, or the tightest case of a check
/// repeated over many random cases.
#[derive(Debug, Clone)]
pub struct CheckRecord {
    pub case: String,
    pub kind: String,
    pub cases: usize,
    pub violations: usize,
    pub lhs: Value,
    pub rhs: Value,
    pub ratio: Option<Value>,
    pub ratio_f64: Option<f64>,
    pub holds: bool,
    pub witness: Option<Value>,
    pub location: Option<Value>,
}

pub fn kind_name(kind: CheckKind) -> String {
    match serde_json::to_value(kind) {
        Ok(Value::String(s)) => s,
        _ => format!("{kind:?}"),
    }
}

fn ratio_f64<S: Scalar>(r: &VerificationReport<S>) -> Option<f64> {
    r.ratio.as_ref().map(Scalar::to_f64)
}

impl CheckRecord {
    pub fn single<S: Scalar>(case: &str, r: &VerificationReport<S>) -> Self {
        Self::from_report(case.to_string(), 1, usize::from(!r.holds), r)
    }

    fn from_report<S: Scalar>(case: String, cases: usize, violations: usize, r: &VerificationReport<S>) -> Self {
        CheckRecord {
            case,
            kind: kind_name(r.kind),
            cases,
            violations,
            lhs: r.lhs.to_json(),
            rhs: r.rhs.to_json(),
            ratio: r.ratio.as_ref().map(Scalar::to_json),
            ratio_f64: ratio_f64(r),
            holds: r.holds,
            witness: r.witness.as_ref().map(|w| w.to_json()),
            location: r.location.as_ref().map(|w| w.to_json()),
        }
    }

    /// A check on plain floats that is not one of the library's kinds.
    pub fn named(case: &str, kind: &str, lhs: f64, rhs: f64, holds: bool) -> Self {
        let ratio = if rhs != 0.0 { Some(lhs / rhs) } else { None };
        CheckRecord {
            case: case.to_string(),
            kind: kind.to_string(),
            cases: 1,
            violations: usize::from(!holds),
            lhs: lhs.to_json(),
            rhs: rhs.to_json(),
            ratio: ratio.map(|r| r.to_json()),
            ratio_f64: ratio,
            holds,
            witness: None,
            location: None,
        }
    }

    fn to_json(&self) -> Value {
        json!({
            "case": self.case,
            "kind": self.kind,
            "cases": self.cases,
            "violations": self.violations,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "ratio": self.ratio,
            "holds": self.holds,
            "witness": self.witness,
            "location": self.location,
        })
    }
}

/// Running summary of one check kind over many random cases.
///
/// Keeps the first violation (lowest case index) or, if none, the case with
/// the largest ratio (lowest index on ties). Merging is associative and
/// commutative, so the result does not depend on how cases were split
/// between workers.
#[derive(Debug, Clone)]
pub struct KindTally<S> {
    pub cases: usize,
    pub violations: usize,
    worst: Option<(usize, VerificationReport<S>)>,
}

impl<S: Scalar> KindTally<S> {
    #[cfg(test)]
    pub fn empty() -> Self {
        KindTally {
            cases: 0,
            violations: 0,
            worst: None,
        }
    }

    pub fn of(index: usize, report: VerificationReport<S>) -> Self {
        KindTally {
            cases: 1,
            violations: usize::from(!report.holds),
            worst: Some((index, report)),
        }
    }

    fn beats(a: &(usize, VerificationReport<S>), b: &(usize, VerificationReport<S>)) -> bool {
        let key = |(i, r): &(usize, VerificationReport<S>)| {
            let ratio = ratio_f64(r).unwrap_or(f64::INFINITY);
            (!r.holds, ratio, std::cmp::Reverse(*i))
        };
        let (va, ra, ia) = key(a);
        let (vb, rb, ib) = key(b);
        match va.cmp(&vb) {
            std::cmp::Ordering::Equal => {}
            o => return o.is_gt(),
        }
        if va {
            return ia > ib;
        }
        match ra.total_cmp(&rb) {
            std::cmp::Ordering::Equal => ia > ib,
            o => o.is_gt(),
        }
    }

    pub fn merge(self, other: Self) -> Self {
        let worst = match (self.worst, other.worst) {
            (Some(a), Some(b)) => Some(if Self::beats(&a, &b) { a } else { b }),
            (a, b) => a.or(b),
        };
        KindTally {
            cases: self.cases + other.cases,
            violations: self.violations + other.violations,
            worst,
        }
    }

    pub fn record(&self) -> Option<CheckRecord> {
        self.worst
            .as_ref()
            .map(|(i, r)| CheckRecord::from_report(format!("random#{i}"), self.cases, self.violations, r))
    }
}

/// Elementwise merge of per-kind tallies.
pub fn merge_tallies<S: Scalar>(a: Vec<KindTally<S>>, b: Vec<KindTally<S>>) -> Vec<KindTally<S>> {
    if a.is_empty() {
        return b;
    }
    if b.is_empty() {
        return a;
    }
    a.into_iter().zip(b).map(|(x, y)| x.merge(y)).collect()
}

/// A table for CSV and human output.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    fn to_human(&self) -> String {
        let mut widths: Vec<usize> = self.header.iter().map(String::len).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let line = |cells: &[String]| {
            let parts: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
            format!("  {}\n", parts.join("  "))
        };
        let mut out = format!("{}:\n", self.name);
        out.push_str(&line(&self.header));
        for row in &self.rows {
            out.push_str(&line(row));
        }
        out
    }
}

pub struct Report {
    pub config: Value,
    pub sharp_constant: f64,
    pub checks: Vec<CheckRecord>,
    /// Kind whose ratios feed `max_ratio`.
    pub headline: Option<String>,
    /// Overrides the headline-derived maximum.
    pub max_ratio: Option<f64>,
    /// Extra structured output (curves, tables).
    pub data: Option<Value>,
    pub tables: Vec<Table>,
    pub timing_ms: Option<f64>,
}

impl Report {
    pub fn new(config: Value, sharp_constant: f64) -> Self {
        Report {
            config,
            sharp_constant,
            checks: Vec::new(),
            headline: None,
            max_ratio: None,
            data: None,
            tables: Vec::new(),
            timing_ms: None,
        }
    }

    pub fn checks_run(&self) -> usize {
        self.checks.iter().map(|c| c.cases).sum()
    }

    pub fn violations(&self) -> usize {
        self.checks.iter().map(|c| c.violations).sum()
    }

    pub fn max_ratio(&self) -> Option<f64> {
        if self.max_ratio.is_some() {
            return self.max_ratio;
        }
        let headline = self.headline.as_ref()?;
        self.checks
            .iter()
            .filter(|c| &c.kind == headline)
            .filter_map(|c| c.ratio_f64)
            .reduce(f64::max)
    }

    pub fn to_json(&self) -> String {
        let mut v = json!({
            "schema": SCHEMA,
            "config": self.config,
            "sharp_constant": self.sharp_constant,
            "checks": self.checks.iter().map(CheckRecord::to_json).collect::<Vec<_>>(),
            "aggregate": {
                "checks_run": self.checks_run(),
                "violations": self.violations(),
                "max_ratio": self.max_ratio(),
                "max_ratio_kind": self.headline,
            },
        });
        let m = v.as_object_mut().expect("object");
        if let Some(data) = &self.data {
            m.insert("data".into(), data.clone());
        }
        if let Some(ms) = self.timing_ms {
            m.insert("timing".into(), json!({ "wall_ms": ms }));
        }
        let mut s = serde_json::to_string_pretty(&v).expect("serializable");
        s.push('\n');
        s
    }

    /// The first table if there is one, otherwise the checks.
    pub fn to_csv(&self) -> String {
        if let Some(t) = self.tables.first() {
            return t.to_csv();
        }
        let mut t = Table::new(
            "checks",
            &["case", "kind", "cases", "violations", "lhs", "rhs", "ratio", "holds"],
        );
        for c in &self.checks {
            t.push(vec![
                c.case.clone(),
                c.kind.clone(),
                c.cases.to_string(),
                c.violations.to_string(),
                plain(&c.lhs),
                plain(&c.rhs),
                c.ratio.as_ref().map(plain).unwrap_or_default(),
                c.holds.to_string(),
            ]);
        }
        t.to_csv()
    }

    pub fn to_human(&self) -> String {
        let mut out = String::new();
        let cfg = &self.config;
        let _ = writeln!(
            out,
            "{}  p = {}  backend = {}  C_p = {}",
            cfg["command"].as_str().unwrap_or(""),
            cfg["p"].as_f64().unwrap_or(f64::NAN),
            cfg["backend"].as_str().unwrap_or(""),
            sig6(self.sharp_constant)
        );
        for c in &self.checks {
            let ratio = c.ratio_f64.map(sig6).unwrap_or_else(|| "inf".into());
            let _ = write!(
                out,
                "  {:<6} {:<28} {:<12} ratio {:>10}",
                if c.holds { "ok" } else { "FAIL" },
                c.kind,
                c.case,
                ratio
            );
            if c.cases > 1 {
                let _ = write!(out, "  (max over {} cases, {} violations)", c.cases, c.violations);
            }
            if let Some(w) = &c.witness {
                let _ = write!(out, "  witness {w}");
            } else if let Some(at) = &c.location {
                let _ = write!(out, "  at {at}");
            }
            out.push('\n');
        }
        for t in &self.tables {
            out.push_str(&t.to_human());
        }
        if !self.checks.is_empty() {
            let _ = write!(
                out,
                "checks run: {}  violations: {}",
                self.checks_run(),
                self.violations()
            );
            if let Some(r) = self.max_ratio() {
                let _ = write!(
                    out,
                    "  max ratio: {} (C_p = {}, ratio/C_p = {})",
                    sig6(r),
                    sig6(self.sharp_constant),
                    sig6(r / self.sharp_constant)
                );
            }
            out.push('\n');
        }
        if let Some(ms) = self.timing_ms {
            let _ = writeln!(out, "elapsed: {:.1} ms", ms);
        }
        out
    }
}

/// JSON scalar without quotes.
pub fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// Six significant digits.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-4..6).contains(&mag) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - mag).max(0) as usize;
    format!("{x:.decimals$}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(2.0), "2.00000");
        assert_eq!(sig6(0.6137056388801094), "0.613706");
        assert_eq!(sig6(1.617427637821491), "1.61743");
        assert_eq!(sig6(123456.7), "123457");
        assert_eq!(sig6(1234567.0), "1.23457e6");
        assert_eq!(sig6(0.0), "0");
    }

    fn report(ratio: f64, holds: bool) -> VerificationReport<f64> {
        VerificationReport {
            kind: CheckKind::PrefixBound,
            lhs: ratio,
            rhs: 1.0,
            ratio: Some(ratio),
            holds,
            witness: None,
            location: None,
        }
    }

    #[test]
    fn tally_merge_is_order_independent() {
        let items = [
            (0, 0.5, true),
            (1, 0.9, true),
            (2, 0.9, true),
            (3, 2.0, false),
            (4, 3.0, false),
        ];
        let tallies: Vec<KindTally<f64>> = items.iter().map(|&(i, r, h)| KindTally::of(i, report(r, h))).collect();
        let fwd = tallies.iter().cloned().fold(KindTally::empty(), KindTally::merge);
        let rev = tallies.iter().rev().cloned().fold(KindTally::empty(), KindTally::merge);
        for t in [fwd, rev] {
            let rec = t.record().unwrap();
            assert_eq!(rec.case, "random#3");
            assert_eq!((rec.cases, rec.violations), (5, 2));
        }
        let ok: Vec<KindTally<f64>> = tallies[..3].to_vec();
        let a = ok.iter().cloned().fold(KindTally::empty(), KindTally::merge);
        let b = ok.iter().rev().cloned().fold(KindTally::empty(), KindTally::merge);
        assert_eq!(a.record().unwrap().case, "random#1");
        assert_eq!(b.record().unwrap().case, "random#1");
    }
}
