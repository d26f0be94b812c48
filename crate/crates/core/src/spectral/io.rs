//! CSV form of a state: header `k,a_k,b_k`, a `0,mean,0` row, then one row per mode.

use std::io::{Read, Write};

use super::state::TrigState;
use crate::error::{LabError, Result};

/// 17 significant digits, enough for an exact `f64` round trip.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_state_csv<W: Write>(state: &TrigState, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["k", "a_k", "b_k"])?;
    w.write_record(["0".to_string(), fmt_f64(state.mean()), fmt_f64(0.0)])?;
    for (i, &[a, b]) in state.modes().iter().enumerate() {
        w.write_record([(i + 1).to_string(), fmt_f64(a), fmt_f64(b)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn state_to_csv_string(state: &TrigState) -> String {
    let mut buf = Vec::new();
    write_state_csv(state, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("csv output is ascii")
}

/// Parse a state CSV. Rows may come in any order; every mode `1..=N` must
/// appear exactly once, where `N` is the largest index present.
pub fn read_state_csv<R: Read>(reader: R) -> Result<TrigState> {
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let headers = r.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["k", "a_k", "b_k"] {
        return Err(LabError::Parse(format!(
            "state csv header must be `k,a_k,b_k`, found `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows: Vec<(usize, f64, f64)> = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let field = |i: usize| -> Result<&str> {
            rec.get(i)
                .ok_or_else(|| LabError::Parse(format!("row {}: missing column {}", line + 2, i + 1)))
        };
        let k: usize = field(0)?
            .parse()
            .map_err(|e| LabError::Parse(format!("row {}: bad k: {e}", line + 2)))?;
        let a: f64 = field(1)?
            .parse()
            .map_err(|e| LabError::Parse(format!("row {}: bad a_k: {e}", line + 2)))?;
        let b: f64 = field(2)?
            .parse()
            .map_err(|e| LabError::Parse(format!("row {}: bad b_k: {e}", line + 2)))?;
        rows.push((k, a, b));
    }
    let n = rows.iter().map(|r| r.0).max().unwrap_or(0);
    if n == 0 {
        return Err(LabError::Parse("state csv has no modes".into()));
    }
    let mut seen = vec![false; n + 1];
    for &(k, _, _) in &rows {
        if seen[k] {
            return Err(LabError::Parse(format!("mode {k} listed twice")));
        }
        seen[k] = true;
    }
    if let Some(k) = (1..=n).find(|&k| !seen[k]) {
        return Err(LabError::Parse(format!("mode {k} missing (N = {n})")));
    }
    TrigState::from_sparse(n, &rows)
}
