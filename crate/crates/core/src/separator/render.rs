use std::fmt::Write;

use super::{Point, SeparationResult, Subcase, TableKind, ValueTable};

/// `sigma_P` → `σ^P`, `neg_neg_p` → `¬_c¬_c p`.
pub fn display_name(name: &str) -> String {
    match name {
        "neg_p" => return "¬_c p".into(),
        "neg_neg_p" => return "¬_c¬_c p".into(),
        _ => {}
    }
    let (base, sup) = name.split_once('_').unwrap_or((name, ""));
    let greek = match base {
        "tau" => "τ",
        "sigma" => "σ",
        "psi" => "ψ",
        "phi" => "φ",
        "chi" => "χ",
        other => other,
    };
    if sup.is_empty() {
        greek.to_string()
    } else {
        format!("{greek}^{sup}")
    }
}

/// Column width, not counting combining marks.
fn width(s: &str) -> usize {
    s.chars()
        .filter(|c| !('\u{0300}'..='\u{036f}').contains(c))
        .count()
}

fn render_table(out: &mut String, t: &ValueTable) {
    let mut header = vec![String::new()];
    for c in &t.columns {
        let d = display_name(c);
        header.push(format!("⟨{d}_i⟩"));
        header.push(d);
    }
    let mut rows = vec![header];
    for row in &t.rows {
        let mut line = vec![match &row.point {
            Point::World(w) => format!("∥·∥ at {w}"),
            Point::Valuation(v) => v
                .iter()
                .map(|(s, b)| format!("{s}={}", *b as u8))
                .collect::<Vec<_>>()
                .join(" "),
        }];
        for cell in &row.cells {
            line.push(
                cell.label
                    .map_or_else(|| cell.args.to_bit_string(), str::to_string),
            );
            line.push((cell.value as u8).to_string());
        }
        rows.push(line);
    }
    let widths: Vec<usize> = (0..rows[0].len())
        .map(|j| rows.iter().map(|r| width(&r[j])).max().unwrap_or(0))
        .collect();
    for r in &rows {
        let cells: Vec<String> = r
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c}{}", " ".repeat(w - width(c))))
            .collect();
        let _ = writeln!(out, "  {}", cells.join(" | ").trim_end());
    }
}

/// Plain-text report with the construction, both value tables and the
/// verification transcript.
pub fn render_human(r: &SeparationResult) -> String {
    let mut out = String::new();
    let c = &r.connective;
    let subcase = match r.subcase {
        Subcase::One => ", subcase 1",
        Subcase::Two => ", subcase 2",
        Subcase::None => "",
    };
    let _ = writeln!(
        out,
        "connective {} (arity {}, table {}): case ({}){subcase}",
        c.name(),
        c.arity(),
        c.outputs().to_bit_string(),
        r.case
    );
    let witnesses: Vec<String> = r
        .witnesses
        .named()
        .into_iter()
        .filter(|(l, _)| !matches!(*l, "1̄" | "0̄"))
        .map(|(l, v)| format!("{l} = {v}"))
        .collect();
    let _ = writeln!(out, "witnesses: {}", witnesses.join(", "));
    for (name, f) in &r.auxiliary {
        let _ = writeln!(out, "{} = {f}", display_name(name));
    }
    let _ = writeln!(out, "sequent: {}", r.sequent);
    let worlds = r.countermodel.worlds();
    let _ = writeln!(
        out,
        "countermodel {}: chain {}, refuted at {}",
        r.model_name,
        worlds.join(" ⪯ "),
        worlds[r.failing_world]
    );
    for t in &r.tables {
        let title = match t.kind {
            TableKind::Classical => "classical values",
            TableKind::Kripke => "values in the countermodel",
        };
        let _ = writeln!(out, "{title}:");
        render_table(&mut out, t);
    }
    for note in &r.notes {
        let _ = writeln!(out, "note: {note}");
    }
    let v = &r.verification;
    let _ = writeln!(
        out,
        "verification: {} ({} checks)",
        if v.passed { "passed" } else { "FAILED" },
        v.checks.len()
    );
    for check in &v.checks {
        let mark = if check.passed { "ok" } else { "FAIL" };
        if check.detail.is_empty() {
            let _ = writeln!(out, "  [{mark}] {}", check.name);
        } else {
            let _ = writeln!(out, "  [{mark}] {}: {}", check.name, check.detail);
        }
    }
    out
}
