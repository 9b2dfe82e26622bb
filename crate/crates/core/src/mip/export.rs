//! Fixed-format MPS and CPLEX LP writers.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::model::{LinearModel, ObjSense, Sense, VarKind};
use super::MipError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelFormat {
    Mps,
    Lp,
}

pub fn write_model(model: &LinearModel, format: ModelFormat, path: &Path) -> Result<(), MipError> {
    let text = match format {
        ModelFormat::Mps => to_mps(model),
        ModelFormat::Lp => to_lp(model),
    };
    fs::write(path, text)?;
    Ok(())
}

/// Renders a number in at most 12 characters, as fixed MPS fields require.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if v.fract() == 0.0 && v.abs() < 1e11 {
        return format!("{}", v as i64);
    }
    for prec in (1..=10).rev() {
        let s = trim_fixed(format!("{v:.prec$}"));
        if s.len() <= 12 && s.parse::<f64>().is_ok_and(|p| p != 0.0 || v == 0.0) {
            return s;
        }
    }
    for prec in (0..=6).rev() {
        let s = format!("{v:.prec$E}");
        if s.len() <= 12 {
            return s;
        }
    }
    format!("{v:E}")
}

fn trim_fixed(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn mps_names(model: &LinearModel) -> (Vec<String>, Vec<String>) {
    let ok = |s: &str| !s.is_empty() && s.len() <= 8 && !s.contains(char::is_whitespace);
    let cols: Vec<String> = if model.vars.iter().all(|v| ok(&v.name)) {
        model.vars.iter().map(|v| v.name.clone()).collect()
    } else {
        (0..model.vars.len()).map(|j| format!("C{:07}", j + 1)).collect()
    };
    let rows: Vec<String> = if model.cons.iter().all(|c| ok(&c.name) && c.name != "OBJ") {
        model.cons.iter().map(|c| c.name.clone()).collect()
    } else {
        (0..model.cons.len()).map(|i| format!("R{:07}", i + 1)).collect()
    };
    (cols, rows)
}

pub fn to_mps(model: &LinearModel) -> String {
    let (cols, rows) = mps_names(model);
    let mut out = String::new();
    let name = if model.name.is_empty() { "MODEL" } else { &model.name };
    let _ = writeln!(out, "NAME          {name}");
    if model.obj_sense == ObjSense::Maximize {
        let _ = writeln!(out, "OBJSENSE\n    MAX");
    }
    out.push_str("ROWS\n N  OBJ\n");
    for (c, rn) in model.cons.iter().zip(&rows) {
        let s = match c.sense {
            Sense::Le => "L",
            Sense::Ge => "G",
            Sense::Eq => "E",
        };
        let _ = writeln!(out, " {s}  {rn}");
    }

    // Column-major view of the matrix.
    let mut by_col: Vec<Vec<(usize, f64)>> = vec![Vec::new(); model.vars.len()];
    for (i, c) in model.cons.iter().enumerate() {
        for &(j, a) in &c.coeffs {
            by_col[j].push((i, a));
        }
    }
    let obj = model.dense_objective();

    out.push_str("COLUMNS\n");
    let mut in_int = false;
    let mut marker = 0;
    for (j, v) in model.vars.iter().enumerate() {
        let is_int = v.kind != VarKind::Continuous;
        if is_int != in_int {
            let tag = if is_int { "'INTORG'" } else { "'INTEND'" };
            let _ = writeln!(out, "    {:<8}  {:<8}  {}", format!("MARKER{marker:02}"), "'MARKER'", tag);
            marker += 1;
            in_int = is_int;
        }
        let mut entries: Vec<(&str, f64)> = Vec::new();
        if obj[j] != 0.0 {
            entries.push(("OBJ", obj[j]));
        }
        for &(i, a) in &by_col[j] {
            entries.push((&rows[i], a));
        }
        if entries.is_empty() {
            // keep the column visible to readers
            entries.push(("OBJ", 0.0));
        }
        for (rn, a) in entries {
            let _ = writeln!(out, "    {:<8}  {:<8}  {:>12}", cols[j], rn, fmt_num(a));
        }
    }
    if in_int {
        let _ = writeln!(out, "    {:<8}  {:<8}  'INTEND'", format!("MARKER{marker:02}"), "'MARKER'");
    }

    out.push_str("RHS\n");
    if model.obj_offset != 0.0 {
        let _ = writeln!(out, "    {:<8}  {:<8}  {:>12}", "RHS", "OBJ", fmt_num(-model.obj_offset));
    }
    for (c, rn) in model.cons.iter().zip(&rows) {
        if c.rhs != 0.0 {
            let _ = writeln!(out, "    {:<8}  {:<8}  {:>12}", "RHS", rn, fmt_num(c.rhs));
        }
    }

    out.push_str("BOUNDS\n");
    for (v, cn) in model.vars.iter().zip(&cols) {
        let line = |tag: &str, val: Option<f64>| match val {
            Some(x) => format!(" {tag} {:<8}  {:<8}  {:>12}\n", "BND", cn, fmt_num(x)),
            None => format!(" {tag} {:<8}  {:<8}\n", "BND", cn),
        };
        if v.lb == v.ub {
            out.push_str(&line("FX", Some(v.lb)));
            continue;
        }
        match (v.lb.is_finite(), v.ub.is_finite()) {
            (false, false) => out.push_str(&line("FR", None)),
            (false, true) => {
                out.push_str(&line("MI", None));
                out.push_str(&line("UP", Some(v.ub)));
            }
            (true, ub_fin) => {
                out.push_str(&line("LO", Some(v.lb)));
                if ub_fin {
                    out.push_str(&line("UP", Some(v.ub)));
                }
            }
        }
    }
    out.push_str("ENDATA\n");
    out
}

fn lp_name(s: &str, fallback: String) -> String {
    let valid = !s.is_empty()
        && !s.starts_with(|c: char| c.is_ascii_digit() || c == '.' || c == 'e' || c == 'E')
        && s.chars().all(|c| c.is_ascii_alphanumeric() || "_[](),.".contains(c));
    if valid {
        s.to_string()
    } else {
        fallback
    }
}

fn lp_terms(terms: &[(usize, f64)], names: &[String]) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut s = String::new();
    for (k, &(j, a)) in terms.iter().enumerate() {
        let sign = if a < 0.0 { "-" } else { "+" };
        if k == 0 {
            if a < 0.0 {
                s.push_str("- ");
            }
        } else {
            let _ = write!(s, " {sign} ");
        }
        let _ = write!(s, "{} {}", fmt_num(a.abs()), names[j]);
    }
    s
}

pub fn to_lp(model: &LinearModel) -> String {
    let names: Vec<String> = model
        .vars
        .iter()
        .enumerate()
        .map(|(j, v)| lp_name(&v.name, format!("x{}", j + 1)))
        .collect();
    let mut out = String::new();
    let _ = writeln!(out, "\\ {}", model.name);
    out.push_str(match model.obj_sense {
        ObjSense::Minimize => "Minimize\n",
        ObjSense::Maximize => "Maximize\n",
    });
    let mut obj: Vec<(usize, f64)> = model.objective.iter().copied().filter(|e| e.1 != 0.0).collect();
    obj.sort_by_key(|e| e.0);
    let mut line = format!(" obj: {}", lp_terms(&obj, &names));
    if model.obj_offset != 0.0 {
        let sign = if model.obj_offset < 0.0 { "-" } else { "+" };
        let _ = write!(line, " {sign} {}", fmt_num(model.obj_offset.abs()));
    }
    out.push_str(&line);
    out.push_str("\nSubject To\n");
    for (i, c) in model.cons.iter().enumerate() {
        let op = match c.sense {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        };
        let rn = lp_name(&c.name, format!("r{}", i + 1));
        let _ = writeln!(out, " {rn}: {} {op} {}", lp_terms(&c.coeffs, &names), fmt_num(c.rhs));
    }
    out.push_str("Bounds\n");
    for (v, n) in model.vars.iter().zip(&names) {
        if v.lb == v.ub {
            let _ = writeln!(out, " {n} = {}", fmt_num(v.lb));
        } else if !v.lb.is_finite() && !v.ub.is_finite() {
            let _ = writeln!(out, " {n} free");
        } else {
            let lo = if v.lb.is_finite() { fmt_num(v.lb) } else { "-inf".into() };
            let hi = if v.ub.is_finite() { fmt_num(v.ub) } else { "+inf".into() };
            let _ = writeln!(out, " {lo} <= {n} <= {hi}");
        }
    }
    let bins: Vec<&String> = model
        .vars
        .iter()
        .zip(&names)
        .filter(|(v, _)| v.kind == VarKind::Binary)
        .map(|(_, n)| n)
        .collect();
    let gens: Vec<&String> = model
        .vars
        .iter()
        .zip(&names)
        .filter(|(v, _)| v.kind == VarKind::Integer)
        .map(|(_, n)| n)
        .collect();
    if !bins.is_empty() {
        out.push_str("Binary\n");
        for n in bins {
            let _ = writeln!(out, " {n}");
        }
    }
    if !gens.is_empty() {
        out.push_str("General\n");
        for n in gens {
            let _ = writeln!(out, " {n}");
        }
    }
    out.push_str("End\n");
    out
}
