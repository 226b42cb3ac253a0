//! Fixed-format MPS writer and reader.
//!
//! Field positions follow the classic layout (fields at columns 2, 5,
//! 15, 25). Names longer than eight characters overflow their field
//! and push the rest of the line right, which every whitespace-based
//! reader (including ours) accepts. Values are printed with Rust's
//! shortest-roundtrip float formatting so a write/parse cycle
//! reproduces the model exactly.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{LinearModel, ModelError, Sense, VarId, VarKind};

const OBJ_NAME: &str = "OBJ";

pub fn write_mps(model: &LinearModel) -> String {
    let mut out = String::new();
    let name = if model.name.is_empty() {
        "MODEL"
    } else {
        &model.name
    };
    let _ = writeln!(out, "NAME          {name}");

    out.push_str("ROWS\n");
    let _ = writeln!(out, " N  {OBJ_NAME}");
    for row in &model.rows {
        let c = match row.sense {
            Sense::Le => 'L',
            Sense::Eq => 'E',
            Sense::Ge => 'G',
        };
        let _ = writeln!(out, " {c}  {}", row.name);
    }

    // Transpose rows into per-variable column lists.
    let mut columns: Vec<Vec<(usize, f64)>> = vec![Vec::new(); model.num_vars()];
    for (ri, row) in model.rows.iter().enumerate() {
        for &(v, c) in &row.coeffs {
            columns[v.idx()].push((ri, c));
        }
    }
    let mut obj: Vec<f64> = vec![0.0; model.num_vars()];
    let mut in_obj: Vec<bool> = vec![false; model.num_vars()];
    for &(v, c) in &model.objective {
        obj[v.idx()] = c;
        in_obj[v.idx()] = true;
    }

    out.push_str("COLUMNS\n");
    let mut marker_count = 0usize;
    let mut in_int = false;
    for (vi, var) in model.vars.iter().enumerate() {
        let want_int = var.kind != VarKind::Continuous;
        if want_int != in_int {
            let tag = if want_int { "'INTORG'" } else { "'INTEND'" };
            let _ = writeln!(
                out,
                "    MARKER{:<4}              'MARKER'                 {tag}",
                marker_count
            );
            marker_count += 1;
            in_int = want_int;
        }
        let mut wrote_any = false;
        if in_obj[vi] || (columns[vi].is_empty() && obj[vi] == 0.0) {
            // An explicit (possibly zero) objective entry keeps otherwise
            // empty columns present in the file, preserving variable order.
            let _ = writeln!(out, "    {:<8}  {:<8}  {}", var.name, OBJ_NAME, obj[vi]);
            wrote_any = true;
        }
        for &(ri, c) in &columns[vi] {
            let _ = writeln!(out, "    {:<8}  {:<8}  {}", var.name, model.rows[ri].name, c);
            wrote_any = true;
        }
        let _ = wrote_any;
    }
    if in_int {
        let _ = writeln!(
            out,
            "    MARKER{:<4}              'MARKER'                 'INTEND'",
            marker_count
        );
    }

    out.push_str("RHS\n");
    for row in &model.rows {
        if row.rhs != 0.0 {
            let _ = writeln!(out, "    {:<8}  {:<8}  {}", "RHS", row.name, row.rhs);
        }
    }

    out.push_str("BOUNDS\n");
    for var in &model.vars {
        let name = &var.name;
        match var.kind {
            VarKind::Binary => {
                let _ = writeln!(out, " BV {:<8}  {}", "BND", name);
            }
            VarKind::Integer => {
                // Explicit bounds always: some readers default integer
                // uppers to 1 inside markers.
                if var.lower == var.upper {
                    let _ = writeln!(out, " FX {:<8}  {:<8}  {}", "BND", name, var.lower);
                } else {
                    if var.lower.is_infinite() {
                        let _ = writeln!(out, " MI {:<8}  {}", "BND", name);
                    } else {
                        let _ = writeln!(out, " LO {:<8}  {:<8}  {}", "BND", name, var.lower);
                    }
                    if var.upper.is_infinite() {
                        let _ = writeln!(out, " PL {:<8}  {}", "BND", name);
                    } else {
                        let _ = writeln!(out, " UP {:<8}  {:<8}  {}", "BND", name, var.upper);
                    }
                }
            }
            VarKind::Continuous => {
                if var.lower == 0.0 && var.upper == f64::INFINITY {
                    // MPS default.
                } else if var.lower == var.upper {
                    let _ = writeln!(out, " FX {:<8}  {:<8}  {}", "BND", name, var.lower);
                } else if var.lower.is_infinite() && var.upper.is_infinite() {
                    let _ = writeln!(out, " FR {:<8}  {}", "BND", name);
                } else {
                    if var.lower.is_infinite() {
                        let _ = writeln!(out, " MI {:<8}  {}", "BND", name);
                    } else if var.lower != 0.0 {
                        let _ = writeln!(out, " LO {:<8}  {:<8}  {}", "BND", name, var.lower);
                    }
                    if var.upper.is_finite() {
                        let _ = writeln!(out, " UP {:<8}  {:<8}  {}", "BND", name, var.upper);
                    }
                }
            }
        }
    }

    out.push_str("ENDATA\n");
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Rows,
    Columns,
    Rhs,
    Bounds,
    Done,
}

pub fn parse_mps(text: &str) -> Result<LinearModel, ModelError> {
    let mut model = LinearModel::default();
    let mut section = Section::None;
    let mut in_int = false;

    let mut var_ids: HashMap<String, VarId> = HashMap::new();
    let mut row_ids: HashMap<String, usize> = HashMap::new();
    // Coefficients gathered per row; merged into the model at the end.
    let mut row_coeffs: Vec<Vec<(VarId, f64)>> = Vec::new();
    let mut obj_coeffs: Vec<(VarId, f64)> = Vec::new();
    let mut obj_row: Option<String> = None;

    let err = |line: usize, msg: &str| ModelError::Parse {
        line,
        msg: msg.to_string(),
    };
    let parse_num = |tok: &str, line: usize| -> Result<f64, ModelError> {
        tok.parse::<f64>()
            .map_err(|_| err(line, &format!("bad number `{tok}`")))
    };

    for (lno, raw) in text.lines().enumerate() {
        let lno = lno + 1;
        if raw.starts_with('*') || raw.trim().is_empty() {
            continue;
        }
        let is_header = !raw.starts_with(' ') && !raw.starts_with('\t');
        let toks: Vec<&str> = raw.split_whitespace().collect();
        if is_header {
            match toks[0].to_ascii_uppercase().as_str() {
                "NAME" => {
                    model.name = toks.get(1).unwrap_or(&"").to_string();
                }
                "ROWS" => section = Section::Rows,
                "COLUMNS" => section = Section::Columns,
                "RHS" => section = Section::Rhs,
                "RANGES" => return Err(err(lno, "RANGES section not supported")),
                "BOUNDS" => section = Section::Bounds,
                "ENDATA" => {
                    section = Section::Done;
                    break;
                }
                other => return Err(err(lno, &format!("unknown section `{other}`"))),
            }
            continue;
        }
        match section {
            Section::Rows => {
                if toks.len() != 2 {
                    return Err(err(lno, "expected `<sense> <name>`"));
                }
                let name = toks[1].to_string();
                match toks[0].to_ascii_uppercase().as_str() {
                    "N" => {
                        if obj_row.is_some() {
                            return Err(err(lno, "multiple N rows not supported"));
                        }
                        obj_row = Some(name);
                    }
                    s => {
                        let sense = match s {
                            "L" => Sense::Le,
                            "G" => Sense::Ge,
                            "E" => Sense::Eq,
                            _ => return Err(err(lno, &format!("bad row sense `{s}`"))),
                        };
                        if row_ids.insert(name.clone(), model.rows.len()).is_some() {
                            return Err(err(lno, &format!("duplicate row `{name}`")));
                        }
                        model.rows.push(super::Row {
                            name,
                            coeffs: Vec::new(),
                            sense,
                            rhs: 0.0,
                        });
                        row_coeffs.push(Vec::new());
                    }
                }
            }
            Section::Columns => {
                if raw.contains("'MARKER'") {
                    if raw.contains("'INTORG'") {
                        in_int = true;
                    } else if raw.contains("'INTEND'") {
                        in_int = false;
                    } else {
                        return Err(err(lno, "unrecognised marker line"));
                    }
                    continue;
                }
                if toks.len() < 3 || toks.len().is_multiple_of(2) {
                    return Err(err(lno, "expected `<col> (<row> <value>)+`"));
                }
                let col = toks[0];
                let vid = match var_ids.get(col) {
                    Some(&v) => v,
                    None => {
                        let kind = if in_int {
                            VarKind::Integer
                        } else {
                            VarKind::Continuous
                        };
                        let v = VarId(model.vars.len());
                        model.vars.push(super::Variable {
                            name: col.to_string(),
                            lower: 0.0,
                            upper: f64::INFINITY,
                            kind,
                        });
                        var_ids.insert(col.to_string(), v);
                        v
                    }
                };
                for pair in toks[1..].chunks(2) {
                    let value = parse_num(pair[1], lno)?;
                    if Some(pair[0]) == obj_row.as_deref() {
                        obj_coeffs.push((vid, value));
                    } else {
                        let &ri = row_ids
                            .get(pair[0])
                            .ok_or_else(|| err(lno, &format!("unknown row `{}`", pair[0])))?;
                        row_coeffs[ri].push((vid, value));
                    }
                }
            }
            Section::Rhs => {
                if toks.len() < 3 || toks.len().is_multiple_of(2) {
                    return Err(err(lno, "expected `<set> (<row> <value>)+`"));
                }
                for pair in toks[1..].chunks(2) {
                    if Some(pair[0]) == obj_row.as_deref() {
                        return Err(err(lno, "objective rhs not supported"));
                    }
                    let &ri = row_ids
                        .get(pair[0])
                        .ok_or_else(|| err(lno, &format!("unknown row `{}`", pair[0])))?;
                    model.rows[ri].rhs = parse_num(pair[1], lno)?;
                }
            }
            Section::Bounds => {
                let kind = toks[0].to_ascii_uppercase();
                let needs_value = matches!(kind.as_str(), "UP" | "LO" | "FX" | "UI" | "LI");
                let min_toks = if needs_value { 4 } else { 3 };
                if toks.len() < min_toks {
                    return Err(err(lno, "short bounds line"));
                }
                let col = toks[2];
                let vid = match var_ids.get(col) {
                    Some(&v) => v,
                    None => {
                        let v = VarId(model.vars.len());
                        model.vars.push(super::Variable {
                            name: col.to_string(),
                            lower: 0.0,
                            upper: f64::INFINITY,
                            kind: VarKind::Continuous,
                        });
                        var_ids.insert(col.to_string(), v);
                        v
                    }
                };
                let var = &mut model.vars[vid.idx()];
                match kind.as_str() {
                    "UP" => var.upper = parse_num(toks[3], lno)?,
                    "LO" => var.lower = parse_num(toks[3], lno)?,
                    "FX" => {
                        var.lower = parse_num(toks[3], lno)?;
                        var.upper = var.lower;
                    }
                    "FR" => {
                        var.lower = f64::NEG_INFINITY;
                        var.upper = f64::INFINITY;
                    }
                    "MI" => var.lower = f64::NEG_INFINITY,
                    "PL" => var.upper = f64::INFINITY,
                    "BV" => {
                        var.kind = VarKind::Binary;
                        var.lower = 0.0;
                        var.upper = 1.0;
                    }
                    "UI" => {
                        var.kind = VarKind::Integer;
                        var.upper = parse_num(toks[3], lno)?;
                    }
                    "LI" => {
                        var.kind = VarKind::Integer;
                        var.lower = parse_num(toks[3], lno)?;
                    }
                    other => return Err(err(lno, &format!("bound type `{other}` not supported"))),
                }
            }
            Section::None | Section::Done => {
                return Err(err(lno, "data before first section header"));
            }
        }
    }
    if section != Section::Done {
        return Err(ModelError::Parse {
            line: text.lines().count(),
            msg: "missing ENDATA".into(),
        });
    }

    for (ri, coeffs) in row_coeffs.into_iter().enumerate() {
        let merged = model.merge_coeffs(coeffs, "row")?;
        model.rows[ri].coeffs = merged;
    }
    model.objective = model.merge_coeffs(obj_coeffs, "objective")?;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> LinearModel {
        let mut m = LinearModel::new("toy");
        let x = m.add_var("x", 0.0, 1.0, VarKind::Continuous).unwrap();
        m.add_constraint("cap", [(x, 2.0)], Sense::Le, 3.0).unwrap();
        m.set_objective([(x, -1.0)]).unwrap();
        m
    }

    // Audited by hand against the fixed-format layout.
    const TOY_GOLDEN: &str = "\
NAME          toy
ROWS
 N  OBJ
 L  cap
COLUMNS
    x         OBJ       -1
    x         cap       2
RHS
    RHS       cap       3
BOUNDS
 UP BND       x         1
ENDATA
";

    // Field layout: names pad to eight characters with two separating
    // spaces, so even overlong names never fuse with the next field.

    #[test]
    fn golden_file() {
        assert_eq!(write_mps(&toy()), TOY_GOLDEN);
    }

    #[test]
    fn roundtrip_structural_identity() {
        let m = toy();
        let back = parse_mps(&write_mps(&m)).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn integer_markers_present() {
        let mut m = LinearModel::new("t");
        let x = m.add_var("x", 0.0, 5.0, VarKind::Integer).unwrap();
        let b = m.add_var("b", 0.0, 1.0, VarKind::Binary).unwrap();
        m.add_constraint("c", [(x, 1.0), (b, 1.0)], Sense::Ge, 1.0)
            .unwrap();
        m.set_objective([(x, 1.0), (b, 2.0)]).unwrap();
        let text = write_mps(&m);
        assert!(text.contains("'INTORG'"));
        assert!(text.contains("'INTEND'"));
        assert!(text.contains(" BV "));
        let back = parse_mps(&text).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn empty_column_kept_via_zero_objective_entry() {
        let mut m = LinearModel::new("t");
        m.add_var("lonely", 0.0, 2.0, VarKind::Continuous).unwrap();
        let back = parse_mps(&write_mps(&m)).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_mps("HELLO\n").is_err());
        assert!(parse_mps("NAME x\nROWS\n L  c\nCOLUMNS\n").is_err()); // no ENDATA
    }
}
