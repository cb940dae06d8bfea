//! Input parsing and file output for the command-line front end.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde_json::{json, Value};
use shrinkedge::grid::GridFunction;
use shrinkedge::resolvent::Forcing;
use shrinkedge::VertexCondition;

use crate::CliError;

pub const SCHEMA: &str = "shrinkedge/1";

/// `--vc` holds either inline JSON or a path to a JSON file.
pub fn load_vc(arg: Option<&str>) -> Result<VertexCondition, CliError> {
    let arg = arg.ok_or_else(|| CliError::Input("missing --vc".into()))?;
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).map_err(|e| CliError::Input(format!("cannot read {arg}: {e}")))?
    };
    Ok(VertexCondition::from_json(&text)?)
}

pub fn parse_eps_list(arg: &str) -> Result<Vec<f64>, CliError> {
    arg.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| CliError::Input(format!("bad ε value {s:?}: {e}")))
        })
        .collect()
}

pub fn single_eps(arg: Option<&str>, default: f64) -> Result<f64, CliError> {
    match arg {
        None => Ok(default),
        Some(s) => match parse_eps_list(s)?.as_slice() {
            [e] => Ok(*e),
            _ => Err(CliError::Input("this command takes a single --eps value".into())),
        },
    }
}

/// Parses `re,im` or a bare real number.
pub fn parse_complex(arg: &str) -> Result<Complex64, CliError> {
    let parts: Vec<&str> = arg.split(',').map(str::trim).collect();
    let num = |s: &str| {
        s.parse::<f64>()
            .map_err(|e| CliError::Input(format!("bad number {s:?}: {e}")))
    };
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(CliError::Input(format!("expected re,im, got {arg:?}"))),
    }
}

pub fn parse_mesh(arg: &str) -> Result<(usize, usize), CliError> {
    let parts: Vec<&str> = arg.split(',').map(str::trim).collect();
    let num = |s: &str| {
        s.parse::<usize>()
            .map_err(|e| CliError::Input(format!("bad mesh size {s:?}: {e}")))
    };
    match parts.as_slice() {
        [s, e] => Ok((num(s)?, num(e)?)),
        _ => Err(CliError::Input(format!("expected n_s,n_e, got {arg:?}"))),
    }
}

/// Reads a forcing CSV with header `x,re_fs,im_fs,re_fe,im_fe` sampled at
/// `x_j = j/(n-1)`.
pub fn read_forcing(path: &Path) -> Result<Forcing, CliError> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let mut xs = Vec::new();
    let mut fs_vals = Vec::new();
    let mut fe_vals = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        if rec.len() != 5 {
            return Err(CliError::Input(format!("row {}: expected 5 columns", i + 1)));
        }
        let v: Vec<f64> = rec
            .iter()
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| CliError::Input(format!("row {}: {s:?}: {e}", i + 1)))
            })
            .collect::<Result<_, _>>()?;
        xs.push(v[0]);
        fs_vals.push(Complex64::new(v[1], v[2]));
        fe_vals.push(Complex64::new(v[3], v[4]));
    }
    let n = xs.len();
    if n >= 2 {
        for (j, x) in xs.iter().enumerate() {
            if (x - j as f64 / (n - 1) as f64).abs() > 1e-9 {
                return Err(CliError::Input(format!(
                    "row {}: x = {x} is not on the uniform grid j/(n-1)",
                    j + 1
                )));
            }
        }
    }
    Ok(Forcing::new(GridFunction::new(fs_vals)?, GridFunction::new(fe_vals)?))
}

pub fn out_path(out: Option<&Path>, name: &str) -> Result<Option<PathBuf>, CliError> {
    match out {
        None => Ok(None),
        Some(dir) => {
            fs::create_dir_all(dir)
                .map_err(|e| CliError::Failure(format!("cannot create {}: {e}", dir.display())))?;
            Ok(Some(dir.join(name)))
        }
    }
}

/// Fixed 17-significant-digit float formatting for CSV.
pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)
        .map_err(|e| CliError::Failure(format!("cannot write {}: {e}", path.display())))?;
    let io = |e: csv::Error| CliError::Failure(format!("{}: {e}", path.display()));
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    w.flush()
        .map_err(|e| CliError::Failure(format!("{}: {e}", path.display())))
}

pub fn cjson(z: Complex64) -> Value {
    json!({"re": z.re, "im": z.im})
}

pub fn path_json(p: &Option<PathBuf>) -> Value {
    match p {
        Some(p) => json!(p.display().to_string()),
        None => Value::Null,
    }
}
