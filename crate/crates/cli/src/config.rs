//! Loader for expression-backed spacetime configuration files.
//!
//! The format is a flat key/value text file with three optional sections;
//! expressions use the metric expression language. Example:
//!
//! ```text
//! name = schwarzschild-custom
//! coords = t, r, th, ph
//!
//! [metric]
//! g00 = 1 - 2/r
//! g01 = 0
//! ...            # all ten independent components g00..g33 are required
//!
//! [domain]
//! constraint = r - 2.1        # point admissible iff the value is positive
//! probe = 0, 10, 1.5708, 0    # required; signature is validated here
//! box = 0 1, 4 50, 0.5 2.6, 0 6.2   # sampling box, lo/hi per coordinate
//!
//! [tetrad]                    # optional; components h^a_mu, default 0
//! h00 = sqrt(1 - 2/r)
//! ...
//! ```
//!
//! Without a `[tetrad]` section the report uses the orthonormalized
//! coordinate frame derived from the metric.

use std::path::Path;

use spinor_forge_core::error::Error;
use spinor_forge_core::expr::{self, Expr};
use spinor_forge_core::geometry::{CustomSpacetime, Spacetime, Tetrad};

#[derive(Debug)]
pub struct LoadedSpacetime {
    pub spacetime: Spacetime,
    pub tetrad: Tetrad,
    pub has_custom_tetrad: bool,
}

struct RawConfig {
    name: Option<String>,
    coords: Option<[String; 4]>,
    metric: Vec<(usize, usize, String, usize)>, // (mu, nu, expr source, line)
    constraint: Option<(String, usize)>,
    probe: Option<([f64; 4], usize)>,
    sample_box: Option<[[f64; 2]; 4]>,
    tetrad: Vec<(usize, usize, String, usize)>,
    has_tetrad_section: bool,
}

fn err_at(path: &Path, line: usize, message: impl std::fmt::Display) -> Error {
    Error::Config(format!("{}:{}: {}", path.display(), line, message))
}

/// Parse and validate a spacetime configuration file.
pub fn load_custom_spacetime(path: &Path) -> Result<LoadedSpacetime, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("{}: {}", path.display(), e)))?;
    let raw = parse_raw(path, &text)?;

    let name = raw.name.unwrap_or_else(|| "custom".to_string());
    let coords = raw
        .coords
        .unwrap_or_else(|| ["x0", "x1", "x2", "x3"].map(String::from));
    let coord_vec: Vec<String> = coords.to_vec();

    // all ten independent metric components must be present
    let mut metric_sources: [[Option<(String, usize)>; 4]; 4] = Default::default();
    for (mu, nu, src, line) in raw.metric {
        metric_sources[mu][nu] = Some((src, line));
    }
    let mut metric: Vec<Vec<Expr>> = vec![vec![Expr::Num(0.0); 4]; 4];
    for mu in 0..4 {
        for nu in mu..4 {
            let (src, line) = metric_sources[mu][nu].as_ref().ok_or_else(|| {
                Error::Config(format!(
                    "{}: missing metric component g{mu}{nu}",
                    path.display()
                ))
            })?;
            let e = parse_expr(path, src, *line, &coord_vec)?;
            metric[mu][nu] = e.clone();
            metric[nu][mu] = e;
        }
    }

    let domain = match &raw.constraint {
        Some((src, line)) => Some(parse_expr(path, src, *line, &coord_vec)?),
        None => None,
    };

    let (probe, _) = raw
        .probe
        .ok_or_else(|| Error::Config(format!("{}: missing `probe` entry", path.display())))?;

    let sample_box = raw.sample_box.unwrap_or_else(|| {
        std::array::from_fn(|i| [probe[i] - 0.5, probe[i] + 0.5])
    });

    let tetrad_exprs = if raw.has_tetrad_section {
        let mut table: Vec<Vec<Expr>> = vec![vec![Expr::Num(0.0); 4]; 4];
        for (a, mu, src, line) in &raw.tetrad {
            table[*a][*mu] = parse_expr(path, src, *line, &coord_vec)?;
        }
        Some(table)
    } else {
        None
    };

    let spec = CustomSpacetime {
        name,
        coords,
        metric,
        domain,
        probe,
        sample_box,
        tetrad: tetrad_exprs.clone(),
    };
    let spacetime = Spacetime::custom(spec)?;

    let (tetrad, has_custom_tetrad) = match tetrad_exprs {
        Some(table) => {
            let t = Tetrad::from_exprs(table);
            t.validate(&spacetime, &probe, 1e-9)?;
            (t, true)
        }
        None => (Tetrad::orthonormalized(), false),
    };

    Ok(LoadedSpacetime {
        spacetime,
        tetrad,
        has_custom_tetrad,
    })
}

fn parse_expr(path: &Path, src: &str, line: usize, coords: &[String]) -> Result<Expr, Error> {
    expr::parse_with_coords(src, coords).map_err(|e| match e {
        Error::Parse { offset, message } => err_at(
            path,
            line,
            format!("column {}: {}", offset + 1, message),
        ),
        other => err_at(path, line, other),
    })
}

fn parse_raw(path: &Path, text: &str) -> Result<RawConfig, Error> {
    let mut raw = RawConfig {
        name: None,
        coords: None,
        metric: Vec::new(),
        constraint: None,
        probe: None,
        sample_box: None,
        tetrad: Vec::new(),
        has_tetrad_section: false,
    };
    let mut section = String::new();
    for (idx, full_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match full_line.find('#') {
            Some(pos) => &full_line[..pos],
            None => full_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| err_at(path, line_no, "unterminated section header"))?
                .trim();
            match name {
                "metric" | "domain" | "tetrad" => {
                    if name == "tetrad" {
                        raw.has_tetrad_section = true;
                    }
                    section = name.to_string();
                }
                other => return Err(err_at(path, line_no, format!("unknown section `{other}`"))),
            }
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err_at(path, line_no, "expected `key = value`"))?;
        let key = key.trim();
        let value = value.trim().to_string();
        match (section.as_str(), key) {
            ("", "name") => raw.name = Some(value),
            ("", "coords") => {
                let names: Vec<String> = value.split(',').map(|s| s.trim().to_string()).collect();
                if names.len() != 4 || names.iter().any(|n| n.is_empty()) {
                    return Err(err_at(path, line_no, "expected four coordinate names"));
                }
                raw.coords = Some([
                    names[0].clone(),
                    names[1].clone(),
                    names[2].clone(),
                    names[3].clone(),
                ]);
            }
            ("metric", k) => {
                let (mu, nu) = parse_component_key(k, 'g')
                    .ok_or_else(|| err_at(path, line_no, format!("unknown metric key `{k}`")))?;
                if mu > nu {
                    return Err(err_at(
                        path,
                        line_no,
                        format!("use the upper-triangle key g{nu}{mu}"),
                    ));
                }
                raw.metric.push((mu, nu, value, line_no));
            }
            ("domain", "constraint") => raw.constraint = Some((value, line_no)),
            ("domain", "probe") => {
                let nums = parse_numbers(&value)
                    .ok_or_else(|| err_at(path, line_no, "probe needs four numbers"))?;
                if nums.len() != 4 {
                    return Err(err_at(path, line_no, "probe needs four numbers"));
                }
                raw.probe = Some(([nums[0], nums[1], nums[2], nums[3]], line_no));
            }
            ("domain", "box") => {
                let axes: Vec<&str> = value.split(',').collect();
                if axes.len() != 4 {
                    return Err(err_at(path, line_no, "box needs four `lo hi` pairs"));
                }
                let mut bx = [[0.0f64; 2]; 4];
                for (i, axis) in axes.iter().enumerate() {
                    let pair = parse_numbers(axis)
                        .filter(|v| v.len() == 2)
                        .ok_or_else(|| err_at(path, line_no, "box needs four `lo hi` pairs"))?;
                    if pair[0] >= pair[1] {
                        return Err(err_at(path, line_no, "box bounds must satisfy lo < hi"));
                    }
                    bx[i] = [pair[0], pair[1]];
                }
                raw.sample_box = Some(bx);
            }
            ("tetrad", k) => {
                let (a, mu) = parse_component_key(k, 'h')
                    .ok_or_else(|| err_at(path, line_no, format!("unknown tetrad key `{k}`")))?;
                raw.tetrad.push((a, mu, value, line_no));
            }
            (_, k) => {
                return Err(err_at(path, line_no, format!("unknown key `{k}`")));
            }
        }
    }
    Ok(raw)
}

fn parse_component_key(key: &str, prefix: char) -> Option<(usize, usize)> {
    let mut chars = key.chars();
    if chars.next()? != prefix {
        return None;
    }
    let a = chars.next()?.to_digit(10)? as usize;
    let b = chars.next()?.to_digit(10)? as usize;
    if chars.next().is_some() || a > 3 || b > 3 {
        return None;
    }
    Some((a, b))
}

fn parse_numbers(text: &str) -> Option<Vec<f64>> {
    let parts: Vec<&str> = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .collect();
    let mut out = Vec::with_capacity(parts.len());
    for p in parts {
        out.push(p.parse::<f64>().ok()?);
    }
    Some(out)
}
