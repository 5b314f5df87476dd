//! Plain-text coefficient snapshots.
//!
//! ```text
//! n 2
//! R 1e0
//! L_max 16
//! t 0e0
//! 0 1 0.0000000000000000e0
//! 1 1 ...
//! ```
//!
//! One `l p value` line per coefficient, `l` then `p` ascending, values with
//! 17 significant digits.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::flow::FlowState;
use crate::harmonics::{Coeffs, Grid, RadialField};

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub radius: f64,
    pub t: f64,
    pub coeffs: Coeffs,
}

impl Snapshot {
    pub fn from_state(state: &FlowState) -> Self {
        Snapshot {
            radius: state.rho.radius(),
            t: state.t,
            coeffs: state.rho.coeffs().clone(),
        }
    }

    pub fn to_state(&self, grid: &Grid) -> Result<FlowState> {
        Ok(FlowState {
            t: self.t,
            rho: RadialField::from_coeffs(grid, self.radius, self.coeffs.clone())?,
        })
    }

    pub fn to_text(&self) -> String {
        let c = &self.coeffs;
        let mut s = String::new();
        let _ = writeln!(s, "n {}", c.dim());
        let _ = writeln!(s, "R {:e}", self.radius);
        let _ = writeln!(s, "L_max {}", c.l_max());
        let _ = writeln!(s, "t {:e}", self.t);
        for ((l, p), v) in c.labels().zip(c.as_slice()) {
            let _ = writeln!(s, "{l} {p} {v:.16e}");
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        let mut header = |name: &str| -> Result<(usize, String)> {
            let (line, body) = lines.next().ok_or_else(|| Error::Parse {
                line: 0,
                msg: format!("missing header `{name}`"),
            })?;
            match body.split_once(' ') {
                Some((k, v)) if k == name => Ok((line, v.trim().to_string())),
                _ => Err(Error::Parse {
                    line,
                    msg: format!("expected `{name} <value>`, got `{body}`"),
                }),
            }
        };
        let parse_at = |line: usize, v: &str, what: &str| -> Result<f64> {
            v.parse().map_err(|_| Error::Parse {
                line,
                msg: format!("bad {what} `{v}`"),
            })
        };
        let (line, v) = header("n")?;
        let n: usize = v.parse().map_err(|_| Error::Parse {
            line,
            msg: format!("bad dimension `{v}`"),
        })?;
        let (line, v) = header("R")?;
        let radius = parse_at(line, &v, "radius")?;
        let (line, v) = header("L_max")?;
        let l_max: usize = v.parse().map_err(|_| Error::Parse {
            line,
            msg: format!("bad degree `{v}`"),
        })?;
        let (line, v) = header("t")?;
        let t = parse_at(line, &v, "time")?;
        if n != 1 && n != 2 {
            return Err(Error::Parse {
                line: 1,
                msg: Error::UnsupportedDimension(n).to_string(),
            });
        }
        let mut coeffs = Coeffs::zeros(n, l_max);
        let expected: Vec<(usize, usize)> = coeffs.labels().collect();
        let mut count = 0;
        for (line, body) in lines {
            if body.is_empty() {
                continue;
            }
            let f: Vec<&str> = body.split_whitespace().collect();
            let bad = |msg: String| Error::Parse { line, msg };
            if f.len() != 3 {
                return Err(bad(format!("expected `l p value`, got `{body}`")));
            }
            let l: usize = f[0].parse().map_err(|_| bad(format!("bad degree `{}`", f[0])))?;
            let p: usize = f[1].parse().map_err(|_| bad(format!("bad index `{}`", f[1])))?;
            let v = parse_at(line, f[2], "coefficient")?;
            if expected.get(count) != Some(&(l, p)) {
                return Err(bad(format!("unexpected coefficient ({l}, {p}) at position {count}")));
            }
            coeffs.as_mut_slice()[count] = v;
            count += 1;
        }
        if count != expected.len() {
            return Err(Error::Parse {
                line: text.lines().count(),
                msg: format!("expected {} coefficients, found {count}", expected.len()),
            });
        }
        Ok(Snapshot { radius, t, coeffs })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Snapshot::parse(&text)
    }
}
