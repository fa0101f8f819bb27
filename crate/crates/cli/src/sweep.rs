//! Sweep plans and their tables.

use gravwit_core::model::{omega_m_from_zpf, PhysicalConstants, SystemParams};
use gravwit_core::witness::{analytic_witness, first_order_report_physical, WitnessReport};
use gravwit_core::{Error, FockSpace, Result};
use rayon::prelude::*;

use crate::format;

pub const FIG1_HEADER: &str = "omega_k,omega_m,t,e1,e2,witness";
pub const FIG2_HEADER: &str = "mu,delta_zpf,omega_m,omega_k,t,witness";

/// How a grid point's witness value is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Analytic,
    FirstOrder,
    Exact { cutoffs: [usize; 3] },
}

impl Method {
    pub fn report(self, k: &PhysicalConstants, p: &SystemParams) -> Result<WitnessReport> {
        match self {
            Method::Analytic => Ok(WitnessReport::from_parts(analytic_witness(k, p)?, [0.0; 3])),
            Method::FirstOrder => first_order_report_physical(k, p),
            Method::Exact { cutoffs } => {
                let c = gravwit_core::model::couplings(k, p)?;
                gravwit_core::witness::exact_report(c.eps1, c.eps2, FockSpace::new(cutoffs)?)
            }
        }
    }

    /// The `witness` column: G2, which is `Ω t` in the analytic case.
    pub fn witness(self, k: &PhysicalConstants, p: &SystemParams) -> Result<f64> {
        Ok(self.report(k, p)?.g2_value)
    }
}

/// `n` points from `min` to `max`, both included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Range {
    pub fn linear(&self) -> Vec<f64> {
        self.points(|lo, hi, f| lo + (hi - lo) * f)
    }

    pub fn logarithmic(&self) -> Vec<f64> {
        self.points(|lo, hi, f| (lo.ln() + (hi.ln() - lo.ln()) * f).exp())
    }

    fn points(&self, at: impl Fn(f64, f64, f64) -> f64) -> Vec<f64> {
        (0..self.n)
            .map(|i| match i {
                0 => self.min,
                i if i + 1 == self.n => self.max,
                i => at(self.min, self.max, i as f64 / (self.n - 1) as f64),
            })
            .collect()
    }
}

impl std::str::FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [min, max, n] = parts[..] else {
            return Err(format!("expected MIN,MAX,N, got {s:?}"));
        };
        let num = |x: &str| x.parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
        Ok(Range {
            min: num(min)?,
            max: num(max)?,
            n: n.parse().map_err(|e| format!("{n:?}: {e}"))?,
        })
    }
}

/// One explicit `(ω_k, ω_m, t)` point, written `OMEGA_K:OMEGA_M:T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub omega_k: f64,
    pub omega_m: f64,
    pub t: f64,
}

impl std::str::FromStr for Point {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let v = s
            .split(':')
            .map(|x| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        match v[..] {
            [omega_k, omega_m, t] => Ok(Point {
                omega_k,
                omega_m,
                t,
            }),
            _ => Err(format!("expected OMEGA_K:OMEGA_M:T, got {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Plan {
    /// Linear grid over ω_k (outer) and ω_m (inner).
    Fig1 {
        omega_k: Range,
        omega_m: Range,
        t: f64,
        e: (f64, f64),
        mu: f64,
    },
    /// Logarithmic grid over δ_zpf (inner) for each mass (outer).
    Fig2 {
        mus: Vec<f64>,
        delta_zpf: Range,
        omega_k: f64,
        t: f64,
        e: (f64, f64),
    },
    /// Listed points, fig1 columns.
    Custom {
        points: Vec<Point>,
        e: (f64, f64),
        mu: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: &'static str,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(32 * (self.rows.len() + 1));
        s.push_str(self.header);
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&x| format::float(x)).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    /// Values of the named column.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.header.split(',').position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

fn params(mu: f64, omega_m: f64, omega_k: f64, t: f64, e: (f64, f64)) -> Result<SystemParams> {
    SystemParams::new(mu, omega_m, omega_k, t)?.with_polarization(e.0, e.1)
}

/// Input columns of every row, in output order, before any evaluation.
fn inputs(plan: &Plan, k: &PhysicalConstants) -> Result<Vec<(Vec<f64>, SystemParams)>> {
    let rows = match plan {
        Plan::Fig1 {
            omega_k,
            omega_m,
            t,
            e,
            mu,
        } => {
            let wms = omega_m.linear();
            omega_k
                .linear()
                .into_iter()
                .flat_map(|wk| wms.iter().map(move |&wm| (wk, wm)))
                .map(|(wk, wm)| Ok((vec![wk, wm, *t, e.0, e.1], params(*mu, wm, wk, *t, *e)?)))
                .collect::<Result<Vec<_>>>()?
        }
        Plan::Fig2 {
            mus,
            delta_zpf,
            omega_k,
            t,
            e,
        } => {
            let deltas = delta_zpf.logarithmic();
            let mut rows = Vec::with_capacity(mus.len() * deltas.len());
            for &mu in mus {
                for &d in &deltas {
                    let wm = omega_m_from_zpf(k, mu, d)?;
                    rows.push((
                        vec![mu, d, wm, *omega_k, *t],
                        params(mu, wm, *omega_k, *t, *e)?,
                    ));
                }
            }
            rows
        }
        Plan::Custom { points, e, mu } => points
            .iter()
            .map(|p| {
                Ok((
                    vec![p.omega_k, p.omega_m, p.t, e.0, e.1],
                    params(*mu, p.omega_m, p.omega_k, p.t, *e)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?,
    };
    Ok(rows)
}

/// Evaluate every grid point on `jobs` threads (all cores when `None`);
/// rows come back in grid order whatever the thread count.
pub fn run(
    plan: &Plan,
    method: Method,
    k: &PhysicalConstants,
    jobs: Option<usize>,
) -> Result<Table> {
    let header = match plan {
        Plan::Fig1 { .. } | Plan::Custom { .. } => FIG1_HEADER,
        Plan::Fig2 { .. } => FIG2_HEADER,
    };
    let points = inputs(plan, k)?;
    if points.is_empty() {
        return Err(Error::InvalidArgument("sweep grid is empty".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))?;
    let rows = pool.install(|| {
        points
            .par_iter()
            .map(|(cols, p)| {
                let mut row = cols.clone();
                row.push(method.witness(k, p)?);
                Ok(row)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(Table { header, rows })
}
