//! Explicit weighted inequalities, as checkable `lhs ≤ rhs` pairs, and random batteries over them.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::sampling::random_sequence;
use crate::seminorm::{weighted_seminorm_sq, weighted_supnorm_sq, SumRange};
use crate::seq::Seq;
use crate::weights::{binomial_ratio, rising_weight};

/// Relative slack for round-off; several inequalities are attained with equality.
pub const ROUNDOFF_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub lhs: f64,
    pub rhs: f64,
}

impl Comparison {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs * (1.0 + ROUNDOFF_SLACK) + f64::MIN_POSITIVE
    }

    /// `lhs / rhs`, with `0/0` read as `0`.
    pub fn ratio(&self) -> f64 {
        if self.lhs == 0.0 {
            0.0
        } else {
            self.lhs / self.rhs
        }
    }
}

fn endpoint(f: &Seq, r: f64, n: usize) -> Result<f64> {
    Ok(rising_weight(n as i64, r, n)? * f.norm_sq(n as i64))
}

/// `s_i^{(r)} |f_i|² ≤ s_n^{(r)} |f_n|² + (1/r) ‖f‖²_{r+1,1}`, worst case over `i`.
pub fn pointwise_bound(f: &Seq, r: f64) -> Result<Comparison> {
    let n = f.len();
    let rhs = endpoint(f, r, n)? + weighted_seminorm_sq(f, r + 1.0, 1, n, SumRange::Standard)? / r;
    let lhs = weighted_supnorm_sq(f, r, 0, n, SumRange::Standard)?;
    Ok(Comparison { lhs, rhs })
}

/// `‖f‖²_{r-1,0} ≤ (4/r²) ‖f‖²_{r+1,1} + (2/r) s_n^{(r)} |f_n|²`.
pub fn hardy_bound(f: &Seq, r: f64) -> Result<Comparison> {
    let n = f.len();
    let lhs = weighted_seminorm_sq(f, r - 1.0, 0, n, SumRange::Standard)?;
    let rhs = 4.0 / (r * r) * weighted_seminorm_sq(f, r + 1.0, 1, n, SumRange::Standard)? + 2.0 / r * endpoint(f, r, n)?;
    Ok(Comparison { lhs, rhs })
}

/// `s_n^{(r)} |f_n|² ≤ (2r²+4r+1)/(r(r+1)) ‖f‖²_{r+1,1} + 4(r+1) ‖f‖²_{r,0}`.
pub fn boundary_bound(f: &Seq, r: f64) -> Result<Comparison> {
    let n = f.len();
    let c1 = (2.0 * r * r + 4.0 * r + 1.0) / (r * (r + 1.0));
    let rhs = c1 * weighted_seminorm_sq(f, r + 1.0, 1, n, SumRange::Standard)?
        + 4.0 * (r + 1.0) * weighted_seminorm_sq(f, r, 0, n, SumRange::Standard)?;
    Ok(Comparison {
        lhs: endpoint(f, r, n)?,
        rhs,
    })
}

/// `‖fg‖²_{p+q,0} ≤ C ⟦f⟧²_{p,0} ‖g‖²_{q,0}` and `⟦fg⟧²_{p+q,0} ≤ C ⟦f⟧²_{p,0} ⟦g⟧²_{q,0}`
/// with `C = Γ(p+q+1)/(Γ(p+1)Γ(q+1))`, for scalar `f, g` on `1 ..= n`.
pub fn product_bounds(f: &Seq, g: &Seq, p: f64, q: f64) -> Result<[Comparison; 2]> {
    let n = f.len();
    let fg = Seq::scalars(1, f.as_slice().iter().zip(g.as_slice()).map(|(a, b)| a * b).collect());
    let c = binomial_ratio(p, q);
    let sup_f = weighted_supnorm_sq(f, p, 0, n, SumRange::Standard)?;
    Ok([
        Comparison {
            lhs: weighted_seminorm_sq(&fg, p + q, 0, n, SumRange::Standard)?,
            rhs: c * sup_f * weighted_seminorm_sq(g, q, 0, n, SumRange::Standard)?,
        },
        Comparison {
            lhs: weighted_supnorm_sq(&fg, p + q, 0, n, SumRange::Standard)?,
            rhs: c * sup_f * weighted_supnorm_sq(g, q, 0, n, SumRange::Standard)?,
        },
    ])
}

/// The four weight-ratio inequalities at one sample point:
/// `s_k^{(p)} ≤ s_k^{(p+q)}/s_k^{(q)} ≤ C(p,q) s_k^{(p)}` and `s_k^{(p)} ≤ s_{k+j}^{(p)} ≤ C(j,p) s_k^{(p)}`.
pub fn weight_bounds(k: i64, j: i64, p: f64, q: f64, n: usize) -> Result<[Comparison; 4]> {
    let sp = rising_weight(k, p, n)?;
    let ratio = rising_weight(k, p + q, n)? / rising_weight(k, q, n)?;
    let shifted = rising_weight(k + j, p, n)?;
    Ok([
        Comparison { lhs: sp, rhs: ratio },
        Comparison {
            lhs: ratio,
            rhs: binomial_ratio(p, q) * sp,
        },
        Comparison { lhs: sp, rhs: shifted },
        Comparison {
            lhs: shifted,
            rhs: binomial_ratio(j as f64, p) * sp,
        },
    ])
}

/// Violation counts and the worst `lhs/rhs` seen for one named inequality.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatteryLine {
    pub name: String,
    pub n: usize,
    pub r: f64,
    pub trials: usize,
    pub violations: usize,
    pub worst_ratio: f64,
}

impl BatteryLine {
    fn new(name: &str, n: usize, r: f64) -> Self {
        Self {
            name: name.to_string(),
            n,
            r,
            trials: 0,
            violations: 0,
            worst_ratio: 0.0,
        }
    }

    fn record(&mut self, c: Comparison) {
        self.trials += 1;
        if !c.holds() {
            self.violations += 1;
        }
        self.worst_ratio = self.worst_ratio.max(c.ratio());
    }
}

/// The three endpoint inequalities on `samples` random sequences for each `(n, r)`.
pub fn a2_battery<R: Rng + ?Sized>(rng: &mut R, samples: usize, ns: &[usize], rs: &[f64]) -> Result<Vec<BatteryLine>> {
    let mut out = Vec::new();
    for &n in ns {
        for &r in rs {
            let mut lines = [
                BatteryLine::new("pointwise", n, r),
                BatteryLine::new("hardy", n, r),
                BatteryLine::new("boundary", n, r),
            ];
            for _ in 0..samples {
                let f = random_sequence(rng, n, true);
                lines[0].record(pointwise_bound(&f, r)?);
                lines[1].record(hardy_bound(&f, r)?);
                lines[2].record(boundary_bound(&f, r)?);
            }
            out.extend(lines);
        }
    }
    Ok(out)
}

/// Weight-ratio and product-norm inequalities on random parameters and sequences.
pub fn weight_battery<R: Rng + ?Sized>(rng: &mut R, samples: usize, ns: &[usize]) -> Result<Vec<BatteryLine>> {
    let mut out = Vec::new();
    for &n in ns {
        let mut weights = BatteryLine::new("weight_ratio", n, f64::NAN);
        let mut shifts = BatteryLine::new("weight_shift", n, f64::NAN);
        let mut prod = BatteryLine::new("product_sobolev", n, f64::NAN);
        let mut prod_sup = BatteryLine::new("product_sup", n, f64::NAN);
        for _ in 0..samples {
            let p = rng.random_range(0.0..4.0);
            let q = rng.random_range(0.0..4.0);
            let k = rng.random_range(1..=n as i64);
            let j = rng.random_range(0..=n as i64 - k);
            let [a, b, c, d] = weight_bounds(k, j, p, q, n)?;
            weights.record(a);
            weights.record(b);
            shifts.record(c);
            shifts.record(d);
            let f = random_sequence(rng, n, false);
            let g = random_sequence(rng, n, false);
            let [x, y] = product_bounds(&f, &g, p, q)?;
            prod.record(x);
            prod_sup.record(y);
        }
        out.extend([weights, shifts, prod, prod_sup]);
    }
    Ok(out)
}
