//! Paired explicit/implicit Runge-Kutta tables.

use std::fmt;

use num_rational::Rational64;

use crate::error::{Result, SolverError};

/// Explicit table `(at, bt, ct)` and diagonally implicit table `(a, b, c)`
/// sharing `s` stages. Coefficients are kept as exact rationals.
#[derive(Clone, Debug, PartialEq)]
pub struct DoubleButcherTableau {
    pub stages: usize,
    pub a_exp: Vec<Vec<Rational64>>,
    pub b_exp: Vec<Rational64>,
    pub c_exp: Vec<Rational64>,
    pub a_imp: Vec<Vec<Rational64>>,
    pub b_imp: Vec<Rational64>,
    pub c_imp: Vec<Rational64>,
}

/// First invariant a tableau violates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TableauViolation {
    Shape { what: &'static str, expected: usize, found: usize },
    ExplicitNotStrictlyLower { row: usize, col: usize },
    ImplicitNotLower { row: usize, col: usize },
    ExplicitAbscissa { row: usize },
    ImplicitAbscissa { row: usize },
    NotGloballyStifflyAccurate { detail: &'static str },
}

impl fmt::Display for TableauViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Shape { what, expected, found } => {
                write!(f, "{what} has {found} entries, expected {expected}")
            }
            Self::ExplicitNotStrictlyLower { row, col } => write!(
                f,
                "explicit table not strictly lower triangular at ({}, {})",
                row + 1,
                col + 1
            ),
            Self::ImplicitNotLower { row, col } => write!(
                f,
                "implicit table not lower triangular at ({}, {})",
                row + 1,
                col + 1
            ),
            Self::ExplicitAbscissa { row } => {
                write!(f, "explicit c({}) differs from its row sum", row + 1)
            }
            Self::ImplicitAbscissa { row } => {
                write!(f, "implicit c({}) differs from its row sum", row + 1)
            }
            Self::NotGloballyStifflyAccurate { detail } => {
                write!(f, "not globally stiffly accurate: {detail}")
            }
        }
    }
}

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

fn to_f64(x: &Rational64) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

/// ARS(4,4,3): five stages, the first one trivially explicit.
pub fn ars443() -> DoubleButcherTableau {
    let z = r(0, 1);
    let a_exp = vec![
        vec![z, z, z, z, z],
        vec![r(1, 2), z, z, z, z],
        vec![r(11, 18), r(1, 18), z, z, z],
        vec![r(5, 6), r(-5, 6), r(1, 2), z, z],
        vec![r(1, 4), r(7, 4), r(3, 4), r(-7, 4), z],
    ];
    let a_imp = vec![
        vec![z, z, z, z, z],
        vec![z, r(1, 2), z, z, z],
        vec![z, r(1, 6), r(1, 2), z, z],
        vec![z, r(-1, 2), r(1, 2), r(1, 2), z],
        vec![z, r(3, 2), r(-3, 2), r(1, 2), r(1, 2)],
    ];
    let c = vec![z, r(1, 2), r(2, 3), r(1, 2), r(1, 1)];
    DoubleButcherTableau {
        stages: 5,
        b_exp: a_exp[4].clone(),
        b_imp: a_imp[4].clone(),
        a_exp,
        a_imp,
        c_exp: c.clone(),
        c_imp: c,
    }
}

/// Checks shape, triangularity, abscissae and global stiff accuracy, in that order.
pub fn validate(t: &DoubleButcherTableau) -> std::result::Result<(), TableauViolation> {
    let s = t.stages;
    let shape = |what, found: usize| {
        if found != s {
            Err(TableauViolation::Shape { what, expected: s, found })
        } else {
            Ok(())
        }
    };
    shape("explicit matrix", t.a_exp.len())?;
    shape("implicit matrix", t.a_imp.len())?;
    shape("explicit weights", t.b_exp.len())?;
    shape("implicit weights", t.b_imp.len())?;
    shape("explicit abscissae", t.c_exp.len())?;
    shape("implicit abscissae", t.c_imp.len())?;
    for i in 0..s {
        shape("explicit matrix row", t.a_exp[i].len())?;
        shape("implicit matrix row", t.a_imp[i].len())?;
    }
    let zero = r(0, 1);
    for i in 0..s {
        for j in i..s {
            if t.a_exp[i][j] != zero {
                return Err(TableauViolation::ExplicitNotStrictlyLower { row: i, col: j });
            }
        }
        for j in i + 1..s {
            if t.a_imp[i][j] != zero {
                return Err(TableauViolation::ImplicitNotLower { row: i, col: j });
            }
        }
    }
    for i in 0..s {
        if t.a_exp[i].iter().sum::<Rational64>() != t.c_exp[i] {
            return Err(TableauViolation::ExplicitAbscissa { row: i });
        }
        if t.a_imp[i].iter().sum::<Rational64>() != t.c_imp[i] {
            return Err(TableauViolation::ImplicitAbscissa { row: i });
        }
    }
    let one = r(1, 1);
    if t.c_exp[s - 1] != one || t.c_imp[s - 1] != one {
        return Err(TableauViolation::NotGloballyStifflyAccurate { detail: "last abscissa is not 1" });
    }
    if t.a_exp[s - 1] != t.b_exp {
        return Err(TableauViolation::NotGloballyStifflyAccurate {
            detail: "explicit last row differs from weights",
        });
    }
    if t.a_imp[s - 1] != t.b_imp {
        return Err(TableauViolation::NotGloballyStifflyAccurate {
            detail: "implicit last row differs from weights",
        });
    }
    Ok(())
}

/// `(at_{l,1..l-1}, a_{l,1..l})` for the 1-based stage `l`.
pub fn stage_weights(t: &DoubleButcherTableau, l: usize) -> Result<(Vec<Rational64>, Vec<Rational64>)> {
    if l == 0 || l > t.stages {
        return Err(SolverError::InvalidArgument(format!(
            "stage {l} out of range 1..={}",
            t.stages
        )));
    }
    Ok((t.a_exp[l - 1][..l - 1].to_vec(), t.a_imp[l - 1][..l].to_vec()))
}

/// Floating-point copy used inside the stage loops.
#[derive(Clone, Debug)]
pub struct TableauF64 {
    pub stages: usize,
    pub a_exp: Vec<Vec<f64>>,
    pub a_imp: Vec<Vec<f64>>,
    pub b_exp: Vec<f64>,
    pub b_imp: Vec<f64>,
    pub stiffly_accurate: bool,
}

impl DoubleButcherTableau {
    pub fn to_f64(&self) -> TableauF64 {
        let conv = |m: &Vec<Vec<Rational64>>| -> Vec<Vec<f64>> {
            m.iter().map(|row| row.iter().map(to_f64).collect()).collect()
        };
        TableauF64 {
            stages: self.stages,
            a_exp: conv(&self.a_exp),
            a_imp: conv(&self.a_imp),
            b_exp: self.b_exp.iter().map(to_f64).collect(),
            b_imp: self.b_imp.iter().map(to_f64).collect(),
            stiffly_accurate: validate(self).is_ok(),
        }
    }
}

/// IMEX integration of the scalar model `y' = f(y) + (m(y) - y)/eps`, `f`
/// explicit and the relaxation implicit. Returns `(final update, last stage)`
/// so the two can be compared for stiffly accurate tables. The final update
/// uses the weight vectors, the stage values use the matrices.
pub fn scalar_imex_step(
    t: &TableauF64,
    y0: f64,
    dt: f64,
    eps: f64,
    f: impl Fn(f64) -> f64,
    m: f64,
) -> (f64, f64) {
    let s = t.stages;
    let mut ys = vec![0.0; s];
    let mut fe = vec![0.0; s];
    let mut fi = vec![0.0; s];
    for l in 0..s {
        let mut acc = eps * y0;
        for j in 0..l {
            acc += dt * eps * t.a_exp[l][j] * fe[j] + dt * t.a_imp[l][j] * fi[j];
        }
        let all = t.a_imp[l][l];
        // eps y = acc + dt a_ll (m - y)
        ys[l] = if l == 0 && all == 0.0 {
            y0
        } else {
            (acc + dt * all * m) / (eps + dt * all)
        };
        fe[l] = f(ys[l]);
        fi[l] = m - ys[l];
    }
    let mut fin = eps * y0;
    for j in 0..s {
        fin += dt * eps * t.b_exp[j] * fe[j] + dt * t.b_imp[j] * fi[j];
    }
    (fin / eps, ys[s - 1])
}
