//! Exact elimination over systems of monomial relations.
//!
//! Every relation has the form `∏ x_j^a_j = ∏ K_s^b_s` with rational
//! exponents, i.e. it is linear in the logarithms. Elimination runs over
//! `Rational64` so exponent bookkeeping is exact; only the final evaluation
//! of `exp(Σ b·ln K)` touches floating point.

use num_rational::Rational64;
use num_traits::{One, Zero};

pub(crate) type Q = Rational64;

/// One row `Σ coeffs[j]·ln x_j = Σ rhs[s]·ln K_s`, together with the
/// combination of input rows it was reduced from.
#[derive(Debug, Clone)]
pub(crate) struct Row {
    pub coeffs: Vec<Q>,
    pub rhs: Vec<Q>,
    pub origin: Vec<Q>,
}

impl Row {
    fn axpy(&mut self, factor: Q, other: &Row) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a -= factor * b;
        }
        for (a, b) in self.rhs.iter_mut().zip(&other.rhs) {
            *a -= factor * b;
        }
        for (a, b) in self.origin.iter_mut().zip(&other.origin) {
            *a -= factor * b;
        }
    }

    fn scale(&mut self, factor: Q) {
        for v in self.coeffs.iter_mut().chain(self.rhs.iter_mut()).chain(self.origin.iter_mut()) {
            *v *= factor;
        }
    }
}

/// Outcome of inserting a row into the echelon form.
#[derive(Debug, Clone)]
pub(crate) enum Insert {
    /// Row raised the rank.
    Independent,
    /// Row is a combination of earlier rows; `residual` is the right-hand
    /// side that must vanish for consistency, `origin` the combination.
    Dependent { residual: Vec<Q>, origin: Vec<Q> },
}

/// Reduced row echelon form built one row at a time.
#[derive(Debug, Clone)]
pub(crate) struct Echelon {
    nvar: usize,
    nsym: usize,
    norigin: usize,
    rows_inserted: usize,
    pivots: Vec<(usize, Row)>,
}

impl Echelon {
    pub fn new(nvar: usize, nsym: usize, norigin: usize) -> Self {
        Echelon { nvar, nsym, norigin, rows_inserted: 0, pivots: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn nvar(&self) -> usize {
        self.nvar
    }

    /// Inserts `Σ coeffs·ln x = Σ rhs·ln K`; the row's origin index is the
    /// insertion counter.
    pub fn insert(&mut self, coeffs: Vec<Q>, rhs: Vec<Q>) -> Insert {
        debug_assert_eq!(coeffs.len(), self.nvar);
        debug_assert_eq!(rhs.len(), self.nsym);
        let mut origin = vec![Q::zero(); self.norigin];
        origin[self.rows_inserted] = Q::one();
        self.rows_inserted += 1;
        let mut row = Row { coeffs, rhs, origin };
        self.reduce(&mut row);
        match row.coeffs.iter().position(|c| !c.is_zero()) {
            None => Insert::Dependent { residual: row.rhs, origin: row.origin },
            Some(col) => {
                let inv = row.coeffs[col].recip();
                row.scale(inv);
                for (_, p) in self.pivots.iter_mut() {
                    let f = p.coeffs[col];
                    if !f.is_zero() {
                        p.axpy(f, &row);
                    }
                }
                self.pivots.push((col, row));
                Insert::Independent
            }
        }
    }

    /// True when the unit row for `var` is outside the current row space,
    /// i.e. fixing `var` would remove one degree of freedom.
    pub fn would_raise_rank(&self, var: usize) -> bool {
        let mut coeffs = vec![Q::zero(); self.nvar];
        coeffs[var] = Q::one();
        let mut row = Row { coeffs, rhs: vec![Q::zero(); self.nsym], origin: vec![Q::zero(); self.norigin] };
        self.reduce(&mut row);
        row.coeffs.iter().any(|c| !c.is_zero())
    }

    /// Log-exponents of every variable over the symbols; `None` unless the
    /// system has full rank.
    pub fn solution(&self) -> Option<Vec<Vec<Q>>> {
        if self.rank() < self.nvar {
            return None;
        }
        let mut out = vec![Vec::new(); self.nvar];
        for (col, row) in &self.pivots {
            debug_assert!(row.coeffs.iter().enumerate().all(|(j, c)| {
                if j == *col {
                    c.is_one()
                } else {
                    c.is_zero()
                }
            }));
            out[*col] = row.rhs.clone();
        }
        Some(out)
    }

    fn reduce(&self, row: &mut Row) {
        for (col, p) in &self.pivots {
            let f = row.coeffs[*col];
            if !f.is_zero() {
                row.axpy(f, p);
            }
        }
    }
}

pub(crate) fn q(num: i64, den: i64) -> Q {
    Q::new(num, den)
}
