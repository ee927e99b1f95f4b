//! Gaussian elimination over a [`Field`].

use crate::field::{Field, FieldElement};

/// Rows `(coefficients, rhs)` of a linear system `A x = b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSystem {
    pub field: Field,
    pub ncols: usize,
    pub rows: Vec<(Vec<FieldElement>, FieldElement)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution {
    Unique(Vec<FieldElement>),
    /// `particular + span(kernel)`; `free` lists the free columns.
    Parametrized {
        particular: Vec<FieldElement>,
        kernel: Vec<Vec<FieldElement>>,
        free: Vec<usize>,
    },
    /// Row `row` (input order) contradicts the rows before it.
    Inconsistent {
        row: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveReport {
    pub rank: usize,
    pub pivots: Vec<usize>,
    pub solution: Solution,
}

/// Incrementally maintained reduced row-echelon basis, optionally augmented
/// with a right-hand side.
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    field: Field,
    ncols: usize,
    /// (pivot column, row, rhs), each row normalized with a 1 at its pivot
    /// and zeros in every other pivot column.
    rows: Vec<(usize, Vec<FieldElement>, FieldElement)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Insert {
    Independent,
    /// Dependent on the basis and consistent with it.
    Dependent,
    /// Dependent coefficients but a conflicting right-hand side.
    Contradiction,
}

impl EchelonBasis {
    pub fn new(field: &Field, ncols: usize) -> Self {
        EchelonBasis {
            field: field.clone(),
            ncols,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `(row, rhs)` against the basis and returns the residue.
    fn reduce(&self, row: &[FieldElement], rhs: FieldElement) -> (Vec<FieldElement>, FieldElement) {
        let f = &self.field;
        let mut r = row.to_vec();
        let mut b = rhs;
        for (piv, basis, brhs) in &self.rows {
            let c = r[*piv];
            if c.is_zero() {
                continue;
            }
            for (x, &y) in r.iter_mut().zip(basis) {
                *x = f.sub(*x, f.mul(c, y));
            }
            b = f.sub(b, f.mul(c, *brhs));
        }
        (r, b)
    }

    /// Whether `row` lies outside the span of the basis (ignoring rhs).
    pub fn is_independent(&self, row: &[FieldElement]) -> bool {
        let (r, _) = self.reduce(row, self.field.zero());
        r.iter().any(|x| !x.is_zero())
    }

    pub fn insert(&mut self, row: &[FieldElement], rhs: FieldElement) -> Insert {
        assert_eq!(row.len(), self.ncols, "row length");
        let f = self.field.clone();
        let (mut r, mut b) = self.reduce(row, rhs);
        let Some(piv) = r.iter().position(|x| !x.is_zero()) else {
            return if b.is_zero() {
                Insert::Dependent
            } else {
                Insert::Contradiction
            };
        };
        let inv = f.inv(r[piv]).expect("pivot is nonzero");
        for x in r.iter_mut() {
            *x = f.mul(*x, inv);
        }
        b = f.mul(b, inv);
        for (_, basis, brhs) in self.rows.iter_mut() {
            let c = basis[piv];
            if c.is_zero() {
                continue;
            }
            for (x, &y) in basis.iter_mut().zip(&r) {
                *x = f.sub(*x, f.mul(c, y));
            }
            *brhs = f.sub(*brhs, f.mul(c, b));
        }
        self.rows.push((piv, r, b));
        Insert::Independent
    }

    pub fn pivots(&self) -> Vec<usize> {
        let mut p: Vec<usize> = self.rows.iter().map(|(c, _, _)| *c).collect();
        p.sort_unstable();
        p
    }

    /// Solution set of the accumulated (consistent) system.
    pub fn solution(&self) -> Solution {
        let f = &self.field;
        let pivots = self.pivots();
        let free: Vec<usize> = (0..self.ncols).filter(|c| !pivots.contains(c)).collect();
        let mut particular = vec![f.zero(); self.ncols];
        for (piv, _, b) in &self.rows {
            particular[*piv] = *b;
        }
        if free.is_empty() {
            return Solution::Unique(particular);
        }
        let kernel = free
            .iter()
            .map(|&fc| {
                let mut v = vec![f.zero(); self.ncols];
                v[fc] = f.one();
                for (piv, row, _) in &self.rows {
                    v[*piv] = f.neg(row[fc]);
                }
                v
            })
            .collect();
        Solution::Parametrized {
            particular,
            kernel,
            free,
        }
    }
}

/// Solves the system by reduced row-echelon form, reporting rank, pivot
/// columns and the first contradicting row if any.
pub fn gaussian_solve(system: &LinearSystem) -> SolveReport {
    let mut basis = EchelonBasis::new(&system.field, system.ncols);
    for (i, (row, rhs)) in system.rows.iter().enumerate() {
        if basis.insert(row, *rhs) == Insert::Contradiction {
            return SolveReport {
                rank: basis.rank(),
                pivots: basis.pivots(),
                solution: Solution::Inconsistent { row: i },
            };
        }
    }
    SolveReport {
        rank: basis.rank(),
        pivots: basis.pivots(),
        solution: basis.solution(),
    }
}

/// Inverse of a square matrix by Gauss-Jordan; `None` if singular.
pub fn invert(field: &Field, matrix: &[Vec<FieldElement>]) -> Option<Vec<Vec<FieldElement>>> {
    let n = matrix.len();
    let f = field;
    let mut a: Vec<Vec<FieldElement>> = matrix
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { f.one() } else { f.zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let inv = f.inv(a[col][col]).ok()?;
        for x in a[col].iter_mut() {
            *x = f.mul(*x, inv);
        }
        let pivot_row = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let c = row[col];
            for (x, &y) in row.iter_mut().zip(&pivot_row) {
                *x = f.sub(*x, f.mul(c, y));
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_vec(
    field: &Field,
    matrix: &[Vec<FieldElement>],
    v: &[FieldElement],
) -> Vec<FieldElement> {
    matrix
        .iter()
        .map(|row| field.sum(row.iter().zip(v).map(|(&a, &b)| field.mul(a, b))))
        .collect()
}
