//! Linear systems over GF(2), solved by Gauss-Jordan elimination.

#[derive(Debug, Clone, PartialEq, Eq)]
struct Row {
    bits: Vec<u64>,
    rhs: bool,
}

impl Row {
    fn get(&self, col: usize) -> bool {
        (self.bits[col / 64] >> (col % 64)) & 1 == 1
    }

    fn flip(&mut self, col: usize) {
        self.bits[col / 64] ^= 1 << (col % 64);
    }

    fn xor_assign(&mut self, other: &Row) {
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a ^= b;
        }
        self.rhs ^= other.rhs;
    }

    fn is_zero(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }
}

/// A system of equations `xor of vars = rhs`.
#[derive(Debug, Clone, Default)]
pub struct Gf2System {
    num_vars: usize,
    rows: Vec<Row>,
}

impl Gf2System {
    pub fn new(num_vars: usize) -> Self {
        Gf2System {
            num_vars,
            rows: Vec::new(),
        }
    }

    pub fn num_equations(&self) -> usize {
        self.rows.len()
    }

    /// Adds an equation. A variable listed twice cancels.
    pub fn add_equation(&mut self, vars: &[usize], rhs: bool) {
        let mut row = Row {
            bits: vec![0; self.num_vars.div_ceil(64)],
            rhs,
        };
        for &v in vars {
            assert!(v < self.num_vars, "variable {v} out of range");
            row.flip(v);
        }
        self.rows.push(row);
    }

    /// A solution with every free variable set to 0, or `None` if the
    /// system is inconsistent.
    pub fn solve(&self) -> Option<Vec<bool>> {
        let mut rows = self.rows.clone();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..self.num_vars {
            let Some(p) = (rank..rows.len()).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row.get(col) {
                    row.xor_assign(&pivot);
                }
            }
            pivots.push(col);
            rank += 1;
        }
        if rows[rank..].iter().any(|r| r.is_zero() && r.rhs) {
            return None;
        }
        let mut x = vec![false; self.num_vars];
        for (r, &col) in pivots.iter().enumerate() {
            x[col] = rows[r].rhs;
        }
        Some(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(sys: &Gf2System, eqs: &[(&[usize], bool)], x: &[bool]) {
        let _ = sys;
        for (vars, rhs) in eqs {
            let s = vars.iter().fold(false, |acc, &v| acc ^ x[v]);
            assert_eq!(s, *rhs);
        }
    }

    #[test]
    fn triangle() {
        let eqs: [(&[usize], bool); 3] = [(&[0, 1], true), (&[1, 2], true), (&[0, 2], false)];
        let mut sys = Gf2System::new(3);
        for (v, r) in eqs {
            sys.add_equation(v, r);
        }
        let x = sys.solve().unwrap();
        check(&sys, &eqs, &x);
        // x3 is free and set to 0.
        assert_eq!(x, vec![false, true, false]);
    }

    #[test]
    fn contradiction() {
        let mut sys = Gf2System::new(2);
        sys.add_equation(&[0, 1], true);
        sys.add_equation(&[0, 1], false);
        assert!(sys.solve().is_none());
    }

    #[test]
    fn repeated_variable_cancels() {
        let mut sys = Gf2System::new(1);
        sys.add_equation(&[0, 0], true);
        assert!(sys.solve().is_none());
        let mut sys = Gf2System::new(1);
        sys.add_equation(&[0, 0], false);
        assert_eq!(sys.solve(), Some(vec![false]));
    }

    #[test]
    fn wide_system() {
        let n = 150;
        let mut sys = Gf2System::new(n);
        for i in 0..n - 1 {
            sys.add_equation(&[i, i + 1], true);
        }
        sys.add_equation(&[0], true);
        let x = sys.solve().unwrap();
        for (i, &b) in x.iter().enumerate() {
            assert_eq!(b, i % 2 == 0);
        }
    }
}
