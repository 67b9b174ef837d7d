//! Scalar information-theoretic kernels and an exact finite-alphabet
//! entropy / mutual-information engine. All logarithms are base 2.

use crate::error::{Error, Result};

/// Probabilities below this are treated as exact zeros in entropy sums.
pub const PMF_ZERO: f64 = 1e-15;

/// Largest alphabet product a [`JointDistribution`] will store.
pub const MAX_CELLS: usize = 10_000_000;

fn check_unit(what: &'static str, x: f64, upper: f64) -> Result<()> {
    if (0.0..=upper).contains(&x) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            what,
            value: x,
            lower: 0.0,
            upper,
        })
    }
}

/// `H₂(p) = −p log p − (1−p) log(1−p)`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    check_unit("p", p, 1.0)?;
    Ok(h2(p))
}

/// `a ⋆ b = (1−a)b + a(1−b)`, the crossover of two cascaded BSCs.
pub fn binary_convolution(a: f64, b: f64) -> Result<f64> {
    check_unit("a", a, 1.0)?;
    check_unit("b", b, 1.0)?;
    Ok(conv(a, b))
}

/// Wyner-Ziv rate kernel `r(α, β) = H₂(α ⋆ β) − H₂(α)` on `[0, 1/2]²`.
pub fn wz_rate_kernel(alpha: f64, beta: f64) -> Result<f64> {
    check_unit("alpha", alpha, 0.5)?;
    check_unit("beta", beta, 0.5)?;
    Ok(rate_kernel(alpha, beta))
}

#[inline]
pub(crate) fn h2(p: f64) -> f64 {
    let term = |x: f64| if x <= PMF_ZERO { 0.0 } else { -x * x.log2() };
    term(p) + term(1.0 - p)
}

#[inline]
pub(crate) fn conv(a: f64, b: f64) -> f64 {
    // exact for a uniform flip, so that H₂(½ ⋆ x) is exactly 1
    if a == 0.5 || b == 0.5 {
        return 0.5;
    }
    (1.0 - a) * b + a * (1.0 - b)
}

#[inline]
pub(crate) fn rate_kernel(alpha: f64, beta: f64) -> f64 {
    h2(conv(alpha, beta)) - h2(alpha)
}

/// Dense pmf over a tuple of named finite-alphabet variables. The first
/// variable is the most significant index.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    names: Vec<String>,
    sizes: Vec<usize>,
    pmf: Vec<f64>,
}

impl JointDistribution {
    pub fn new(variables: &[(&str, usize)], pmf: Vec<f64>) -> Result<Self> {
        let (names, sizes) = Self::layout(variables)?;
        let cells: usize = sizes.iter().product();
        if pmf.len() != cells {
            return Err(Error::invalid("pmf", "length does not match the alphabet product", pmf.len()));
        }
        if let Some(&bad) = pmf.iter().find(|&&p| !(p >= 0.0)) {
            return Err(Error::invalid("pmf", "probabilities must be nonnegative", bad));
        }
        let total: f64 = pmf.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("pmf", "probabilities must sum to 1", total));
        }
        Ok(JointDistribution { names, sizes, pmf })
    }

    /// Fills the pmf by evaluating `f` on every index tuple.
    pub fn from_fn(variables: &[(&str, usize)], mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let (_, sizes) = Self::layout(variables)?;
        let cells: usize = sizes.iter().product();
        let mut idx = vec![0; sizes.len()];
        let mut pmf = Vec::with_capacity(cells);
        for _ in 0..cells {
            pmf.push(f(&idx));
            increment(&mut idx, &sizes);
        }
        Self::new(variables, pmf)
    }

    fn layout(variables: &[(&str, usize)]) -> Result<(Vec<String>, Vec<usize>)> {
        let mut names: Vec<String> = Vec::with_capacity(variables.len());
        let mut cells: usize = 1;
        for &(name, size) in variables {
            if names.iter().any(|n| n == name) {
                return Err(Error::invalid("variables", "variable names must be unique", name));
            }
            if size == 0 {
                return Err(Error::invalid("variables", "alphabet must be nonempty", name));
            }
            cells = cells
                .checked_mul(size)
                .filter(|&c| c <= MAX_CELLS)
                .ok_or_else(|| Error::invalid("variables", "alphabet product exceeds 10^7 cells", name))?;
            names.push(name.to_string());
        }
        Ok((names, variables.iter().map(|v| v.1).collect()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(String::as_str)
    }

    pub fn has(&self, name: &str) -> bool {
        self.names.iter().any(|n| n == name)
    }

    pub fn alphabet_size(&self, name: &str) -> Result<usize> {
        Ok(self.sizes[self.position(name)?])
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    fn position(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    /// Marginal pmf over `keep`, in the order given.
    pub fn marginal(&self, keep: &[&str]) -> Result<Vec<f64>> {
        let pos = keep.iter().map(|n| self.position(n)).collect::<Result<Vec<_>>>()?;
        let sizes: Vec<usize> = pos.iter().map(|&p| self.sizes[p]).collect();
        let mut out = vec![0.0; sizes.iter().product()];
        let mut idx = vec![0; self.sizes.len()];
        for &p in &self.pmf {
            let mut flat = 0;
            for (&q, &s) in pos.iter().zip(&sizes) {
                flat = flat * s + idx[q];
            }
            out[flat] += p;
            increment(&mut idx, &self.sizes);
        }
        Ok(out)
    }

    /// Joint entropy of the named variables, in bits.
    pub fn entropy(&self, vars: &[&str]) -> Result<f64> {
        if vars.is_empty() {
            return Ok(0.0);
        }
        Ok(self
            .marginal(vars)?
            .into_iter()
            .filter(|&p| p > PMF_ZERO)
            .map(|p| -p * p.log2())
            .sum())
    }

    /// `I(A; B | C)` in bits by exact marginalisation.
    pub fn mutual_information(&self, a: &[&str], b: &[&str], given: &[&str]) -> Result<f64> {
        for group in [a, b, given] {
            for n in group {
                self.position(n)?;
            }
        }
        let mut seen: Vec<&str> = Vec::new();
        for n in a.iter().chain(b).chain(given) {
            if seen.contains(n) {
                return Err(Error::OverlappingGroups(n.to_string()));
            }
            seen.push(n);
        }
        let ac: Vec<&str> = a.iter().chain(given).copied().collect();
        let bc: Vec<&str> = b.iter().chain(given).copied().collect();
        let abc: Vec<&str> = a.iter().chain(b).chain(given).copied().collect();
        Ok(self.entropy(&ac)? + self.entropy(&bc)? - self.entropy(&abc)? - self.entropy(given)?)
    }

    /// Appends a variable `name` drawn from the conditional pmf
    /// `rows[x][y] = p(name = y | given = x)`.
    pub fn extend_with_channel(&self, given: &str, name: &str, rows: &[Vec<f64>]) -> Result<Self> {
        let g = self.position(given)?;
        if rows.len() != self.sizes[g] {
            return Err(Error::invalid("channel", "row count must match the input alphabet", rows.len()));
        }
        let out = rows[0].len();
        for row in rows {
            if row.len() != out {
                return Err(Error::invalid("channel", "rows must have equal length", row.len()));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > 1e-12 || row.iter().any(|&p| p < 0.0) {
                return Err(Error::invalid("channel", "each row must be a pmf", s));
            }
        }
        let mut vars: Vec<(&str, usize)> = self.names().zip(self.sizes.iter().copied()).collect();
        vars.push((name, out));
        let mut pmf = Vec::with_capacity(self.pmf.len() * out);
        let mut idx = vec![0; self.sizes.len()];
        for &p in &self.pmf {
            pmf.extend(rows[idx[g]].iter().map(|&c| p * c));
            increment(&mut idx, &self.sizes);
        }
        JointDistribution::new(&vars, pmf)
    }
}

fn increment(idx: &mut [usize], sizes: &[usize]) {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < sizes[k] {
            return;
        }
        idx[k] = 0;
    }
}

/// Transition matrix of a binary symmetric channel.
pub fn bsc(p: f64) -> Vec<Vec<f64>> {
    vec![vec![1.0 - p, p], vec![p, 1.0 - p]]
}
