//! Exact half-space systems: rational points, linear functionals, and
//! labeled equality/inequality collections.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

/// Arbitrary-precision rational number; always stored reduced.
pub type Rat = num_rational::BigRational;

/// `n^e` as an exact rational.
pub fn int_pow(n: usize, e: usize) -> Rat {
    Rat::from(BigInt::from(n).pow(e as u32))
}

pub fn rat(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

/// Parse `a` or `a/b` with optional sign; denominators must be nonzero.
pub fn parse_rat(s: &str) -> Result<Rat, SystemError> {
    let parse_int = |t: &str| -> Result<BigInt, SystemError> {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| SystemError::BadRational(s.to_string()))
    };
    match s.split_once('/') {
        None => Ok(Rat::from(parse_int(s)?)),
        Some((a, b)) => {
            let den = parse_int(b)?;
            if den.is_zero() {
                return Err(SystemError::BadRational(s.to_string()));
            }
            Ok(Rat::new(parse_int(a)?, den))
        }
    }
}

/// Render reduced: `a/b`, or just `a` for integers.
pub fn rat_string(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SystemError {
    #[error("malformed rational `{0}`")]
    BadRational(String),
    #[error("duplicate inequality label `{0}`")]
    DuplicateLabel(String),
}

/// An exact point, coordinates indexed like the system variables.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point(pub Vec<Rat>);

impl Point {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rat] {
        &self.0
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, x) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", rat_string(x))?;
        }
        write!(f, ")")
    }
}

/// An affine functional `sum_i coeffs[i] * x_i + constant`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearFunctional {
    pub coeffs: Vec<Rat>,
    pub constant: Rat,
}

impl LinearFunctional {
    pub fn zero(dim: usize) -> Self {
        LinearFunctional {
            coeffs: vec![Rat::zero(); dim],
            constant: Rat::zero(),
        }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn evaluate(&self, p: &Point) -> Rat {
        assert_eq!(
            self.coeffs.len(),
            p.dim(),
            "functional/point dimension mismatch"
        );
        let mut acc = self.constant.clone();
        for (c, x) in self.coeffs.iter().zip(p.coords()) {
            if !c.is_zero() {
                acc += c * x;
            }
        }
        acc
    }
}

/// Identifies an inequality of a [`HalfSpaceSystem`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    /// Half-space of a tube, by sorted element indices.
    Tube(Vec<usize>),
    /// Order-cone inequality `p_j - p_i >= 0` of the cover i -< j.
    Cover(usize, usize),
    /// Half-space of a periodic tube orbit, by its canonical representative.
    Orbit(Vec<i64>),
}

/// A conjunction of exact equalities and labeled inequalities, all over the
/// same variable list. An inequality `(f, b)` means `f(p) >= b`; an equality
/// `(f, b)` means `f(p) = b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfSpaceSystem {
    pub var_names: Vec<String>,
    pub equalities: Vec<(LinearFunctional, Rat)>,
    pub inequalities: Vec<(Label, LinearFunctional, Rat)>,
}

impl HalfSpaceSystem {
    pub fn new(var_names: Vec<String>) -> Self {
        HalfSpaceSystem {
            var_names,
            equalities: Vec::new(),
            inequalities: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.var_names.len()
    }

    pub fn push_equality(&mut self, f: LinearFunctional, rhs: Rat) {
        assert_eq!(f.dim(), self.dim());
        self.equalities.push((f, rhs));
    }

    pub fn push_inequality(
        &mut self,
        label: Label,
        f: LinearFunctional,
        rhs: Rat,
    ) -> Result<(), SystemError> {
        assert_eq!(f.dim(), self.dim());
        if self.inequalities.iter().any(|(l, _, _)| *l == label) {
            return Err(SystemError::DuplicateLabel(self.label_string(&label)));
        }
        self.inequalities.push((label, f, rhs));
        Ok(())
    }

    pub fn inequality(&self, label: &Label) -> Option<(&LinearFunctional, &Rat)> {
        self.inequalities
            .iter()
            .find(|(l, _, _)| l == label)
            .map(|(_, f, b)| (f, b))
    }

    /// Whether `p` satisfies every equality and every inequality.
    pub fn contains(&self, p: &Point) -> bool {
        self.equalities.iter().all(|(f, b)| f.evaluate(p) == *b)
            && self
                .inequalities
                .iter()
                .all(|(_, f, b)| f.evaluate(p) >= *b)
    }

    /// Labels of the inequalities tight at `p` (equality attained).
    pub fn tight_at(&self, p: &Point) -> Vec<Label> {
        self.inequalities
            .iter()
            .filter(|(_, f, b)| f.evaluate(p) == *b)
            .map(|(l, _, _)| l.clone())
            .collect()
    }

    /// Human-readable label, using the system's variable names.
    pub fn label_string(&self, label: &Label) -> String {
        match label {
            Label::Tube(members) => {
                let names: Vec<&str> = members
                    .iter()
                    .map(|&i| self.var_names[i].as_str())
                    .collect();
                format!("{{{}}}", names.join(","))
            }
            Label::Cover(i, j) => format!("cover {}<{}", self.var_names[*i], self.var_names[*j]),
            Label::Orbit(members) => {
                let parts: Vec<String> = members.iter().map(|z| z.to_string()).collect();
                format!("[{}]", parts.join(","))
            }
        }
    }

    /// Render a functional as `a*x + b*y + c`.
    pub fn functional_string(&self, f: &LinearFunctional) -> String {
        let mut parts: Vec<String> = Vec::new();
        for (i, c) in f.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let name = &self.var_names[i];
            if c.is_one() {
                parts.push(name.clone());
            } else if *c == -Rat::one() {
                parts.push(format!("-{name}"));
            } else {
                parts.push(format!("{}*{name}", rat_string(c)));
            }
        }
        if !f.constant.is_zero() || parts.is_empty() {
            parts.push(rat_string(&f.constant));
        }
        let mut out = String::new();
        for (k, part) in parts.iter().enumerate() {
            if k == 0 {
                out.push_str(part);
            } else if let Some(rest) = part.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(part);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_parse_and_render() {
        assert_eq!(
            parse_rat("3/6").unwrap(),
            Rat::new(BigInt::from(1), BigInt::from(2))
        );
        assert_eq!(parse_rat("-4").unwrap(), rat(-4));
        assert_eq!(rat_string(&parse_rat("10/4").unwrap()), "5/2");
        assert_eq!(rat_string(&rat(7)), "7");
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn threshold_powers() {
        assert_eq!(int_pow(3, 4), rat(81));
        assert_eq!(int_pow(3, 6), rat(729));
        assert_eq!(int_pow(4, 8), rat(65536));
    }

    #[test]
    fn evaluate_with_constant() {
        let f = LinearFunctional {
            coeffs: vec![rat(1), rat(-1)],
            constant: rat(64),
        };
        let p = Point(vec![rat(-8), rat(8)]);
        assert_eq!(f.evaluate(&p), rat(48));
    }

    #[test]
    fn duplicate_labels_rejected() {
        let mut sys = HalfSpaceSystem::new(vec!["x".into(), "y".into()]);
        let l = Label::Tube(vec![0, 1]);
        sys.push_inequality(l.clone(), LinearFunctional::zero(2), rat(0))
            .unwrap();
        assert!(sys
            .push_inequality(l, LinearFunctional::zero(2), rat(1))
            .is_err());
    }

    #[test]
    fn functional_rendering() {
        let sys = HalfSpaceSystem::new(vec!["a".into(), "b".into(), "c".into()]);
        let f = LinearFunctional {
            coeffs: vec![rat(-1), rat(0), rat(2)],
            constant: rat(5),
        };
        assert_eq!(sys.functional_string(&f), "-a + 2*c + 5");
        assert_eq!(sys.functional_string(&LinearFunctional::zero(3)), "0");
    }
}
