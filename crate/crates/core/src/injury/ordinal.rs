use std::cmp::Ordering;
use std::fmt;

/// An ordinal below epsilon-zero in Cantor normal form: a sum of terms
/// `w^e * c` with strictly decreasing exponents and positive coefficients.
/// Zero is the empty sum.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Ordinal(Vec<(Ordinal, u64)>);

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal(Vec::new())
    }

    pub fn nat(n: u64) -> Self {
        if n == 0 {
            Ordinal::zero()
        } else {
            Ordinal(vec![(Ordinal::zero(), n)])
        }
    }

    pub fn one() -> Self {
        Ordinal::nat(1)
    }

    pub fn omega() -> Self {
        Ordinal::omega_pow(Ordinal::one())
    }

    /// `w^a`.
    pub fn omega_pow(a: Ordinal) -> Self {
        Ordinal(vec![(a, 1)])
    }

    /// Builds an ordinal from `(exponent, coefficient)` terms, which must
    /// already be in normal form.
    pub fn from_terms(terms: Vec<(Ordinal, u64)>) -> Option<Self> {
        let ok = terms.iter().all(|(_, c)| *c > 0)
            && terms.windows(2).all(|w| w[0].0 > w[1].0);
        ok.then_some(Ordinal(terms))
    }

    pub fn terms(&self) -> &[(Ordinal, u64)] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_nat(&self) -> Option<u64> {
        match self.0.as_slice() {
            [] => Some(0),
            [(e, c)] if e.is_zero() => Some(*c),
            _ => None,
        }
    }

    /// Ordinal sum `self + other`; terms of `self` below the leading
    /// exponent of `other` are absorbed.
    pub fn add(&self, other: &Ordinal) -> Ordinal {
        let Some((lead, lead_c)) = other.0.first() else {
            return self.clone();
        };
        let mut out: Vec<(Ordinal, u64)> = self
            .0
            .iter()
            .take_while(|(e, _)| e >= lead)
            .cloned()
            .collect();
        match out.last_mut() {
            Some((e, c)) if e == lead => *c += lead_c,
            _ => out.push((lead.clone(), *lead_c)),
        }
        out.extend(other.0[1..].iter().cloned());
        Ordinal(out)
    }

    /// `w^n` for a natural `n`.
    pub fn omega_pow_nat(n: u64) -> Ordinal {
        Ordinal::omega_pow(Ordinal::nat(n))
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        for ((ea, ca), (eb, cb)) in self.0.iter().zip(&other.0) {
            match ea.cmp(eb).then(ca.cmp(cb)) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

impl std::ops::Add for &Ordinal {
    type Output = Ordinal;

    fn add(self, rhs: &Ordinal) -> Ordinal {
        Ordinal::add(self, rhs)
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if e.is_zero() {
                write!(f, "{c}")?;
                continue;
            }
            match e.as_nat() {
                Some(1) => write!(f, "w")?,
                Some(n) => write!(f, "w^{n}")?,
                None if e.0.len() == 1 && e.0[0].1 == 1 => write!(f, "w^{e}")?,
                None => write!(f, "w^({e})")?,
            }
            if *c > 1 {
                write!(f, "*{c}")?;
            }
        }
        Ok(())
    }
}
