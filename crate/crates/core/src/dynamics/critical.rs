use num_rational::BigRational;
use serde::Serialize;

use super::DynamicsError;
use crate::exact::{ProjPoint, RatMap};
use crate::polyfactor::{factor_over_q, FactorConfig};

/// Rational critical points of a map with their ramification multiplicities
/// `e(b) = (ramification index) - 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriticalData {
    #[serde(serialize_with = "ser_points")]
    pub points: Vec<BigRational>,
    pub multiplicities: Vec<usize>,
    /// Multiplicity of infinity as a critical point, 0 if it is not critical.
    pub infinity: usize,
}

fn ser_points<S: serde::Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

impl CriticalData {
    /// All critical points of P^1, finite ones first in increasing order.
    pub fn all_points(&self) -> Vec<ProjPoint> {
        let mut out: Vec<ProjPoint> = self.points.iter().cloned().map(ProjPoint::Finite).collect();
        if self.infinity > 0 {
            out.push(ProjPoint::Infinity);
        }
        out
    }

    pub fn is_unicritical(&self) -> bool {
        self.points.len() == 1
    }
}

/// Roots of the Wronskian (or of `f'` for polynomials), all required to be
/// rational.
pub fn critical_points(f: &RatMap) -> Result<CriticalData, DynamicsError> {
    let d = f.degree();
    if d < 2 {
        return Err(DynamicsError::DegreeTooSmall(d));
    }
    let c = f.wronskian();
    let fac = factor_over_q(&c, &FactorConfig::default())?;
    let mut pairs = Vec::new();
    for g in &fac.factors {
        if g.poly.deg0() != 1 {
            return Err(DynamicsError::IrrationalCriticalPoints {
                factor: g.poly.to_string(),
            });
        }
        let root = -g.poly.coeff(0) / g.poly.coeff(1);
        pairs.push((root, g.multiplicity));
    }
    pairs.sort();
    let finite: usize = pairs.iter().map(|(_, m)| m).sum();
    Ok(CriticalData {
        points: pairs.iter().map(|(r, _)| r.clone()).collect(),
        multiplicities: pairs.iter().map(|(_, m)| *m).collect(),
        infinity: 2 * d - 2 - finite,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::parse_map;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn examples() {
        let c = critical_points(&parse_map("z^2-2").unwrap()).unwrap();
        assert_eq!(c.points, vec![q(0, 1)]);
        assert_eq!(c.multiplicities, vec![1]);
        assert_eq!(c.infinity, 1);

        let c = critical_points(&parse_map("(z^2-4z+1)/(2z)").unwrap()).unwrap();
        assert_eq!(c.points, vec![q(-1, 1), q(1, 1)]);
        assert_eq!(c.infinity, 0);

        let c = critical_points(&parse_map("z^3+7z^2-7").unwrap()).unwrap();
        assert_eq!(c.points, vec![q(-14, 3), q(0, 1)]);
        assert_eq!(c.infinity, 2);

        let c = critical_points(&parse_map("z^3+2").unwrap()).unwrap();
        assert_eq!(c.points, vec![q(0, 1)]);
        assert_eq!(c.multiplicities, vec![2]);
        assert!(c.is_unicritical());
    }

    #[test]
    fn irrational_and_degenerate() {
        assert!(matches!(
            critical_points(&parse_map("z^3-3/2 z^2 - z").unwrap()),
            Err(DynamicsError::IrrationalCriticalPoints { .. })
        ));
        assert_eq!(
            critical_points(&parse_map("z").unwrap()),
            Err(DynamicsError::DegreeTooSmall(1))
        );
    }
}
