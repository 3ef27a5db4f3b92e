use num_traits::{One, Zero};

use super::poly::Poly;
use super::power::PowerSeries;
use super::rational::RationalFunction;
use crate::arith::{QMatrix, Rational};
use crate::error::{invalid, Error, Result};

/// The rational function `N/D` with `deg N <= deg_num`, `deg D <= deg_den`, `D(0) = 1`
/// agreeing with `s` through `t^{deg_num + deg_den}`.
pub fn pade_reconstruct(s: &PowerSeries, deg_num: usize, deg_den: usize) -> Result<RationalFunction> {
    let total = deg_num + deg_den;
    if s.order() < total {
        return Err(Error::Underdetermined(format!(
            "Padé ({deg_num},{deg_den}) needs coefficients through t^{total}, series stops at t^{}",
            s.order()
        )));
    }
    if !s.coeff(0).is_one() {
        return invalid("Padé reconstruction expects constant term 1");
    }
    let c = |i: isize| -> Rational {
        if i < 0 {
            Rational::zero()
        } else {
            s.coeff(i as usize).clone()
        }
    };

    let mut den = vec![Rational::one()];
    if deg_den > 0 {
        // augmented system: sum_{j=1..n} d_j c_{k-j} = -c_k, k = m+1..m+n
        let mut aug = QMatrix::zeros(deg_den, deg_den + 1);
        for row in 0..deg_den {
            let k = (deg_num + 1 + row) as isize;
            for j in 1..=deg_den {
                aug[(row, j - 1)] = c(k - j as isize);
            }
            aug[(row, deg_den)] = -c(k);
        }
        let (r, pivots) = aug.rref();
        if pivots.contains(&deg_den) {
            return Err(Error::NoSolution(format!(
                "no rational function with degrees ({deg_num},{deg_den}) and D(0) = 1 matches the series"
            )));
        }
        let mut d = vec![Rational::zero(); deg_den];
        for (row, &pc) in pivots.iter().enumerate() {
            d[pc] = r[(row, deg_den)].clone();
        }
        den.extend(d);
    }
    let den = Poly::new(den);
    let num = (&PowerSeries::from_poly(&den, total) * &s.truncate(total)).to_poly();
    let num = Poly::new((0..=deg_num).map(|i| num.coeff(i)).collect());
    let rf = RationalFunction::new(num, den)?;
    if rf.expand(total) != s.truncate(total) {
        return Err(Error::NoSolution(format!(
            "Padé ({deg_num},{deg_den}) candidate failed re-expansion"
        )));
    }
    Ok(rf)
}
