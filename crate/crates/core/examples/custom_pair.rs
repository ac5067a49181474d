//! Operators that are not position or momentum: spin-1 components along z and
//! along an axis tilted by one radian, as matrices over an abstract basis.

use nalgebra::{DMatrix, DVector};
use phasespace::correspondence::{expectation_phase_space, mh_cfunction};
use phasespace::hilbert::{BasisTag, OperatorMatrix, StateVector};
use phasespace::models::OperatorPair;
use phasespace::quasidist::mh_distribution;
use phasespace::C64;

fn main() -> phasespace::Result<()> {
    let basis = BasisTag::new("spin1");
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let z = C64::from(0.0);
    let sx = DMatrix::from_row_slice(3, 3, &[z, s.into(), z, s.into(), z, s.into(), z, s.into(), z]);
    let sz: DMatrix<C64> = DMatrix::from_diagonal(&DVector::from_vec(vec![C64::from(1.0), z, C64::from(-1.0)]));
    let tilt = 1.0f64;
    let sn = &sz * C64::from(tilt.cos()) + sx * C64::from(tilt.sin());
    let a = OperatorMatrix::hermitian(basis.clone(), sz, 1.0)?.with_label("Sz");
    let b = OperatorMatrix::hermitian(basis.clone(), sn, 1.0)?.with_label("Sn");
    let pair = OperatorPair::new(&a, &b)?;

    let psi = StateVector::new(
        basis,
        DVector::from_vec(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.48), C64::new(0.64, 0.0)]),
        vec![1.0; 3],
    )?
    .normalized();
    let (ca, cb) = pair.coefficients(&psi)?;
    let p = mh_distribution(&ca, &cb, &pair.transform)?;
    println!("Sz values {:?}", pair.basis_a.values());
    println!("Sn values {:?}", pair.basis_b.values());
    for j in 0..3 {
        let row: Vec<String> = (0..3)
            .map(|k| format!("{:+.4}{:+.4}i", p.values()[(j, k)].re, p.values()[(j, k)].im))
            .collect();
        println!("  {}", row.join("  "));
    }
    let prod = a.product(&b)?;
    let g = mh_cfunction(&prod, &pair.basis_a, &pair.basis_b, &pair.transform)?;
    println!(
        "<Sz Sn> = {:.6} (trace {:.6})",
        expectation_phase_space(&g, &p)?,
        prod.expectation(&psi)?
    );
    Ok(())
}
