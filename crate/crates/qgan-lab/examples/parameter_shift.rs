//! Exact analytic gradients of circuit read-outs via the parameter-shift
//! rule, checked against central finite differences.

use qgan_lab::ansatz::{self, MpqcSpec, ParamMatrix};
use qgan_lab::qsim::StateVector;
use qgan_lab::{rng, Result};

fn main() -> Result<()> {
    let spec = MpqcSpec::chain(3, 3);
    let mut r = rng::stream(1, 0);
    let params = ParamMatrix::random(&spec, &mut r, 0.0, std::f64::consts::TAU);

    // Loss: probability of the all-zeros outcome. Each evaluation reruns
    // the circuit with one parameter shifted by +/- pi/2.
    let loss = |p: &ParamMatrix, _tag: ansatz::EvalTag| {
        let mut s = StateVector::zero(3)?;
        ansatz::apply_mpqc(&mut s, &spec, p)?;
        Ok(s.probabilities()[0])
    };

    let shift = ansatz::parameter_shift_grad(&params, loss)?;
    let fd = ansatz::finite_difference_grad(&params, 1e-5, loss)?;

    println!("{:>6} {:>14} {:>14} {:>12}", "param", "shift rule", "finite diff", "|delta|");
    let mut worst = 0.0f64;
    for (i, (a, b)) in shift.as_slice().iter().zip(fd.as_slice()).enumerate() {
        let d = (a - b).abs();
        worst = worst.max(d);
        println!("{i:>6} {a:>14.9} {b:>14.9} {d:>12.2e}");
    }
    println!("largest deviation: {worst:.2e} (finite-difference truncation error)");
    Ok(())
}
