//! The three problem shapes the beamforming algorithms hand to the
//! interior-point solver.

use cachecast::conic::{
    solve_lp, solve_qcqp, solve_sdp, AffineForm, IpmSettings, LpProblem, QcqpConstraint, QcqpProblem, SdpProblem,
    Sense,
};
use cachecast::linalg::{outer, CMatrix};
use num_complex::Complex64;

fn main() {
    let settings = IpmSettings::default();
    let h = vec![Complex64::new(1.0, 0.5), Complex64::new(-0.3, 0.8)];

    // min tr(W) s.t. h^H W h >= 2: optimum 2 / ||h||^2 at W = c h h^H.
    let mut sdp = SdpProblem::new(vec![CMatrix::identity(2, 2)]);
    sdp.push(vec![(0, outer(&h))], 2.0);
    let s = solve_sdp(&sdp, &settings);
    println!("sdp  {:?} objective {:.6} after {} iterations", s.status, s.objective, s.iterations);

    // min t s.t. ||v||^2 <= t, Re(v_0) >= 3.
    let mut q = QcqpProblem::new(2, 1);
    q.objective = vec![1.0];
    q.push(
        QcqpConstraint::quadratic(
            &CMatrix::identity(2, 2),
            &[0, 1],
            AffineForm {
                real: vec![(0, 1.0)],
                ..Default::default()
            },
        )
        .expect("identity is PSD"),
    );
    q.push(QcqpConstraint::Affine(AffineForm {
        complex: vec![(0, Complex64::new(1.0, 0.0))],
        constant: -3.0,
        ..Default::default()
    }));
    let s = solve_qcqp(&q, &settings);
    println!("qcqp {:?} objective {:.6}", s.status, s.objective);

    // min x + 2y s.t. x + y >= 1, x <= 0.4.
    let mut lp = LpProblem::new(vec![1.0, 2.0]);
    lp.push(vec![(0, 1.0), (1, 1.0)], Sense::Ge, 1.0);
    lp.push(vec![(0, 1.0)], Sense::Le, 0.4);
    let s = solve_lp(&lp, &settings);
    println!("lp   {:?} objective {:.6} at {:.4?}", s.status, s.objective, s.primal);
}
