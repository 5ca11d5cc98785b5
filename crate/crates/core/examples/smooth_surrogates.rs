//! How each smoothed indicator approaches the step function as the
//! smoothness shrinks.

use cachecast::smooth::{f_theta, theta_next, AnnealSchedule, SmoothKind};

fn main() {
    let sched = AnnealSchedule::default();
    let x = 1e-3;
    for kind in [SmoothKind::Log, SmoothKind::Exp, SmoothKind::Arctan] {
        print!("{kind:?}:");
        let mut theta = Some(1.0);
        while let Some(t) = theta {
            print!(" {:.3}", f_theta(kind, x, t).expect("valid inputs"));
            theta = theta_next(t, &sched);
        }
        println!();
    }
}
