use rayon::prelude::*;

use twostate::channel::{
    average_fidelity_direct, optimize_combined, purification_fidelity_two_state,
    purification_fidelity_unknown, two_state_direct_fidelity,
};
use twostate::classical::{
    fidelity_fuchs_peres, fidelity_min_error, fidelity_optimized, fidelity_unambiguous,
};
use twostate::telecloning::{
    alice_receivers_entanglement, global_clone_fidelity, optimal_global_fidelity, optimize_coeffs,
};
use twostate::verify::grid;
use twostate::{Channel, Result, TelecloningSystem, TwoStateEnsemble};

pub const CLASSICAL_HEADER: [&str; 5] = [
    "theta",
    "f_min_error",
    "f_unambiguous",
    "f_optimized",
    "f_fuchs_peres",
];
pub const CHANNEL_HEADER: [&str; 5] = [
    "alpha_sq",
    "f_direct",
    "f_purification",
    "f_combined",
    "alpha_prime_opt",
];
pub const CHANNEL_UNKNOWN_HEADER: [&str; 3] = ["alpha_sq", "f_direct_avg", "f_purif_unknown"];
pub const TELECLONING_HEADER: [&str; 7] = [
    "theta",
    "a",
    "b",
    "c",
    "f_global_teleclone",
    "f_global_optimal",
    "entanglement_alice_receivers",
];

fn theta_grid(steps: usize) -> Vec<f64> {
    grid(0.0, std::f64::consts::FRAC_PI_2, steps)
}

fn alpha_sq_grid(steps: usize) -> Vec<f64> {
    grid(0.0, 0.5, steps)
}

pub fn classical_rows(theta_steps: usize) -> Result<Vec<Vec<f64>>> {
    theta_grid(theta_steps)
        .into_par_iter()
        .map(|t| {
            let e = TwoStateEnsemble::new(t)?;
            Ok(vec![
                t,
                fidelity_min_error(&e),
                fidelity_unambiguous(&e),
                fidelity_optimized(&e).fidelity,
                fidelity_fuchs_peres(&e),
            ])
        })
        .collect()
}

pub fn channel_rows(theta: f64, alpha_steps: usize) -> Result<Vec<Vec<f64>>> {
    let e = TwoStateEnsemble::new(theta)?;
    alpha_sq_grid(alpha_steps)
        .into_par_iter()
        .map(|a2| {
            let c = Channel::from_alpha_sq(a2)?;
            let best = optimize_combined(&e, &c);
            Ok(vec![
                a2,
                two_state_direct_fidelity(&e, &c),
                purification_fidelity_two_state(&e, &c),
                best.fidelity,
                best.alpha_prime.unwrap_or(c.alpha()),
            ])
        })
        .collect()
}

pub fn channel_unknown_rows(alpha_steps: usize) -> Result<Vec<Vec<f64>>> {
    alpha_sq_grid(alpha_steps)
        .into_par_iter()
        .map(|a2| {
            let c = Channel::from_alpha_sq(a2)?;
            Ok(vec![
                a2,
                average_fidelity_direct(&c),
                purification_fidelity_unknown(&c),
            ])
        })
        .collect()
}

pub fn telecloning_rows(theta_steps: usize) -> Result<Vec<Vec<f64>>> {
    theta_grid(theta_steps)
        .into_par_iter()
        .map(|t| {
            let e = TwoStateEnsemble::new(t)?;
            let k = optimize_coeffs(&e);
            Ok(vec![
                t,
                k.a(),
                k.b(),
                k.c(),
                global_clone_fidelity(&e, &k)?,
                optimal_global_fidelity(&e),
                alice_receivers_entanglement(&TelecloningSystem::build(k)),
            ])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn classical_rows_examples() {
        let rows = classical_rows(181).unwrap();
        assert_eq!(rows.len(), 181);
        assert!(rows[0][1..].iter().all(|&v| close(v, 1.0, 1e-15)));
        let mid = &rows[90];
        assert!(close(mid[0], FRAC_PI_4, 1e-15));
        assert!(close(mid[1], 0.92678, 5e-6));
        assert!(close(mid[2], 0.823223, 1e-6));
        assert!(close(mid[3], 0.93301, 5e-6));
        assert!(close(mid[4], 0.93301, 5e-6));
        assert_eq!(rows[180][0], FRAC_PI_2);
    }

    #[test]
    fn channel_rows_examples() {
        let rows = channel_rows(FRAC_PI_4, 11).unwrap();
        let last = rows.last().unwrap();
        assert_eq!(last[0], 0.5);
        assert!(last[1..4].iter().all(|&v| close(v, 1.0, 1e-12)));
        let row = channel_rows(FRAC_PI_4, 6).unwrap()[3].clone();
        assert!(close(row[0], 0.3, 1e-15));
        assert!(close(row[1], 0.97913, 5e-6));
        assert!(close(row[2], 0.973205, 1e-6));
        assert!(row[3] >= row[1] - 1e-12);
    }

    #[test]
    fn unknown_rows_examples() {
        let rows = channel_unknown_rows(101).unwrap();
        assert!(close(rows[0][1], 2.0 / 3.0, 1e-15) && close(rows[0][2], 2.0 / 3.0, 1e-15));
        assert!(close(rows[100][1], 1.0, 1e-12) && close(rows[100][2], 1.0, 1e-12));
    }

    #[test]
    fn telecloning_rows_examples() {
        let rows = telecloning_rows(11).unwrap();
        let first = &rows[0];
        assert!(close(first[1], 1.0, 1e-6) && first[2] < 1e-6 && first[3] < 1e-6);
        assert!(close(first[4], 1.0, 1e-12) && close(first[5], 1.0, 1e-12));
        assert!(close(first[6], 1.0, 1e-9));
        for r in &rows {
            assert!(r[6] < 3f64.log2());
            assert!(r[4] <= r[5] + 1e-9);
        }
    }
}
