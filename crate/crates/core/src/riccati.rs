//! Backward Riccati recursion for the finite-horizon LQG controller.
//!
//! For `t = T, …, 1` with `N_{T+1} = 0`:
//!
//! ```text
//! S_t = Q_t + N_{t+1}
//! N_t = A_tᵀ (S_t⁻¹ + B_t R_t⁻¹ B_tᵀ)⁻¹ A_t
//! M_t = B_tᵀ S_t B_t + R_t
//! K_t = −M_t⁻¹ B_tᵀ S_t A_t
//! Θ_t = K_tᵀ M_t K_t
//! ```
//!
//! The gains do not depend on which sensors are active, so one solution
//! serves every sensor set. `Θ_t` converts estimation covariance into
//! control-performance loss and is the weight of the sensing objective.
//!
//! Also here: the checks relating `Σ_t Θ_t ≻ 0` to the suboptimality of
//! the all-zero input sequence in the noiseless, perfect-information problem.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat, MAX_CONDITION};
use crate::model::{LqgWeights, LtvSystem};

/// Strict-positivity threshold for the definiteness predicates below.
pub const DEFINITE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct RiccatiSolution {
    /// `S_t`, `t = 1..T` (0-based storage).
    pub s: Vec<Mat>,
    /// `N_t`, `t = 1..T`; `N_{T+1} = 0` is implicit.
    pub n: Vec<Mat>,
    pub m: Vec<Mat>,
    pub k: Vec<Mat>,
    pub theta: Vec<Mat>,
}

impl RiccatiSolution {
    pub fn horizon(&self) -> usize {
        self.s.len()
    }

    pub fn theta_sum(&self) -> Mat {
        let n = self.theta[0].nrows();
        self.theta.iter().fold(Mat::zeros(n, n), |acc, th| acc + th)
    }

    /// Row-major nested arrays of every sequence, for JSON dumps.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Dump {
            #[serde(rename = "S")]
            s: Vec<Vec<Vec<f64>>>,
            #[serde(rename = "N")]
            n: Vec<Vec<Vec<f64>>>,
            #[serde(rename = "M")]
            m: Vec<Vec<Vec<f64>>>,
            #[serde(rename = "K")]
            k: Vec<Vec<Vec<f64>>>,
            #[serde(rename = "Theta")]
            theta: Vec<Vec<Vec<f64>>>,
        }
        let rows = |v: &[Mat]| v.iter().map(linalg::to_rows).collect();
        let dump = Dump {
            s: rows(&self.s),
            n: rows(&self.n),
            m: rows(&self.m),
            k: rows(&self.k),
            theta: rows(&self.theta),
        };
        let mut out = serde_json::to_string_pretty(&dump).expect("riccati dump cannot fail");
        out.push('\n');
        out
    }
}

pub fn solve_riccati(system: &LtvSystem, weights: &LqgWeights) -> Result<RiccatiSolution> {
    let horizon = system.horizon();
    let n = system.state_dim();
    let mut s_seq = vec![Mat::zeros(0, 0); horizon];
    let mut n_seq = vec![Mat::zeros(0, 0); horizon];
    let mut m_seq = vec![Mat::zeros(0, 0); horizon];
    let mut k_seq = vec![Mat::zeros(0, 0); horizon];
    let mut th_seq = vec![Mat::zeros(0, 0); horizon];

    let mut n_next = Mat::zeros(n, n);
    for k in (0..horizon).rev() {
        let t = Some(k + 1);
        let a = system.a(k);
        let b = system.b(k);
        let r = weights.r(k);

        let s = linalg::symmetrize(&(weights.q(k) + &n_next));
        let m = linalg::symmetrize(&(b.transpose() * &s * b + r));
        let condition = linalg::condition_number(&m);
        if !(condition <= MAX_CONDITION) {
            return Err(Error::Singular {
                what: "M_t",
                t,
                condition,
            });
        }
        let m_inv = linalg::spd_inverse(&m).ok_or(Error::Singular {
            what: "M_t",
            t,
            condition,
        })?;
        let gain = -(&m_inv * b.transpose() * &s * a);
        let theta = linalg::symmetrize(&(gain.transpose() * &m * &gain));

        let n_t = if linalg::condition_number(&s) <= MAX_CONDITION {
            // Direct form; needs S_t invertible.
            let s_inv = linalg::spd_inverse(&s);
            let r_inv = linalg::spd_inverse(r);
            match (s_inv, r_inv) {
                (Some(s_inv), Some(r_inv)) => {
                    let inner = s_inv + b * r_inv * b.transpose();
                    match linalg::spd_inverse(&inner) {
                        Some(inv) => a.transpose() * inv * a,
                        None => a.transpose() * &s * a - &theta,
                    }
                }
                _ => a.transpose() * &s * a - &theta,
            }
        } else {
            // Woodbury-equivalent form, valid for singular S_t.
            a.transpose() * &s * a - &theta
        };
        let n_t = linalg::symmetrize(&n_t);

        n_next = n_t.clone();
        s_seq[k] = s;
        n_seq[k] = n_t;
        m_seq[k] = m;
        k_seq[k] = gain;
        th_seq[k] = theta;
    }

    Ok(RiccatiSolution {
        s: s_seq,
        n: n_seq,
        m: m_seq,
        k: k_seq,
        theta: th_seq,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DefinitenessCheck {
    pub min_eigenvalue: f64,
    pub positive_definite: bool,
}

/// `λ_min(Σ_t Θ_t)` and whether it exceeds [`DEFINITE_TOL`].
pub fn theta_sum_positive_definite(sol: &RiccatiSolution) -> DefinitenessCheck {
    let lmin = linalg::min_eigenvalue(&sol.theta_sum());
    DefinitenessCheck {
        min_eigenvalue: lmin,
        positive_definite: lmin > DEFINITE_TOL,
    }
}

/// `Σ_t (A_t⋯A_1)ᵀ Q_t (A_t⋯A_1)`: the cost of the all-zero input for unit
/// initial conditions in the noiseless problem.
fn zero_input_cost_matrix(system: &LtvSystem, weights: &LqgWeights) -> Mat {
    let n = system.state_dim();
    let mut transition = Mat::identity(n, n);
    let mut acc = Mat::zeros(n, n);
    for k in 0..system.horizon() {
        transition = system.a(k) * transition;
        acc += transition.transpose() * weights.q(k) * &transition;
    }
    linalg::symmetrize(&acc)
}

/// Whether the all-zero input sequence is strictly suboptimal for every
/// nonzero initial state of the noiseless, perfect-information problem, i.e.
/// `Σ_t (A_t⋯A_1)ᵀ Q_t (A_t⋯A_1) − N_1 ≻ 0`. Requires every `A_t` invertible.
pub fn zero_control_suboptimal(
    system: &LtvSystem,
    weights: &LqgWeights,
    sol: &RiccatiSolution,
) -> Result<DefinitenessCheck> {
    for k in 0..system.horizon() {
        let condition = linalg::condition_number(system.a(k));
        if !(condition < MAX_CONDITION) {
            return Err(Error::Singular {
                what: "A_t",
                t: Some(k + 1),
                condition,
            });
        }
    }
    let gap = zero_input_cost_matrix(system, weights) - &sol.n[0];
    let lmin = linalg::min_eigenvalue(&gap);
    Ok(DefinitenessCheck {
        min_eigenvalue: lmin,
        positive_definite: lmin > DEFINITE_TOL,
    })
}

/// Frobenius norm of `Σ_t U_tᵀ Θ_t U_t − (Σ_t (A_t⋯A_1)ᵀ Q_t (A_t⋯A_1) − N_1)`
/// with `U_1 = I`, `U_t = A_{t−1}⋯A_1`. Zero up to rounding.
pub fn cascade_identity_residual(system: &LtvSystem, weights: &LqgWeights, sol: &RiccatiSolution) -> f64 {
    let n = system.state_dim();
    let mut u = Mat::identity(n, n);
    let mut lhs = Mat::zeros(n, n);
    for k in 0..system.horizon() {
        lhs += u.transpose() * &sol.theta[k] * &u;
        u = system.a(k) * u;
    }
    let rhs = zero_input_cost_matrix(system, weights) - &sol.n[0];
    linalg::frobenius(&(lhs - rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Vector;

    fn scalar_problem(horizon: usize, q: f64) -> (LtvSystem, LqgWeights) {
        let one = Mat::from_element(1, 1, 1.0);
        let sys = LtvSystem::new(
            vec![one.clone(); horizon],
            vec![one.clone(); horizon],
            vec![Mat::zeros(1, 1); horizon],
            one.clone(),
            Vector::zeros(1),
        )
        .unwrap();
        let w = LqgWeights::new(vec![one.clone() * q; horizon], vec![one; horizon]).unwrap();
        (sys, w)
    }

    #[test]
    fn scalar_single_step() {
        let (sys, w) = scalar_problem(1, 1.0);
        let sol = solve_riccati(&sys, &w).unwrap();
        assert!((sol.s[0][(0, 0)] - 1.0).abs() < 1e-12);
        assert!((sol.n[0][(0, 0)] - 0.5).abs() < 1e-12);
        assert!((sol.m[0][(0, 0)] - 2.0).abs() < 1e-12);
        assert!((sol.k[0][(0, 0)] + 0.5).abs() < 1e-12);
        assert!((sol.theta[0][(0, 0)] - 0.5).abs() < 1e-12);

        let pd = theta_sum_positive_definite(&sol);
        assert!((pd.min_eigenvalue - 0.5).abs() < 1e-12);
        assert!(pd.positive_definite);
        let zc = zero_control_suboptimal(&sys, &w, &sol).unwrap();
        assert!((zc.min_eigenvalue - 0.5).abs() < 1e-12);
        assert!(zc.positive_definite);
        assert!(cascade_identity_residual(&sys, &w, &sol) < 1e-12);
    }

    #[test]
    fn zero_state_weight_gives_zero_gains() {
        let (sys, w) = scalar_problem(3, 0.0);
        let sol = solve_riccati(&sys, &w).unwrap();
        for k in 0..3 {
            assert_eq!(sol.k[k][(0, 0)], 0.0);
            assert_eq!(sol.theta[k][(0, 0)], 0.0);
        }
        let pd = theta_sum_positive_definite(&sol);
        assert_eq!(pd.min_eigenvalue, 0.0);
        assert!(!pd.positive_definite);
        assert!(!zero_control_suboptimal(&sys, &w, &sol).unwrap().positive_definite);
        assert_eq!(cascade_identity_residual(&sys, &w, &sol), 0.0);
    }

    #[test]
    fn two_step_identity_system_matches_hand_values() {
        // Scalar hand evaluation, t = 2: S=1, N=1/2, M=2, K=-1/2, Θ=1/2;
        // t = 1: S=3/2, N=(2/3+1)⁻¹=3/5, M=5/2, K=-3/5, Θ=(9/25)(5/2)=9/10.
        let i2 = Mat::identity(2, 2);
        let w_noise = Mat::from_row_slice(2, 2, &[0.3, 0.1, 0.1, 0.2]);
        let sys = LtvSystem::new(
            vec![i2.clone(); 2],
            vec![i2.clone(); 2],
            vec![w_noise; 2],
            i2.clone(),
            Vector::zeros(2),
        )
        .unwrap();
        let w = LqgWeights::new(vec![i2.clone(); 2], vec![i2.clone(); 2]).unwrap();
        let sol = solve_riccati(&sys, &w).unwrap();
        let expect = |m: &Mat, v: f64| assert!((m - &i2 * v).norm() < 1e-12, "{m} vs {v}");
        expect(&sol.s[1], 1.0);
        expect(&sol.n[1], 0.5);
        expect(&sol.m[1], 2.0);
        expect(&sol.k[1], -0.5);
        expect(&sol.theta[1], 0.5);
        expect(&sol.s[0], 1.5);
        expect(&sol.n[0], 0.6);
        expect(&sol.m[0], 2.5);
        expect(&sol.k[0], -0.6);
        expect(&sol.theta[0], 0.9);
    }

    #[test]
    fn singular_state_weight_uses_equivalent_form() {
        // S_T = Q_T is singular; the recursion must still produce finite N_t.
        let a = Mat::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        let b = Mat::from_row_slice(2, 1, &[0.0, 1.0]);
        let q = Mat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let sys = LtvSystem::new(
            vec![a.clone(); 3],
            vec![b.clone(); 3],
            vec![Mat::identity(2, 2) * 0.1; 3],
            Mat::identity(2, 2),
            Vector::zeros(2),
        )
        .unwrap();
        let w = LqgWeights::new(vec![q; 3], vec![Mat::identity(1, 1); 3]).unwrap();
        let sol = solve_riccati(&sys, &w).unwrap();
        // Independent route: N_t = AᵀSA − AᵀSB (BᵀSB + R)⁻¹ BᵀSA.
        for k in 0..3 {
            let s = &sol.s[k];
            let m = b.transpose() * s * &b + Mat::identity(1, 1);
            let m_inv = m.try_inverse().unwrap();
            let n_ref = a.transpose() * s * &a - a.transpose() * s * &b * m_inv * b.transpose() * s * &a;
            assert!((&sol.n[k] - n_ref).norm() < 1e-10);
            assert!(sol.n[k].iter().all(|x| x.is_finite()));
        }
    }

    #[test]
    fn positive_theta_sum_does_not_imply_zero_control_suboptimal() {
        // x₁ = e₁ is swapped onto e₂, which no Q_t penalizes, so the zero
        // input is optimal from e₁ even though Σ_t Θ_t = diag(½, 9/10) ≻ 0.
        let swap = Mat::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let i2 = Mat::identity(2, 2);
        let e1 = Mat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let sys = LtvSystem::new(
            vec![swap, i2.clone()],
            vec![i2.clone(); 2],
            vec![Mat::zeros(2, 2); 2],
            i2.clone(),
            Vector::zeros(2),
        )
        .unwrap();
        let w = LqgWeights::new(vec![e1; 2], vec![i2; 2]).unwrap();
        let sol = solve_riccati(&sys, &w).unwrap();
        let sum = sol.theta_sum();
        assert!((sum - Mat::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 0.9])).norm() < 1e-12);
        assert!(theta_sum_positive_definite(&sol).positive_definite);
        let zc = zero_control_suboptimal(&sys, &w, &sol).unwrap();
        assert!(zc.min_eigenvalue.abs() < 1e-12);
        assert!(!zc.positive_definite);
        assert!(cascade_identity_residual(&sys, &w, &sol) < 1e-12);
    }

    #[test]
    fn rejects_singular_a_in_zero_control_check() {
        let z = Mat::zeros(1, 1);
        let one = Mat::from_element(1, 1, 1.0);
        let sys = LtvSystem::new(vec![z], vec![one.clone()], vec![one.clone()], one.clone(), Vector::zeros(1)).unwrap();
        let w = LqgWeights::new(vec![one.clone()], vec![one]).unwrap();
        let sol = solve_riccati(&sys, &w).unwrap();
        assert!(matches!(
            zero_control_suboptimal(&sys, &w, &sol),
            Err(Error::Singular { what: "A_t", .. })
        ));
    }
}
