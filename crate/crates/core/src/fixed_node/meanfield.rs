use serde::Serialize;

use super::FixedNodeParams;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Grid resolution of the root scan per axis.
const GRID: usize = 200;
const ROOT_TOL: f64 = 1e-10;
const MERGE_TOL: f64 = 1e-6;
const NEWTON_STEPS: usize = 100;

/// Equilibrium of the mean-field dynamics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FixedPoint<T> {
    /// Probability that a neighbor of a group-1 node is in group 1.
    pub t11: T,
    pub t22: T,
    /// Share of edges inside group 1.
    pub p11: T,
    pub p22: T,
    pub stable: bool,
    pub integration: T,
}

/// Two-step walk probabilities `((T²)_{θ|θ}, (T²)_{θ̄|θ})` from a node of group `θ`.
fn two_step<T: Real>(own: T, other: T) -> (T, T) {
    let one = T::one();
    (own * own + (one - own) * (one - other), own * (one - own) + (one - own) * other)
}

fn rate<T: Real>(group: usize, own: T, other: T, params: &FixedNodeParams<T>) -> T {
    let one = T::one();
    let (c, s, sp) = (params.c, params.s, params.s_prime);
    let (n, n_bar) = (params.n_theta[group], params.n_theta[1 - group]);
    let (same, cross) = two_step(own, other);
    let gain = (one - c) * n * s + c * same * sp;
    let formed = gain + (one - c) * n_bar * (one - s) + c * cross * (one - sp);
    n * gain - n * own * formed
}

/// Mean-field drift `(dP11/dt, dP22/dt)` with time measured in units of `L` iterations.
pub fn meanfield_rhs<T: Real>(t11: T, t22: T, params: &FixedNodeParams<T>) -> (T, T) {
    (rate(0, t11, t22, params), rate(1, t22, t11, params))
}

/// `T_{θ|θ} = 2 P_θθ / (1 + P_θθ - P_θ̄θ̄)`.
pub fn t_from_p<T: Real>(p11: T, p22: T) -> (T, T) {
    let (one, two) = (T::one(), T::lit(2.0));
    let t = |own: T, other: T| {
        let den = one + own - other;
        if den > T::zero() {
            two * own / den
        } else {
            T::zero()
        }
    };
    (t(p11, p22), t(p22, p11))
}

/// Inverse of [`t_from_p`]. `None` at `T11 = T22 = 1`, where every split of a
/// fully segregated edge set is consistent.
pub fn p_from_t<T: Real>(t11: T, t22: T) -> Option<(T, T)> {
    let den = T::lit(2.0) - t11 - t22;
    if den <= T::epsilon() {
        return None;
    }
    let one = T::one();
    Some((t11 * (one - t22) / den, t22 * (one - t11) / den))
}

fn eval(params: &FixedNodeParams<f64>, x: [f64; 2]) -> [f64; 2] {
    let (a, b) = meanfield_rhs(x[0], x[1], params);
    [a, b]
}

fn jacobian_t(params: &FixedNodeParams<f64>, x: [f64; 2]) -> [[f64; 2]; 2] {
    let h = 1e-7;
    let mut j = [[0.0; 2]; 2];
    for col in 0..2 {
        let (mut up, mut down) = (x, x);
        up[col] += h;
        down[col] -= h;
        let (fu, fd) = (eval(params, up), eval(params, down));
        for row in 0..2 {
            j[row][col] = (fu[row] - fd[row]) / (2.0 * h);
        }
    }
    j
}

fn newton(params: &FixedNodeParams<f64>, mut x: [f64; 2]) -> Option<[f64; 2]> {
    for _ in 0..NEWTON_STEPS {
        let f = eval(params, x);
        if f == [0.0, 0.0] {
            break;
        }
        let j = jacobian_t(params, x);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.abs() < 1e-300 {
            return None;
        }
        let dx = [(j[1][1] * f[0] - j[0][1] * f[1]) / det, (j[0][0] * f[1] - j[1][0] * f[0]) / det];
        let next = [(x[0] - dx[0]).clamp(0.0, 1.0), (x[1] - dx[1]).clamp(0.0, 1.0)];
        let moved = (next[0] - x[0]).abs().max((next[1] - x[1]).abs());
        x = next;
        if moved < 1e-15 {
            break;
        }
    }
    let f = eval(params, x);
    (f[0].abs().max(f[1].abs()) <= ROOT_TOL).then_some(x)
}

/// Edge shares at a fixed point, falling back to group fractions when the
/// network is fully segregated.
fn shares(params: &FixedNodeParams<f64>, x: [f64; 2]) -> (f64, f64) {
    p_from_t(x[0], x[1]).unwrap_or((params.n_theta[0], params.n_theta[1]))
}

/// Stability from the Jacobian in `(P11, P22)` coordinates. At full
/// segregation the map to `T` is singular and the `T` Jacobian is used.
fn is_stable(params: &FixedNodeParams<f64>, x: [f64; 2]) -> bool {
    let jt = jacobian_t(params, x);
    let negative_definite = |j: [[f64; 2]; 2]| j[0][0] + j[1][1] < 0.0 && j[0][0] * j[1][1] - j[0][1] * j[1][0] > 0.0;
    let Some((a, b)) = p_from_t(x[0], x[1]).filter(|(a, b)| a + b < 1.0 - 1e-9) else {
        return negative_definite(jt);
    };
    // dT/dP of the map T_θ = 2 P_θθ / (1 + P_θθ - P_θ̄θ̄).
    let d1 = (1.0 + a - b).powi(2);
    let d2 = (1.0 + b - a).powi(2);
    let dt = [[2.0 * (1.0 - b) / d1, 2.0 * a / d1], [2.0 * b / d2, 2.0 * (1.0 - a) / d2]];
    let mut jp = [[0.0; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            jp[r][c] = jt[r][0] * dt[0][c] + jt[r][1] * dt[1][c];
        }
    }
    negative_definite(jp)
}

/// All roots of the mean-field drift in `[0, 1]²`, ordered by `t11` then `t22`.
pub fn find_fixed_points<T: Real>(params: &FixedNodeParams<T>) -> Result<Vec<FixedPoint<T>>> {
    params.validate()?;
    let p64 = FixedNodeParams {
        c: params.c.to_f64_lossy(),
        s: params.s.to_f64_lossy(),
        s_prime: params.s_prime.to_f64_lossy(),
        n_theta: params.n_theta.map(|x| x.to_f64_lossy()),
    };
    let step = 1.0 / GRID as f64;
    let values: Vec<Vec<[f64; 2]>> =
        (0..=GRID).map(|i| (0..=GRID).map(|j| eval(&p64, [i as f64 * step, j as f64 * step])).collect()).collect();
    let brackets = |i: usize, j: usize, k: usize| {
        let corners = [values[i][j][k], values[i + 1][j][k], values[i][j + 1][k], values[i + 1][j + 1][k]];
        corners.iter().any(|&v| v <= 0.0) && corners.iter().any(|&v| v >= 0.0)
    };

    let mut roots: Vec<[f64; 2]> = Vec::new();
    for i in 0..GRID {
        for j in 0..GRID {
            if !(brackets(i, j, 0) && brackets(i, j, 1)) {
                continue;
            }
            let start = [(i as f64 + 0.5) * step, (j as f64 + 0.5) * step];
            if let Some(x) = newton(&p64, start) {
                if !roots.iter().any(|r| (r[0] - x[0]).abs().max((r[1] - x[1]).abs()) < MERGE_TOL) {
                    roots.push(x);
                }
            }
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).expect("roots are finite"));
    Ok(roots
        .into_iter()
        .map(|x| {
            let (p11, p22) = shares(&p64, x);
            FixedPoint {
                t11: T::lit(x[0]),
                t22: T::lit(x[1]),
                p11: T::lit(p11),
                p22: T::lit(p22),
                stable: is_stable(&p64, x),
                integration: T::lit(1.0 - p11 - p22),
            }
        })
        .collect())
}

/// The stable fixed point with the highest integration.
pub fn stable_fixed_point<T: Real>(params: &FixedNodeParams<T>) -> Result<FixedPoint<T>> {
    find_fixed_points(params)?
        .into_iter()
        .filter(|p| p.stable)
        .max_by(|a, b| a.integration.partial_cmp(&b.integration).expect("finite integration"))
        .ok_or(Error::NoStableEquilibrium)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unbiased(c: f64, s: f64) -> FixedNodeParams<f64> {
        FixedNodeParams::unbiased(c, s).unwrap()
    }

    #[test]
    fn symmetric_point_has_zero_drift() {
        let (a, b) = meanfield_rhs(0.5, 0.5, &unbiased(0.4, 0.5));
        assert_eq!((a, b), (0.0, 0.0));
    }

    #[test]
    fn symmetric_parameters_give_half() {
        for c in [0.0, 0.3, 0.6, 0.9, 0.99] {
            let p = stable_fixed_point(&unbiased(c, 0.5)).unwrap();
            assert!((p.integration - 0.5).abs() < 1e-9, "c = {c}: {p:?}");
            assert!((p.t11 - p.t22).abs() < 1e-9);
        }
    }

    #[test]
    fn no_closure_is_linear_in_s() {
        for i in 0..=10 {
            let s = i as f64 / 10.0;
            let p = stable_fixed_point(&unbiased(0.0, s)).unwrap();
            assert!((p.integration - (1.0 - s)).abs() < 1e-9, "s = {s}: {p:?}");
        }
    }

    #[test]
    fn strong_closure_keeps_maximal_homophily_integrated() {
        let p = stable_fixed_point(&unbiased(0.9, 1.0)).unwrap();
        assert!(p.integration > 0.05, "{p:?}");
    }

    #[test]
    fn closure_pushes_toward_half() {
        let grid = [0.0, 0.3, 0.6, 0.9];
        for i in 1..10 {
            let s = i as f64 / 10.0;
            let f: Vec<f64> = grid.iter().map(|&c| stable_fixed_point(&unbiased(c, s)).unwrap().integration).collect();
            for w in f.windows(2) {
                if s > 0.5 {
                    assert!(w[1] >= w[0] - 1e-9, "s = {s}: {f:?}");
                } else if s < 0.5 {
                    assert!(w[1] <= w[0] + 1e-9, "s = {s}: {f:?}");
                }
            }
        }
    }

    #[test]
    fn unequal_groups_without_closure() {
        let params = FixedNodeParams::<f64> { c: 0.0, s: 0.7, s_prime: 0.5, n_theta: [0.7, 0.3] };
        let p = stable_fixed_point(&params).unwrap();
        let t11 = 0.7 * 0.7 / (0.7 * 0.7 + 0.3 * 0.3);
        let t22 = 0.3 * 0.7 / (0.3 * 0.7 + 0.7 * 0.3);
        assert!((p.t11 - t11).abs() < 1e-9 && (p.t22 - t22).abs() < 1e-9, "{p:?}");
    }

    #[test]
    fn segregated_corner() {
        let p = stable_fixed_point(&unbiased(0.0, 1.0)).unwrap();
        assert_eq!(p.integration, 0.0);
        assert!(p_from_t(1.0, 1.0).is_none());
    }

    #[test]
    fn f32_solver() {
        let p = stable_fixed_point(&FixedNodeParams::<f32>::unbiased(0.0, 0.8).unwrap()).unwrap();
        assert!((p.integration - 0.2).abs() < 1e-5);
    }

    proptest! {
        #[test]
        fn two_step_rows_are_stochastic(a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
            let (same, cross) = two_step(a, b);
            prop_assert!((same + cross - 1.0).abs() < 1e-12);
        }

        #[test]
        fn p_t_round_trip(a in 0.0f64..1.0, frac in 0.0f64..1.0) {
            let b = (1.0 - a) * frac;
            prop_assume!(a + b < 1.0 - 1e-6);
            let (t1, t2) = t_from_p(a, b);
            let (a2, b2) = p_from_t(t1, t2).unwrap();
            prop_assert!((a - a2).abs() < 1e-12 && (b - b2).abs() < 1e-12, "{a} {b} -> {a2} {b2}");
        }

        #[test]
        fn rhs_is_symmetric_under_group_swap(t1 in 0.0f64..=1.0, t2 in 0.0f64..=1.0, c in 0.0f64..=1.0, s in 0.0f64..=1.0) {
            let p = unbiased(c, s);
            let (a, b) = meanfield_rhs(t1, t2, &p);
            let (b2, a2) = meanfield_rhs(t2, t1, &p);
            prop_assert!((a - a2).abs() < 1e-15 && (b - b2).abs() < 1e-15);
        }
    }
}
