//! Closed-form cost calculators: oracle accuracy budget, query, qubit and
//! gate counts for the simulation, optimization upper and lower bounds, the
//! stochastic count and classical baselines.
//!
//! Hidden constants are set to 1. Polylog factors are kept where the source
//! formula spells them out and dropped where it hides them. Logarithms in
//! the query formulas are natural; register sizes use base 2.

use crate::diagnostics::CONVENTION_NOTE;
use crate::error::{invalid, QhdError, Result};

fn check_positive(pairs: &[(&str, f64)]) -> Result<()> {
    for (name, v) in pairs {
        if !(*v > 0.0) || !v.is_finite() {
            return Err(invalid(format!("{name} must be positive and finite, got {v}")));
        }
    }
    Ok(())
}

/// `x = Λ‖b‖₁/ε` with the requirement `x > e` so that `ln ln x > 0`.
fn log_argument(lambda: f64, b_l1: f64, eps: f64) -> Result<f64> {
    check_positive(&[("Lambda", lambda), ("b_l1", b_l1), ("eps", eps)])?;
    let x = lambda * b_l1 / eps;
    if !(x > std::f64::consts::E) {
        return Err(QhdError::Domain(format!(
            "Lambda*b_l1/eps = {x:e} must exceed e for the iterated logarithm"
        )));
    }
    Ok(x)
}

/// Admissible oracle error: `ε_f⁻¹ = (‖b‖₁/ε) ln x / ln ln x`, `x = Λ‖b‖₁/ε`.
pub fn eps_f_budget(eps: f64, lambda: f64, b_l1: f64) -> Result<f64> {
    let x = log_argument(lambda, b_l1, eps)?;
    Ok(1.0 / ((b_l1 / eps) * x.ln() / x.ln().ln()))
}

/// Binary-oracle queries `⌈Λ‖b‖₁ ln x / ln ln x⌉`.
pub fn queries_binary(lambda: f64, b_l1: f64, eps: f64) -> Result<f64> {
    let x = log_argument(lambda, b_l1, eps)?;
    Ok((lambda * b_l1 * x.ln() / x.ln().ln()).ceil())
}

/// Phase-oracle queries `⌈(Λ‖b‖₁)²/ε · ln³x / (ln ln x)²⌉`.
pub fn queries_phase(lambda: f64, b_l1: f64, eps: f64) -> Result<f64> {
    let x = log_argument(lambda, b_l1, eps)?;
    let l = x.ln();
    Ok(((lambda * b_l1).powi(2) / eps * l.powi(3) / l.ln().powi(2)).ceil())
}

/// `⌈d log₂N + log₂(dN²) + log₂(‖a‖₁/ε) + log₂(Λ‖b‖₁/ε)⌉`.
pub fn qubit_count(d: usize, n: usize, a_l1: f64, lambda: f64, b_l1: f64, eps: f64) -> Result<f64> {
    check_positive(&[("a_l1", a_l1), ("Lambda", lambda), ("b_l1", b_l1), ("eps", eps)])?;
    if d == 0 || n == 0 || !n.is_power_of_two() {
        return Err(invalid("need d >= 1 and N a power of two"));
    }
    let (df, nf) = (d as f64, n as f64);
    Ok((df * nf.log2() + (df * nf * nf).log2() + (a_l1 / eps).log2() + (lambda * b_l1 / eps).log2())
        .ceil())
}

/// Gate count: the phase-query factor times
/// `[d log₂N log₂(dN²) + d log₂N log₂((‖a‖₁ + Λ‖b‖₁/(dN²))/ε) + log₂³(Λ‖b‖₁/ε)]`.
pub fn gate_count(d: usize, n: usize, a_l1: f64, lambda: f64, b_l1: f64, eps: f64) -> Result<f64> {
    check_positive(&[("a_l1", a_l1)])?;
    if d == 0 || n == 0 || !n.is_power_of_two() {
        return Err(invalid("need d >= 1 and N a power of two"));
    }
    let x = log_argument(lambda, b_l1, eps)?;
    let l = x.ln();
    let q = (lambda * b_l1).powi(2) / eps * l.powi(3) / l.ln().powi(2);
    let (df, nf) = (d as f64, n as f64);
    let dn2 = df * nf * nf;
    let bracket = df * nf.log2() * dn2.log2()
        + df * nf.log2() * ((a_l1 + lambda * b_l1 / dn2) / eps).log2().max(0.0)
        + x.log2().powi(3);
    Ok((q * bracket).ceil())
}

/// Query count and admissible evaluation noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueryBound {
    pub queries: f64,
    pub noise: f64,
}

/// QHD optimization: `d^{1.5}(GR/ε)²` queries at noise `ε³/(d^{1.5}G²R²)`.
pub fn qhd_query_upper(d: usize, g: f64, r: f64, eps: f64) -> Result<QueryBound> {
    check_positive(&[("G", g), ("R", r), ("eps", eps)])?;
    if d == 0 {
        return Err(invalid("d must be at least 1"));
    }
    let d15 = (d as f64).powf(1.5);
    Ok(QueryBound {
        queries: d15 * (g * r / eps).powi(2),
        noise: eps.powi(3) / (d15 * g * g * r * r),
    })
}

/// Lower bounds: `√d G R Λ_f / ε²` and the hypercube form `d G R / ε²`
/// (which is the first with `Λ_f = √d`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBound {
    pub general: f64,
    pub hypercube: f64,
}

pub fn qhd_query_lower(d: usize, g: f64, r: f64, eps: f64, lambda_f: f64) -> Result<LowerBound> {
    check_positive(&[("G", g), ("R", r), ("eps", eps), ("Lambda_f", lambda_f)])?;
    if d == 0 {
        return Err(invalid("d must be at least 1"));
    }
    let df = d as f64;
    Ok(LowerBound {
        general: df.sqrt() * g * r * lambda_f / (eps * eps),
        hypercube: df * g * r / (eps * eps),
    })
}

/// Stochastic-oracle queries `d³(GR/ε)⁵`.
pub fn stochastic_queries(d: usize, g: f64, r: f64, eps: f64) -> Result<f64> {
    check_positive(&[("G", g), ("R", r), ("eps", eps)])?;
    if d == 0 {
        return Err(invalid("d must be at least 1"));
    }
    Ok((d as f64).powi(3) * (g * r / eps).powi(5))
}

/// Classical and annealing baselines for noisy zeroth-order convex
/// optimization.
pub const BASELINES: [&str; 4] = ["belloni", "risteski_li", "li_zhang", "subgradient"];

/// Human-readable method name of a baseline row.
pub fn baseline_label(name: &str) -> &'static str {
    match name {
        "belloni" => "Simulated annealing",
        "risteski_li" => "Stochastic gradient estimator",
        "li_zhang" => "Quantum simulated annealing",
        "subgradient" => "Quantum subgradient method",
        _ => "unknown",
    }
}

pub fn baseline_queries(name: &str, d: usize, g: f64, r: f64, eps: f64) -> Result<QueryBound> {
    check_positive(&[("G", g), ("R", r), ("eps", eps)])?;
    if d == 0 {
        return Err(invalid("d must be at least 1"));
    }
    let df = d as f64;
    let gr = g * r;
    Ok(match name {
        "belloni" => QueryBound {
            queries: df.powf(4.5),
            noise: eps / df,
        },
        "risteski_li" => QueryBound {
            queries: df.powi(4) * (gr / eps).powi(6),
            noise: (eps * eps / (df.sqrt() * gr)).max(eps / df),
        },
        "li_zhang" => QueryBound {
            queries: df.powi(3),
            noise: eps / df,
        },
        "subgradient" => QueryBound {
            queries: (gr / eps).powi(2),
            noise: eps.powi(5) / (df.powf(4.5) * gr.powi(4)),
        },
        other => return Err(QhdError::UnknownName(format!("baseline '{other}'"))),
    })
}

/// Bundle of the simulation costs for one parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceEstimate {
    pub queries_binary: f64,
    pub queries_phase: f64,
    pub qubits: f64,
    pub gates: f64,
    pub eps_f: f64,
    pub convention_note: &'static str,
}

pub fn estimate(
    d: usize,
    n: usize,
    a_l1: f64,
    lambda: f64,
    b_l1: f64,
    eps: f64,
) -> Result<ResourceEstimate> {
    Ok(ResourceEstimate {
        queries_binary: queries_binary(lambda, b_l1, eps)?,
        queries_phase: queries_phase(lambda, b_l1, eps)?,
        qubits: qubit_count(d, n, a_l1, lambda, b_l1, eps)?,
        gates: gate_count(d, n, a_l1, lambda, b_l1, eps)?,
        eps_f: eps_f_budget(eps, lambda, b_l1)?,
        convention_note: CONVENTION_NOTE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn budget_examples() {
        let e = eps_f_budget(1e-3, 10.0, 100.0).unwrap();
        let l = 1e6f64.ln();
        assert_relative_eq!(e, 1e-5 / (l / l.ln()), max_relative = 1e-14);
        assert!((e - 1.9007e-6).abs() < 1e-9);
        assert!(eps_f_budget(2e-3, 10.0, 100.0).unwrap() > 2.0 * e);
        let x = std::f64::consts::E.powi(2);
        assert_relative_eq!(eps_f_budget(1.0, x, 1.0).unwrap(), 2f64.ln() / 2.0, max_relative = 1e-12);
        assert!(eps_f_budget(1.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn query_examples() {
        assert_eq!(queries_binary(10.0, 100.0, 1e-3).unwrap(), 5262.0);
        let one = queries_binary(10.0, 100.0, 1e-3).unwrap();
        let two = queries_binary(20.0, 100.0, 1e-3).unwrap();
        assert!(two > 2.0 * one - 1.0 && two < 2.2 * one);
        let ph = queries_phase(10.0, 100.0, 1e-3).unwrap();
        let l = 1e6f64.ln();
        assert_relative_eq!(ph / one, 1e6 * l * l / l.ln(), max_relative = 1e-3);
    }

    #[test]
    fn qubit_examples() {
        // log₂(d N²) = 2 for d = 1, N = 2.
        assert_eq!(qubit_count(1, 2, 1.0, 1.0, 1.0, 1.0).unwrap(), 3.0);
        assert_eq!(qubit_count(2, 16, 1.0, 1.0, 1.0, 1.0).unwrap(), 8.0 + 9.0);
        assert!(qubit_count(2, 16, 1.0, 1.0, 1.0, 0.01).unwrap() > 17.0);
    }

    #[test]
    fn optimization_bounds() {
        assert_relative_eq!(qhd_query_upper(4, 1.0, 1.0, 0.1).unwrap().queries, 800.0, max_relative = 1e-12);
        assert_relative_eq!(qhd_query_upper(1, 1.0, 1.0, 0.1).unwrap().noise, 1e-3, max_relative = 1e-12);
        let lo = qhd_query_lower(4, 1.0, 1.0, 0.1, 2.0).unwrap();
        assert_relative_eq!(lo.general, 400.0, max_relative = 1e-12);
        assert_relative_eq!(lo.hypercube, 400.0, max_relative = 1e-12);
        assert_relative_eq!(stochastic_queries(2, 1.0, 1.0, 0.5).unwrap(), 256.0);
    }

    #[test]
    fn baseline_examples() {
        assert_eq!(baseline_queries("risteski_li", 2, 1.0, 1.0, 0.5).unwrap().queries, 1024.0);
        assert_relative_eq!(baseline_queries("li_zhang", 10, 1.0, 1.0, 0.1).unwrap().noise, 0.01);
        let a = baseline_queries("subgradient", 2, 1.0, 1.0, 0.1).unwrap().queries;
        let b = baseline_queries("subgradient", 200, 1.0, 1.0, 0.1).unwrap().queries;
        assert_eq!(a, b);
        assert!(baseline_queries("nesterov", 2, 1.0, 1.0, 0.1).is_err());
    }
}
