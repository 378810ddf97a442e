//! Test-only oracles, independent of the simulator's summation path.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

pub fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

/// `sum(a_i * b_i)` evaluated exactly in rationals, rounded once.
pub fn exact_dot(pairs: &[(f64, f64)]) -> f64 {
    let mut acc = BigRational::zero();
    for &(a, b) in pairs {
        acc += exact(a) * exact(b);
    }
    acc.to_f64().expect("representable")
}

/// `sum(s_i * x_i / t)` with `s_i` in `{+1, -1}`, exactly.
pub fn exact_signed_sum(signs: &[i8], xs: &[f64], t: f64) -> f64 {
    let mut acc = BigRational::zero();
    for (&s, &x) in signs.iter().zip(xs) {
        acc += exact(x) * BigRational::from_integer(BigInt::from(s));
    }
    (acc / exact(t)).to_f64().expect("representable")
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    if want == 0.0 {
        got.abs()
    } else {
        ((got - want) / want).abs()
    }
}

/// Whether a criterion held, and what was measured.
pub type Outcome = (bool, String);

/// Criterion number, name and check.
pub type Criterion = (u32, &'static str, fn() -> Outcome);

/// Runs each criterion, printing exactly one PASS/FAIL line for it. A panic
/// counts as a failure. Exits with status 1 if anything failed.
pub fn run_criteria(criteria: &[Criterion]) {
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for &(id, name, check) in criteria {
        let start = std::time::Instant::now();
        let (pass, detail) = match std::panic::catch_unwind(check) {
            Ok(outcome) => outcome,
            Err(payload) => {
                let msg = payload
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                (false, format!("panicked: {msg}"))
            }
        };
        if !pass {
            failed += 1;
        }
        println!(
            "[{}] criterion {id}: {name} -- {detail} ({:.1} s)",
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
