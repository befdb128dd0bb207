use std::time::Instant;

use utm_core::datum::ProblemId;
use utm_suite::{criteria, per_datum};

fn main() {
    let start = Instant::now();
    let all = criteria();
    let mut failed = 0;
    for (k, c) in all.iter().enumerate() {
        let t0 = Instant::now();
        let v = (c.run)();
        failed += usize::from(!v.pass);
        println!(
            "criterion {} {}: {} ({:.1}s) {}",
            k + 1,
            c.name,
            if v.pass { "PASS" } else { "FAIL" },
            t0.elapsed().as_secs_f64(),
            v.detail
        );
    }
    // same probe on a datum with f'(0) = f''(0) = 0; informational only
    let d = per_datum(|c| vec![utm_cli::checks::type_i_probe(c)], &[(ProblemId::FiniteIntervalKdV, "fi_poly3")]);
    println!("diagnostic type-I probe: {}", d.detail);
    println!("{} of {} criteria passed in {:.1}s", all.len() - failed, all.len(), start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
