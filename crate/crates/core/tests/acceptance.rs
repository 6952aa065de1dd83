//! One pass/fail line per acceptance criterion.

use std::time::Instant;

use ncrat_core::selftest::{run_criterion, TITLES};

fn main() {
    let mut failed = 0;
    for id in 1..=TITLES.len() {
        let start = Instant::now();
        let r = run_criterion(id, 0);
        let status = if r.passed { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {status} {} ({:.1}s): {}", r.id, r.title, start.elapsed().as_secs_f64(), r.detail);
        failed += usize::from(!r.passed);
    }
    println!("{} of {} criteria passed", TITLES.len() - failed, TITLES.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
