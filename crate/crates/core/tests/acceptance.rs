use std::time::Instant;

use jrlocal::cli::verify::criterion;

fn main() {
    let start = Instant::now();
    let mut failed = 0;
    for id in 1..=9 {
        let c = criterion(id, 1);
        let verdict = if c.pass { "PASS" } else { "FAIL" };
        println!("criterion {id}: {verdict} ({:.2}s) {}: {}", c.millis as f64 / 1000.0, c.name, c.detail);
        if !c.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} of 9 passed in {:.2}s", 9 - failed, start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
