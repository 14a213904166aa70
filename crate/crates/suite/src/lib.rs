//! A tiny runner: each criterion is a closure with a time budget, reported on one line.

use std::time::{Duration, Instant};

pub struct Outcome {
    pub id: &'static str,
    pub pass: bool,
}

/// Runs `check`, prints `ID PASS|FAIL (secs / budget) title: detail`.
pub fn criterion(id: &'static str, title: &str, budget: Duration, check: impl FnOnce() -> Result<String, String>) -> Outcome {
    let t = Instant::now();
    let res = std::panic::catch_unwind(std::panic::AssertUnwindSafe(check))
        .unwrap_or_else(|p| Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into())));
    let el = t.elapsed();
    let (pass, detail) = match res {
        Ok(d) if el <= budget => (true, d),
        Ok(d) => (false, format!("over budget: {d}")),
        Err(e) => (false, e),
    };
    println!(
        "{id} {} ({:.1}s / {}s) {title}: {detail}",
        if pass { "PASS" } else { "FAIL" },
        el.as_secs_f64(),
        budget.as_secs()
    );
    Outcome { id, pass }
}

/// Prints the summary and exits nonzero if anything failed.
pub fn finish(outcomes: &[Outcome]) {
    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    println!("{} of {} criteria pass", outcomes.len() - failed.len(), outcomes.len());
    if !failed.is_empty() {
        println!("failed: {}", failed.join(", "));
        std::process::exit(1);
    }
}

/// `Err(msg)` unless `cond`.
pub fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}
