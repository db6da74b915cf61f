//! One PASS/FAIL line per acceptance criterion; exits non-zero if any fails.
//! Every check behind a line is printed underneath it.

use hyperspec::io::Report;
use hyperspec::suites::{Suite, SuiteContext};
use std::process::ExitCode;
use std::time::Instant;

struct Criterion {
    id: u8,
    title: &'static str,
    groups: &'static [&'static str],
}

const CRITERIA: [Criterion; 9] = [
    Criterion { id: 1, title: "KL unitarity and round trip", groups: &["kl"] },
    Criterion { id: 2, title: "Bessel K_ik, Wronskian, Gamma modulus", groups: &["bessel"] },
    Criterion { id: 3, title: "Radon isometry, explicit vs spectral, support", groups: &["radon"] },
    Criterion { id: 4, title: "kernel identity", groups: &["kernel-identity"] },
    Criterion { id: 5, title: "wave propagator", groups: &["wave"] },
    Criterion { id: 6, title: "Eisenstein constant term and scattering matrix", groups: &["eisenstein"] },
    Criterion { id: 7, title: "BC forward: BSD inner products vs FD, eigenvalues", groups: &["bc-forward"] },
    Criterion { id: 8, title: "BC stage-isolated metric recovery", groups: &["stage-isolated"] },
    Criterion { id: 9, title: "BC end-to-end reconstruction and heat distances", groups: &["bsd", "end-to-end"] },
];

fn main() -> ExitCode {
    let ctx = SuiteContext::default();
    let mut all = Report::default();
    for s in [Suite::Kl, Suite::Bessel, Suite::Radon, Suite::Wave, Suite::Eisenstein, Suite::BcForward, Suite::BcInverse] {
        let t0 = Instant::now();
        match s.run(&ctx) {
            Ok(r) => all.absorb(r),
            Err(e) => all.check(hyperspec::io::Check::errored(s.name(), "suite", &e)),
        }
        eprintln!("suite {s} finished in {:.1} s", t0.elapsed().as_secs_f64());
    }
    let lcurve = all.tables.iter().any(|(f, t)| f.ends_with("lens/lcurve.csv") && !t.rows.is_empty());

    let mut ok = true;
    for c in &CRITERIA {
        let checks: Vec<_> = all.checks.iter().filter(|k| c.groups.contains(&k.group.as_str())).collect();
        let mut pass = !checks.is_empty() && checks.iter().all(|k| k.pass);
        if c.id == 9 {
            pass &= lcurve;
        }
        ok &= pass;
        println!("criterion {}: {} ({}, {} checks)", c.id, if pass { "PASS" } else { "FAIL" }, c.title, checks.len());
        for k in checks {
            println!("    {}", k.line());
        }
        if c.id == 9 {
            println!("    {} lens L-curve diagnostic emitted", if lcurve { "PASS" } else { "FAIL" });
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
