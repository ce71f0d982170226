//! Acceptance suite: one pass/fail line per criterion. Library checks are
//! paired with oracles computed here, independently of the solver.

mod common;

use common::{quad, rk4_first_zero};
use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::Instant;
use tovds::analysis::lane_emden_solution;
use tovds::eos::{density_integral, pressure_integral, EosSpec};
use tovds::metric::horizons;
use tovds::verify::{run_criterion, CriterionResult, CRITERIA, XI1_INDEX_TWO};
use tovds::Constants;

struct Line {
    ok: bool,
    detail: String,
}

fn oracle(id: u8) -> Line {
    let line = |ok: bool, detail: String| Line { ok, detail };
    match id {
        1 => {
            let xi = rk4_first_zero(1.0, 1e-3);
            line((xi - PI).abs() < 1e-8, format!("rk4 xi1 = {xi:.12}"))
        }
        2 => {
            let mut worst = 0.0f64;
            for lambda in [0.5, 0.75] {
                let sol = lane_emden_solution(1.0, lambda, 4.0 * PI).expect("integration");
                for i in 0..=2000 {
                    let r = sol.x_start() + (4.0 * PI - sol.x_start()) * i as f64 / 2000.0;
                    let exact = lambda + (1.0 - lambda) * r.sin() / r;
                    let err = (sol.eval(r).unwrap()[1] - exact).abs();
                    worst = if err.is_nan() { f64::NAN } else { worst.max(err) };
                }
            }
            line(worst < 1e-8, format!("sup |U - (lambda + (1-lambda) sinR/R)| = {worst:e}"))
        }
        6 => {
            // bisection on the cubic, independent of the closed-form roots
            let (m, lam) = (1.0, 0.05);
            let h = horizons(m, lam, &Constants::GEOMETRIZED).unwrap();
            let k = |r: f64| 1.0 - 2.0 * m / r - lam * r * r / 3.0;
            let bisect = |mut a: f64, mut b: f64| {
                for _ in 0..200 {
                    let c = 0.5 * (a + b);
                    if (k(a) > 0.0) == (k(c) > 0.0) {
                        a = c
                    } else {
                        b = c
                    }
                }
                0.5 * (a + b)
            };
            let peak = (1.0 / lam).cbrt() * (3.0f64 * m).cbrt();
            let (ri, re) = (bisect(1e-3, peak), bisect(peak, 100.0));
            let dev = ((h.r_i - ri) / ri).abs().max(((h.r_e - re) / re).abs());
            line(dev < 1e-12, format!("bisection horizons agree to {dev:e}"))
        }
        8 => {
            let xi = rk4_first_zero(2.0, 1e-3);
            line(
                (xi - XI1_INDEX_TWO).abs() < 1e-9,
                format!("rk4 xi1(mu=2) = {xi:.12}, reference {XI1_INDEX_TWO}"),
            )
        }
        11 => {
            let mut worst = 0.0f64;
            let (a, g) = (1.0, 1.5);
            let eos = EosSpec::polytrope(a, g, 1.0).unwrap();
            for rho in [1e-6, 1e-3, 1e-1, 1.0] {
                // ∫ dP/(ρ + P) with ρ = s² to remove the endpoint singularity
                let f = |s: f64| {
                    let r = s * s;
                    g * a * r.powf(g - 1.0) / (r + a * r.powf(g)) * 2.0 * s
                };
                let q = quad(f, 0.0, f64::sqrt(rho));
                let u = eos.u_of_density(rho).unwrap();
                worst = worst.max((u / q - 1.0).abs());
            }
            let mut fermi = 0.0f64;
            for x in [0.1, 0.49, 0.51, 1.0, 3.0, 10.0] {
                let p = quad(|q| q.powi(4) / (1.0 + q * q).sqrt(), 0.0, x);
                let d = quad(|q| q * q * (1.0 + q * q).sqrt(), 0.0, x);
                fermi = fermi.max((pressure_integral(x) / p - 1.0).abs()).max((density_integral(x) / d - 1.0).abs());
            }
            line(
                worst < 1e-8 && fermi < 1e-10,
                format!("double-exponential quadrature: u rel {worst:e}, Fermi rel {fermi:e}"),
            )
        }
        12 => {
            let bin = env!("CARGO_BIN_EXE_tovds");
            let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
            for d in &dirs {
                let status = Command::new(bin)
                    .args(["verify", "--out"])
                    .arg(d.path())
                    .stdout(std::process::Stdio::null())
                    .status()
                    .expect("run verify");
                if !status.success() {
                    return line(false, format!("verify exited with {status}"));
                }
            }
            let mut same = true;
            let mut names = Vec::new();
            for name in ["verify.json", "verify.csv"] {
                let a = std::fs::read(dirs[0].path().join(name)).unwrap();
                let b = std::fs::read(dirs[1].path().join(name)).unwrap();
                same &= a == b;
                names.push(name);
            }
            line(same, format!("two verify runs, {} byte-identical", names.join(" and ")))
        }
        _ => line(true, String::new()),
    }
}

fn describe(r: &CriterionResult) -> String {
    if let Some(e) = &r.error {
        return e.clone();
    }
    r.measurements
        .iter()
        .filter(|m| m.limit.is_some() || !m.pass)
        .map(|m| match m.limit {
            Some(l) => format!("{} = {:e} (<= {:e})", m.quantity, m.value, l),
            None => format!("{} failed", m.quantity),
        })
        .collect::<Vec<_>>()
        .join("; ")
}

fn main() -> ExitCode {
    let mut failed = 0;
    for (id, name) in CRITERIA {
        let start = Instant::now();
        let lib = run_criterion(id);
        let extra = oracle(id);
        let ok = lib.pass && extra.ok;
        if !ok {
            failed += 1;
        }
        let mut detail = describe(&lib);
        if !extra.detail.is_empty() {
            if !detail.is_empty() {
                detail += "; ";
            }
            detail += &extra.detail;
        }
        println!(
            "criterion {id:>2} {name}: {} [{:.2}s] {detail}",
            if ok { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", CRITERIA.len() - failed, CRITERIA.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
