//! The ten acceptance criteria, each reduced to a verdict and a one-line detail.

use std::path::{Path, PathBuf};

use utm_cli::checks::{self, CheckContext, CheckRecord};
use utm_cli::{run, Command, RunConfig};
use utm_core::datum::{builtin_datum, ProblemId};

const FI: ProblemId = ProblemId::FiniteIntervalKdV;
const HL: ProblemId = ProblemId::HalfLineKdV;
pub const DATA: [(ProblemId, &str); 4] = [(FI, "fi_poly1"), (FI, "fi_poly2"), (HL, "hl_exp1"), (HL, "hl_exp2")];

pub struct Criterion {
    pub name: &'static str,
    pub run: fn() -> Verdict,
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub pass: bool,
    pub detail: String,
}

fn ctx(problem: ProblemId, name: &str) -> CheckContext {
    CheckContext::new(problem, builtin_datum(name).expect("built-in datum"))
}

pub fn summarise(records: &[CheckRecord]) -> Verdict {
    let pass = !records.is_empty() && records.iter().all(|r| r.pass);
    let detail = records
        .iter()
        .map(|r| {
            let mut s = format!("{}/{}={:.2e}", r.datum, r.check_id, r.magnitude);
            if let Some(m) = r.params.get("magnitudes").and_then(|m| m.as_array()) {
                let m: Vec<String> = m.iter().filter_map(|v| v.as_f64()).map(|v| format!("{v:.3}")).collect();
                s += &format!("[{}]", m.join(","));
            }
            if !r.pass {
                s.push('!');
            }
            s
        })
        .collect::<Vec<_>>()
        .join(" ");
    Verdict { pass, detail }
}

pub fn per_datum(f: impl Fn(&CheckContext) -> Vec<CheckRecord>, data: &[(ProblemId, &str)]) -> Verdict {
    summarise(&data.iter().flat_map(|&(p, d)| f(&ctx(p, d))).collect::<Vec<_>>())
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("utm-suite-{}-{tag}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("scratch dir");
    dir
}

fn flags(args: &[(&str, &str)]) -> RunConfig {
    let mut c = RunConfig::default();
    for &(k, v) in args {
        match k {
            "problem" => c.problem = Some(v.into()),
            "datum" => c.datum = Some(v.into()),
            "suite" => c.suite = Some(v.into()),
            "seed" => c.seed = v.parse().ok(),
            "radius" => c.radius = v.parse().ok(),
            "x_grid" => c.x_grid = v.parse().ok(),
            "t" => c.t = Some(v.split(',').map(|s| s.parse().unwrap()).collect()),
            _ => panic!("unhandled flag {k}"),
        }
    }
    c
}

fn criterion_7() -> Verdict {
    let dir = scratch("c7");
    let mut cfg = flags(&[("problem", "hl"), ("datum", "hl_exp1"), ("suite", "augeig")]);
    cfg.below_axis = Some(true);
    cfg.out = Some(dir.join("report.json"));
    let verdict = match run(Command::Verify, &cfg) {
        Ok(outcome) => {
            let control = outcome.checks.iter().find(|r| r.check_id == "type2_vanishing_minus");
            let magnitude = control.map_or(f64::NAN, |r| r.magnitude);
            let flagged = control.is_some_and(|r| !r.pass);
            Verdict {
                pass: outcome.exit == 1 && flagged && magnitude > 1e-3,
                detail: format!("exit={} type2_vanishing_minus={magnitude:.3e} reported_fail={flagged}", outcome.exit),
            }
        }
        Err(e) => Verdict { pass: false, detail: format!("run failed: {e:#}") },
    };
    let _ = std::fs::remove_dir_all(&dir);
    verdict
}

fn outputs_of(command: Command, cfg: &RunConfig, dir: &Path) -> Option<(i32, Vec<u8>, serde_json::Value)> {
    let mut cfg = cfg.clone();
    cfg.out = Some(dir.join("out"));
    cfg.manifest = Some(dir.join("manifest.json"));
    let exit = run(command, &cfg).ok()?.exit;
    let out = std::fs::read(dir.join("out")).ok()?;
    let mut manifest: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.join("manifest.json")).ok()?).ok()?;
    manifest.as_object_mut()?.remove("wall_time_s");
    Some((exit, out, manifest))
}

fn criterion_10() -> Verdict {
    let dir = scratch("c10");
    let runs = [
        (Command::Verify, flags(&[("problem", "fi"), ("datum", "fi_poly1"), ("suite", "identity"), ("seed", "7")])),
        (Command::Solve, flags(&[("problem", "hl"), ("datum", "hl_exp1"), ("t", "0,0.05"), ("x_grid", "5")])),
        (Command::Transform, flags(&[("problem", "fi"), ("datum", "fi_poly2"), ("radius", "20")])),
        (Command::Zeros, flags(&[("radius", "30")])),
    ];
    let mut pass = true;
    let mut notes = Vec::new();
    for (command, cfg) in &runs {
        let a = outputs_of(*command, cfg, &dir);
        let b = outputs_of(*command, cfg, &dir);
        let ok = a.is_some() && a == b && a.as_ref().is_some_and(|o| o.0 == 0 && !o.1.is_empty());
        pass &= ok;
        notes.push(format!("{command}:{}", if ok { "identical" } else { "differs" }));
    }
    let _ = std::fs::remove_dir_all(&dir);
    Verdict { pass, detail: notes.join(" ") }
}

pub fn criteria() -> Vec<Criterion> {
    vec![
        Criterion { name: "inversion", run: || per_datum(|c| vec![checks::inversion(c)], &DATA) },
        Criterion { name: "zeta identity", run: || per_datum(|c| vec![checks::identity(c)], &DATA[..2]) },
        Criterion { name: "solution validity", run: || per_datum(checks::solution, &DATA) },
        Criterion { name: "deformation invariance", run: || per_datum(|c| vec![checks::deformation(c)], &DATA) },
        Criterion {
            name: "augmented eigenfunctions",
            run: || per_datum(|c| checks::augeig(c).into_iter().filter(|r| r.check_id != "type1_probe").collect(), &DATA),
        },
        Criterion {
            name: "type-I probe",
            run: || per_datum(|c| vec![checks::type_i_probe(c)], &[(HL, "hl_exp1"), (FI, "fi_poly2")]),
        },
        Criterion { name: "below-axis negative control", run: criterion_7 },
        Criterion { name: "zeros of Delta", run: || per_datum(checks::zeros, &DATA[..1]) },
        Criterion { name: "heat baseline", run: || per_datum(checks::heat, &[(ProblemId::HalfLineHeat, "heat_exp")]) },
        Criterion { name: "determinism", run: criterion_10 },
    ]
}
