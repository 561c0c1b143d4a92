//! Acceptance criteria 1-10, one PASS/FAIL line each, plus a monotonicity check on ansatz currents.
//!
//! Failures are reported without failing the test binary so that the full report
//! is always printed; set `ACCEPTANCE_STRICT=1` to exit nonzero on any failure.
//! `ACCEPTANCE_ONLY=3,6` runs a subset; 11 selects the supplementary check.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::sync::OnceLock;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tiltdiode::ansatz::{ansatz_current, solve_ansatz_big, AnsatzOptions, AnsatzParams};
use tiltdiode::lindblad::{
    eigenbasis_decomposition, ness, observables, rectification, sector_eigenbases, NessMethod,
};
use tiltdiode::mesoleads::{lead_rectification, ExtendedModel, LeadSpec};
use tiltdiode::model::perturbative::n4_domain_crossing;
use tiltdiode::model::{cp_sectors, find_avoided_crossings, sweep_spectrum};
use tiltdiode::noninteracting::{analytic_reference, solve_chain, solve_with_digits, QuadraticChain, Regime};
use tiltdiode::{ModelParams, Scalar};
use tiltdiode_cli::analysis::{find_resonances, fit_exponential, local_maxima, Resonance, DEFAULT_PROMINENCE};
use tiltdiode_cli::config::Grid;

type Check = Result<(bool, String), Box<dyn std::error::Error>>;

const DIODE_INTERACTION: f64 = 5.0;
const SEED: u64 = 20_241_017;

fn diode(tilt: f64) -> ModelParams {
    ModelParams::new(4).with_interaction(DIODE_INTERACTION).with_tilt(tilt)
}

fn grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    Grid::Range { start, stop, step }.points().expect("valid grid")
}

fn near(x: f64, targets: &[f64], tol: f64) -> bool {
    targets.iter().any(|t| (x - t).abs() <= tol)
}

fn fmt_list(xs: impl IntoIterator<Item = f64>) -> String {
    let v: Vec<String> = xs.into_iter().map(|x| format!("{x:.3}")).collect();
    format!("[{}]", v.join(", "))
}

/// The N = 4, Δ = 5 diode sampled on the criterion-3 grid.
struct DiodeSweep {
    tilts: Vec<f64>,
    forward: Vec<f64>,
    reverse: Vec<f64>,
    ratio: Vec<f64>,
    impurity: Vec<f64>,
    osee: Vec<f64>,
    resonances: Vec<Resonance>,
}

impl DiodeSweep {
    fn compute() -> Result<Self, tiltdiode::Error> {
        let tilts = grid(0.01, 16.0, 0.05);
        let mut s = DiodeSweep {
            tilts: tilts.clone(),
            forward: vec![],
            reverse: vec![],
            ratio: vec![],
            impurity: vec![],
            osee: vec![],
            resonances: vec![],
        };
        for &e in &tilts {
            let p = diode(e);
            let fw = observables(&ness(&p, NessMethod::Auto)?, &p)?;
            let rp = p.with_driving(-1.0);
            let rv = observables(&ness(&rp, NessMethod::Auto)?, &rp)?;
            s.ratio.push(-fw.current / rv.current);
            s.forward.push(fw.current);
            s.reverse.push(rv.current);
            s.impurity.push(fw.impurity);
            s.osee.push(fw.osee);
        }
        s.resonances = find_resonances(&s.tilts, &s.forward, DEFAULT_PROMINENCE);
        Ok(s)
    }

    fn max_ratio(&self) -> (f64, f64) {
        self.tilts
            .iter()
            .zip(&self.ratio)
            .fold((f64::NAN, f64::NEG_INFINITY), |acc, (&e, &r)| if r > acc.1 { (e, r) } else { acc })
    }

    fn resonance_tilts(&self) -> Vec<f64> {
        self.resonances.iter().map(|r| r.x).collect()
    }
}

fn diode_sweep() -> Result<&'static DiodeSweep, Box<dyn std::error::Error>> {
    static CELL: OnceLock<Result<DiodeSweep, String>> = OnceLock::new();
    CELL.get_or_init(|| DiodeSweep::compute().map_err(|e| e.to_string()))
        .as_ref()
        .map_err(|e| e.clone().into())
}

fn ballistic() -> Check {
    let target = 2.0 / 17.0;
    let p = ModelParams::new(4);
    let lindblad = observables(&ness(&p, NessMethod::Auto)?, &p)?.current;
    let mut worst = (lindblad - target).abs();
    let mut detail = format!("lindblad N=4 dev {:.1e}", worst);
    let mut free_worst = 0.0f64;
    for n in [2, 3, 4, 10, 50, 100, 200] {
        let j = solve_chain(&QuadraticChain::new(n, 0.0, 1.0, 1.0))?.current();
        free_worst = free_worst.max((j - target).abs());
    }
    worst = worst.max(free_worst);
    detail += &format!(", noninteracting N<=200 dev {free_worst:.1e}");
    Ok((worst <= 1e-10, detail))
}

fn closed_forms() -> Check {
    let current = |n: usize, e: f64| -> Result<f64, tiltdiode::Error> {
        Ok(solve_with_digits(&QuadraticChain::new(n, e, 1.0, 1.0), 32)?.current())
    };
    let j4 = current(4, 20.0)?;
    let large = analytic_reference(4, Regime::LargeTilt, 20.0, 1.0, 1.0)?.current;
    let large_dev = (j4 / large - 1.0).abs();
    let ratio = current(5, 20.0)? / j4;
    let ratio_dev = (ratio / 0.25 - 1.0).abs();
    let small = analytic_reference(4, Regime::SmallTilt, 0.1, 1.0, 1.0)?.current;
    let small_dev = (current(4, 0.1)? - small).abs();
    let pass = large_dev <= 0.02 && ratio_dev <= 0.02 && small_dev <= 1e-6;
    Ok((
        pass,
        format!(
            "E^-4/8 rel dev {large_dev:.2e}; J5/J4 = {ratio:.5} (rel dev {ratio_dev:.2e}); small-E abs dev {small_dev:.2e} (tol 1e-6)"
        ),
    ))
}

fn resonance_structure() -> Check {
    let s = diode_sweep()?;
    let found = s.resonance_tilts();
    let targets = [(2.15, 0.1), (3.67, 0.1), (9.65, 0.2)];
    let positions_ok = found.len() == 3 && found.iter().zip(targets).all(|(x, (t, tol))| (x - t).abs() <= tol);
    let first_rise = s.reverse.windows(2).position(|w| !(w[1].abs() < w[0].abs()));
    let (e_max, r_max) = s.max_ratio();
    let pass = positions_ok && first_rise.is_none() && r_max >= 1e3;
    let monotone = match first_rise {
        None => "strictly decreasing".to_string(),
        Some(i) => format!("rises at E = {:.2}", s.tilts[i + 1]),
    };
    Ok((pass, format!("resonances {}; |J_R| {monotone}; max R = {r_max:.1} at E = {e_max:.2}", fmt_list(found))))
}

fn spectrum_alignment() -> Check {
    let s = diode_sweep()?;
    let resonances = s.resonance_tilts();
    let template = diode(0.0);
    let mut crossings = BTreeSet::new();
    let mut misaligned = Vec::new();
    for sector in cp_sectors(&template)? {
        if sector.dim() < 2 {
            continue;
        }
        let sweep = sweep_spectrum(&template, &sector, &s.tilts)?;
        for c in find_avoided_crossings(&sweep)? {
            let label = format!("{}:{:.3}", sector.label, c.tilt);
            if !near(c.tilt, &resonances, 0.15) {
                misaligned.push(label.clone());
            }
            crossings.insert(label);
        }
    }
    let domain = n4_domain_crossing(&template, 0.5, 6.0, 550)?;
    let domain_ok = domain.is_some_and(|x| (x - 2.08).abs() <= 0.05);
    let pass = misaligned.is_empty() && domain_ok;
    Ok((
        pass,
        format!(
            "crossings {:?}; not within 0.15 of a resonance {:?}; domain crossing {}",
            crossings,
            misaligned,
            domain.map_or("none".into(), |x| format!("{x:.4}"))
        ),
    ))
}

fn reassembly() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let p = ModelParams::new(4).with_interaction(rng.random_range(0.0..8.0)).with_tilt(rng.random_range(0.01..16.0));
        let rho = ness(&p, NessMethod::Auto)?;
        let direct = observables(&rho, &p)?.current;
        let bases = sector_eigenbases(&p)?;
        for bond in 1..4 {
            let dec = eigenbasis_decomposition(&rho, &bases, &p, bond)?;
            worst = worst.max((dec.reassembled_current() - direct).abs());
        }
    }
    Ok((worst <= 1e-9, format!("worst deviation over 20 points and all bonds {worst:.2e}")))
}

fn complexity() -> Check {
    let s = diode_sweep()?;
    let maxima = |y: &[f64]| -> Vec<f64> { local_maxima(y).into_iter().map(|i| s.tilts[i]).collect() };
    let (imp, osee) = (maxima(&s.impurity), maxima(&s.osee));
    let missing: Vec<String> = s
        .resonances
        .iter()
        .flat_map(|r| {
            let mut m = vec![];
            if !near(r.x, &imp, 0.3) {
                m.push(format!("impurity@{:.2}", r.x));
            }
            if !near(r.x, &osee, 0.3) {
                m.push(format!("osee@{:.2}", r.x));
            }
            m
        })
        .collect();
    let pass = !s.resonances.is_empty() && missing.is_empty();
    Ok((
        pass,
        format!("impurity maxima {}; OSEE maxima {}; unmatched {:?}", fmt_list(imp), fmt_list(osee), missing),
    ))
}

fn ansatz_fidelity() -> Check {
    let mut worst = 0.0f64;
    let mut worst_at = f64::NAN;
    for e in grid(1.0, 10.0, 0.5) {
        let p = ModelParams::new(8).with_interaction(DIODE_INTERACTION).with_tilt(e).with_driving(-1.0);
        let exact = observables(&ness(&p, NessMethod::Auto)?, &p)?.current;
        let approx = Scalar::to_f64(&ansatz_current(&AnsatzParams::new(8, DIODE_INTERACTION, e))?);
        let dev = (approx / exact).log10().abs();
        if !(dev <= worst) {
            worst = dev;
            worst_at = e;
        }
    }
    let mut pop_dev = 0.0f64;
    for e in [1.0, 2.0, 3.0] {
        let a = solve_ansatz_big(&AnsatzParams::new(10, 0.0, e), &AnsatzOptions::default())?;
        let exact = solve_chain(&QuadraticChain::new(10, e, 1.0, -1.0))?.populations();
        for (x, y) in a.populations.iter().zip(&exact) {
            pop_dev = pop_dev.max((Scalar::to_f64(x) - y).abs());
        }
    }
    let pass = worst <= 0.3 && pop_dev <= 0.01;
    Ok((
        pass,
        format!("N=8 max |log10 ratio| {worst:.3} at E = {worst_at:.1}; N=10 population dev {pop_dev:.2e}"),
    ))
}

fn insulator_scaling() -> Check {
    let current = |n: usize, v: f64| -> Result<f64, tiltdiode::Error> {
        Ok(solve_with_digits(&QuadraticChain::new(n, v / n as f64, 1.0, 1.0), 32)?.current())
    };
    let by_n = [50usize, 75, 100, 150, 200]
        .iter()
        .map(|&n| Ok((n as f64, current(n, 6.0)?)))
        .collect::<Result<Vec<_>, tiltdiode::Error>>()?;
    let by_v = grid(4.5, 6.0, 0.25)
        .into_iter()
        .map(|v| Ok((v, current(100, v)?)))
        .collect::<Result<Vec<_>, tiltdiode::Error>>()?;
    let c = -fit_exponential(&by_n)?.slope;
    let d = -fit_exponential(&by_v)?.slope;
    let pass = (c - 0.231).abs() <= 0.01 && (d - 12.42).abs() <= 0.5;
    Ok((pass, format!("c = {c:.4} (target 0.231 ± 0.01); d = {d:.3} (target 12.42 ± 0.5)")))
}

fn symmetries() -> Check {
    let base = diode(2.3);
    let reference = observables(&ness(&base, NessMethod::Auto)?, &base)?.current;
    let mut mu_dev = 0.0f64;
    for mu in [-40.0, -7.5, 0.0, 3.0, 25.0] {
        let p = base.with_chem_potential(mu);
        mu_dev = mu_dev.max((observables(&ness(&p, NessMethod::Auto)?, &p)?.current - reference).abs());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut r_dev = 0.0f64;
    for _ in 0..3 {
        let p = ModelParams::new(rng.random_range(3..=6)).with_tilt(rng.random_range(0.1..10.0));
        r_dev = r_dev.max((rectification(&p, NessMethod::Auto)?.ratio - 1.0).abs());
    }
    let mut dual_dev = 0.0f64;
    for e in [1.3, 2.15, 7.0] {
        let fw = diode(e);
        let rv = diode(-e).with_driving(-1.0);
        let jf = observables(&ness(&fw, NessMethod::Auto)?, &fw)?.current;
        let jr = observables(&ness(&rv, NessMethod::Auto)?, &rv)?.current;
        dual_dev = dual_dev.max((jf.abs() - jr.abs()).abs());
    }
    let pass = mu_dev <= 1e-9 && r_dev <= 1e-9 && dual_dev <= 1e-9;
    Ok((pass, format!("mu shift dev {mu_dev:.1e}; |R-1| at Δ=0 {r_dev:.1e}; duality dev {dual_dev:.1e}")))
}

fn mesoleads() -> Check {
    let s = diode_sweep()?;
    let leads = LeadSpec::symmetric(&[-0.5, 0.5], 10.0, 100.0);
    let model = ExtendedModel::new(diode(0.0), leads)?;
    let tilts = grid(0.01, 16.0, 0.25);
    let mut forward = Vec::with_capacity(tilts.len());
    let mut r_max = f64::NEG_INFINITY;
    let mut e_max = f64::NAN;
    for &e in &tilts {
        let r = lead_rectification(&model.with_tilt(e), NessMethod::Auto)?;
        forward.push(r.forward);
        if r.ratio > r_max {
            (r_max, e_max) = (r.ratio, e);
        }
    }
    let found: Vec<f64> = find_resonances(&tilts, &forward, DEFAULT_PROMINENCE).iter().map(|r| r.x).collect();
    let reference = s.resonance_tilts();
    let matched = reference.iter().all(|&x| near(x, &found, 0.3)) && found.iter().all(|&x| near(x, &reference, 0.3));
    let (_, lindblad_max) = s.max_ratio();
    let pass = !found.is_empty() && matched && r_max > lindblad_max;
    Ok((
        pass,
        format!(
            "resonances {} vs {}; peak R = {r_max:.1} at E = {e_max:.2} vs {lindblad_max:.1}",
            fmt_list(found),
            fmt_list(reference.iter().copied())
        ),
    ))
}

/// Extended-precision reverse currents must fall with both N and E.
fn ansatz_monotone() -> Check {
    let tilts = grid(1.0, 10.0, 1.0);
    let sizes: Vec<usize> = (4..=16).step_by(2).collect();
    let mut table = Vec::new();
    for &n in &sizes {
        let row = tilts
            .iter()
            .map(|&e| Ok(Scalar::to_f64(&ansatz_current(&AnsatzParams::new(n, 2.0, e))?).abs()))
            .collect::<Result<Vec<f64>, tiltdiode::Error>>()?;
        table.push(row);
    }
    let mut violations = Vec::new();
    for (i, row) in table.iter().enumerate() {
        for k in 0..tilts.len() {
            if k + 1 < tilts.len() && !(row[k + 1] < row[k]) {
                violations.push(format!("N={} E={}", sizes[i], tilts[k + 1]));
            }
            if i + 1 < sizes.len() && !(table[i + 1][k] < row[k]) {
                violations.push(format!("N={} E={}", sizes[i + 1], tilts[k]));
            }
        }
    }
    let smallest = table.last().and_then(|r| r.last()).copied().unwrap_or(f64::NAN);
    Ok((
        violations.is_empty(),
        format!("Δ=2, even N=4..16, E=1..10: violations {violations:?}; smallest |J_R| = {smallest:.3e}"),
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("ballistic baseline", ballistic),
        ("closed-form noninteracting checks", closed_forms),
        ("resonance structure", resonance_structure),
        ("spectrum-transport alignment", spectrum_alignment),
        ("eigenbasis reassembly", reassembly),
        ("complexity diagnostics", complexity),
        ("ansatz fidelity", ansatz_fidelity),
        ("insulator scaling", insulator_scaling),
        ("symmetry properties", symmetries),
        ("mesoscopic leads", mesoleads),
    ];
    let only: Option<BTreeSet<usize>> =
        std::env::var("ACCEPTANCE_ONLY").ok().map(|v| v.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let k = i + 1;
        if only.as_ref().is_some_and(|o| !o.contains(&k)) {
            continue;
        }
        let start = Instant::now();
        let (pass, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
        failed += usize::from(!pass);
        println!(
            "criterion {k:>2} {}: {name}: {detail} [{:.1} s]",
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    if only.as_ref().map_or(true, |o| o.contains(&11)) {
        let start = Instant::now();
        let (pass, detail) = ansatz_monotone().unwrap_or_else(|e| (false, format!("error: {e}")));
        failed += usize::from(!pass);
        println!(
            "supplement   {}: ansatz reverse currents monotone: {detail} [{:.1} s]",
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    if strict && failed > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
