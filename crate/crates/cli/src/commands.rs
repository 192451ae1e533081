use std::path::Path;

use anyhow::{bail, Context, Result};
use fdl_core::ct::{build_p, verify_ct_bound, CtBlockSpec, ResolvedN};
use fdl_core::dyadic::{blown_up_family, covering_check, dyadic_intervals, ikbeta_family, interval_family_ijj, point_with_exponent};
use fdl_core::fejer::{check_fejer_localization, random_admissible_theta, BoundForm};
use fdl_core::io::{fmt17, read_poly_json, write_poly_json};
use fdl_core::lp::{build_saturating_lp, jump_sweep};
use fdl_core::spectrum::{divergence_profile, empirical_spectrum, BinSpec, Mode, SpectrumTable};
use fdl_core::TrigPoly;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::plot::plot_spectrum;
use crate::{
    BuildCtArgs, BuildLpArgs, Check, Command, CtBoundArgs, Family, FejerArgs, GeomArgs, LpJumpsArgs, ModeArg, PlotArgs,
    ProfileArgs, Run, SpectrumArgs, Status,
};

pub fn dispatch(cmd: &Command, run: &mut Run) -> Result<Status> {
    match cmd {
        Command::BuildLp(a) => build_lp(a, run),
        Command::BuildCt(a) => build_ct(a, run),
        Command::Verify(v) => match &v.check {
            Check::Fejer(a) => verify_fejer(a, run),
            Check::LpJumps(a) => verify_lp_jumps(a, run),
            Check::CtBound(a) => verify_ct(a, run),
        },
        Command::Profile(a) => profile(a, run),
        Command::Spectrum(a) => spectrum(a, run),
        Command::Geom(a) => geom(a, run),
        Command::Plot(a) => plot(a, run),
    }
}

fn status(all_hold: bool) -> Status {
    if all_hold {
        Status::Ok
    } else {
        Status::BoundFailed
    }
}

fn build_lp(a: &BuildLpArgs, run: &mut Run) -> Result<Status> {
    let g = build_saturating_lp(a.p, a.jmax)?;
    let path = run.resolve(&a.out);
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    write_poly_json(&g, &path).with_context(|| format!("writing {}", path.display()))?;
    run.outputs.push(path.clone());
    println!("{}: degree {}, {} coefficients -> {}", g.label(), g.degree(), g.width(), path.display());
    Ok(Status::Ok)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Margin {
    pub k_tried: Vec<u64>,
    pub min_ratio: f64,
    pub target: f64,
    pub flag: bool,
}

/// Contents of `build-ct` output.
#[derive(Debug, Serialize, Deserialize)]
pub struct BlockDoc {
    pub spec: CtBlockSpec,
    pub resolved: ResolvedN,
    pub margin: Margin,
    pub p: TrigPoly,
}

fn build_ct(a: &BuildCtArgs, run: &mut Run) -> Result<Status> {
    if a.k_min < 2 || a.k_max < a.k_min {
        bail!("need 2 <= --k-min <= --k-max");
    }
    let mut k = a.k_min.next_power_of_two();
    let mut tried = Vec::new();
    let (block, report) = loop {
        let b = build_p(k, a.beta, a.delta)?;
        let r = verify_ct_bound(&b.spec, &b.p, a.per_arc)?;
        tried.push(k);
        eprintln!("k = {k}: n = {}, min ratio {:.4} vs target {:.4}", b.spec.n, r.min_ratio, r.target);
        if r.flag || k * 2 > a.k_max {
            break (b, r);
        }
        k *= 2;
    };
    let doc = BlockDoc {
        spec: block.spec,
        resolved: block.resolved,
        margin: Margin { k_tried: tried, min_ratio: report.min_ratio, target: report.target, flag: report.flag },
        p: block.p,
    };
    let path = run.write(&a.out, &(serde_json::to_string(&doc)? + "\n"))?;
    println!(
        "block k = {}, n = {}, flag {} -> {}",
        doc.spec.k,
        doc.spec.n,
        doc.margin.flag,
        path.display()
    );
    Ok(status(doc.margin.flag))
}

fn verify_fejer(a: &FejerArgs, run: &mut Run) -> Result<Status> {
    let form = if a.delta == 1.0 {
        BoundForm::Eq1
    } else if a.delta == 2.0 {
        BoundForm::Eq2
    } else {
        bail!("--delta must be 1 (EQ1) or 2 (EQ2), got {}", a.delta);
    };
    let m = (4 * a.n as usize).max(1024).next_power_of_two();
    let mut rng = ChaCha8Rng::seed_from_u64(run.seed);
    let mut csv = String::from("trial,x,n,delta,form,u_n,lhs,rhs,holds\n");
    let mut all = true;
    for trial in 0..a.trials {
        let x = trial as f64 / a.trials as f64;
        let theta = random_admissible_theta(&mut rng, a.n, x, m)?;
        let r = check_fejer_localization(&theta, a.n, x, form)?;
        all &= r.holds;
        csv.push_str(&format!(
            "{trial},{},{},{},{},{},{},{},{}\n",
            fmt17(x),
            r.n,
            fmt17(r.delta),
            r.form,
            fmt17(r.u_n),
            fmt17(r.lhs),
            fmt17(r.rhs),
            r.holds
        ));
    }
    let path = run.write(&a.out, &csv)?;
    println!("{form} at n = {}: {} trials, all hold: {all} -> {}", a.n, a.trials, path.display());
    Ok(status(all))
}

fn verify_lp_jumps(a: &LpJumpsArgs, run: &mut Run) -> Result<Status> {
    let rows = jump_sweep(a.j, a.p, a.samples_per_arc)?;
    let mut csv = String::from("J,j,x,n1,n2,gap,bound,holds\n");
    for r in &rows {
        let w = &r.witness;
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.big_j,
            r.j,
            fmt17(w.x),
            w.n1,
            w.n2,
            fmt17(w.gap),
            fmt17(w.bound),
            w.holds
        ));
    }
    let failed = rows.iter().filter(|r| !r.witness.holds).count();
    let path = run.write(&a.out, &csv)?;
    println!("{} witnesses, {failed} fail -> {}", rows.len(), path.display());
    Ok(status(failed == 0))
}

fn read_block(path: &Path) -> Result<BlockDoc> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn verify_ct(a: &CtBoundArgs, run: &mut Run) -> Result<Status> {
    let doc = read_block(&a.input)?;
    let r = verify_ct_bound(&doc.spec, &doc.p, a.per_arc)?;
    let mut csv = String::from("arc,x,abs_snp,threshold,holds\n");
    for row in &r.rows {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            row.arc,
            fmt17(row.x),
            fmt17(row.s_n_p),
            fmt17(row.threshold),
            row.holds
        ));
    }
    let path = run.write(&a.out, &csv)?;
    println!(
        "k = {}, n = {}: min log|S_nP|/log log n = {:.4}, target {:.4}, flag {} -> {}",
        r.k,
        r.n,
        r.min_ratio,
        r.target,
        r.flag,
        path.display()
    );
    Ok(status(r.flag))
}

fn parse_n(spec: &str, f: &TrigPoly) -> Result<u64> {
    if spec.eq_ignore_ascii_case("max") {
        Ok(f.degree())
    } else {
        spec.parse().with_context(|| format!("--N expects an integer or `max`, got {spec:?}"))
    }
}

fn read_poly(path: &Path) -> Result<TrigPoly> {
    read_poly_json(path).with_context(|| format!("reading {}", path.display()))
}

fn profile(a: &ProfileArgs, run: &mut Run) -> Result<Status> {
    let f = read_poly(&a.input)?;
    let x = match a.x {
        Some(x) => x,
        None => point_with_exponent(a.alpha, a.depth)?.x,
    };
    let prof = divergence_profile(&f, x, parse_n(&a.n_max, &f)?)?;
    let mut csv = String::from("n,running_max\n");
    for (n, r) in prof.checkpoints.iter().zip(&prof.running_max) {
        csv.push_str(&format!("{n},{}\n", fmt17(*r)));
    }
    let path = run.write(&a.out, &csv)?;
    run.write(&a.out.with_extension("json"), &(serde_json::to_string_pretty(&prof)? + "\n"))?;
    println!(
        "x = {x}: beta_poly {:.6}, beta_log {:.6} over n in [{}, {}] -> {}",
        prof.beta_poly,
        prof.beta_log,
        prof.n_min,
        prof.n_max,
        path.display()
    );
    Ok(Status::Ok)
}

fn spectrum(a: &SpectrumArgs, run: &mut Run) -> Result<Status> {
    let mode = match (a.mode, a.p) {
        (ModeArg::Lp, Some(p)) if p >= 1.0 => Mode::Lp { p },
        (ModeArg::Lp, _) => bail!("--mode lp needs --p >= 1"),
        (ModeArg::Ct, _) => Mode::Ct,
    };
    let f = read_poly(&a.input)?;
    let n_max = parse_n(&a.n_max, &f)?;
    let table = empirical_spectrum(&f, mode, a.grid, n_max, &BinSpec::default_for(mode, a.grid))?;
    let path = run.write(&a.out, &table.to_csv())?;
    run.write(&a.out.with_extension("json"), &(table.to_json()? + "\n"))?;
    if let Some(svg) = &a.plot {
        run.write(svg, &plot_spectrum(&table)?)?;
    }
    for b in table.bins.iter().filter(|b| b.count > 0) {
        println!("beta {:.2}: {} points, dim {:.4}", b.beta_center, b.count, b.dim.unwrap_or(f64::NAN));
    }
    println!("{mode} spectrum, M = {}, N = {} -> {}", table.grid_m, table.n_max, path.display());
    Ok(Status::Ok)
}

fn geom(a: &GeomArgs, run: &mut Run) -> Result<Status> {
    fn need<T: Copy>(v: Option<T>, flag: &str) -> Result<T> {
        v.with_context(|| format!("this family needs {flag}"))
    }
    let fam = match a.family {
        Family::Ijj => interval_family_ijj(need(a.big_j, "--J")?, need(a.j, "--j")?, a.primed)?,
        Family::Dyadic => dyadic_intervals(need(a.j, "--j")?)?,
        Family::BlownUp => blown_up_family(need(a.j, "--j")?, need(a.alpha, "--alpha")?)?,
        Family::Ikbeta => ikbeta_family(need(a.k, "--k")?, need(a.beta, "--beta")?)?,
    };
    let path = run.write(&a.out, &fam.to_csv())?;
    println!(
        "{}: {} arcs, measure {:.6}, covers circle: {} -> {}",
        fam.label(),
        fam.len(),
        fam.measure(),
        covering_check(&fam),
        path.display()
    );
    Ok(Status::Ok)
}

fn plot(a: &PlotArgs, run: &mut Run) -> Result<Status> {
    let text = std::fs::read_to_string(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let table: SpectrumTable = serde_json::from_str(&text).with_context(|| format!("parsing {}", a.input.display()))?;
    let path = run.write(&a.out, &plot_spectrum(&table)?)?;
    println!("{} bins -> {}", table.bins.len(), path.display());
    Ok(Status::Ok)
}
