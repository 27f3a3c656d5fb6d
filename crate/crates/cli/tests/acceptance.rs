//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::f64::consts::PI;
use std::path::Path;
use std::process::ExitCode;

use warplab_cli::config::SuiteConfig;
use warplab_cli::{parse_config_str, run_suite, sweep_family, RunRecord, SweepParam, Verdict};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn cfg(text: &str) -> SuiteConfig {
    parse_config_str(text, Path::new(".")).expect("acceptance configs are valid")
}

fn value(r: &RunRecord, check: &str, name: &str) -> f64 {
    r.check(check).and_then(|c| c.get(name)).unwrap_or(f64::NAN)
}

fn require(ok: bool, what: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn passed(r: &RunRecord, check: &str) -> Result<(), String> {
    let v = r.check(check).map(|c| c.verdict);
    require(v == Some(Verdict::Pass), format!("{} {check}: {v:?}", r.geometry))
}

const FLAT_POISSON: &str = "suite=cheng-yau\nkind=euclidean\nn=2\nR=1\ngrid=1024\nk_max=64\ndata=poisson\n";
const SPHERE_POISSON: &str = "suite=cheng-yau\nkind=sphere\nkappa=1\nn=2\nR=1\ngrid=1024\nk_max=64\ndata=poisson\n";
const CONE_POISSON: &str =
    "suite=cheng-yau\nkind=smoothed-cone\nalpha=0.5\nwidth=0.3\nn=2\nR=1\ngrid=1024\nk_max=64\ndata=poisson\n";
const LI_YAU_FLAT: &str = "suite=li-yau\nkind=euclidean\nn=3\nR=4\nboundary=whole-space\ninitial=kernel\n\
                           t_start=0.1\nt_end=0.5\nsteps=40\nintervals=128\n";
const LI_YAU_SPHERE: &str = "suite=li-yau\nkind=sphere\nkappa=1\nn=3\nR=1.5\nboundary=neumann\ninitial=kernel\n\
                             t_start=0.01\nt_end=0.035\nsteps=25\nintervals=96\nwindow=gaussian\n";
const HARNACK_FLAT: &str = "suite=harnack\nkind=euclidean\nn=3\nR=4\nboundary=whole-space\ninitial=kernel\n\
                            t_start=0.1\nt_end=0.5\nsteps=40\nintervals=128\nsamples=50\n";

fn sharp_gradient_equality() -> Outcome {
    let flat = run_suite(&cfg(FLAT_POISSON));
    let sup = value(&flat, "quotient_bound", "sup");
    require((sup - 1.0).abs() <= 1e-6, format!("flat sup {sup}"))?;
    passed(&flat, "equality_on_ray")?;
    let sphere = run_suite(&cfg(&format!("{SPHERE_POISSON}margin=1e-3\n")));
    passed(&sphere, "strict_margin")?;
    let s = value(&sphere, "quotient_bound", "sup");
    Ok(format!(
        "flat sup = {sup:.9}, ray error {:.1e}; sphere sup = {s:.6}",
        value(&flat, "equality_on_ray", "max_abs_quotient_minus_one")
    ))
}

fn v_inequality() -> Outcome {
    let mut out = Vec::new();
    for (label, text) in [("flat", FLAT_POISSON), ("sphere", SPHERE_POISSON), ("cone", CONE_POISSON)] {
        let r = run_suite(&cfg(text));
        passed(&r, "v_inequality")?;
        passed(&r, "v_stencil_order")?;
        out.push(format!(
            "{label}: min {:.2e} tol {:.1e} shrink x{:.2}",
            value(&r, "v_inequality", "min_residual"),
            value(&r, "v_inequality", "tol_fd"),
            value(&r, "v_stencil_order", "difference_ratio")
        ));
    }
    Ok(out.join("; "))
}

fn stability_direction() -> Outcome {
    let base = cfg("suite=cheng-yau\nkind=sphere\nkappa=1\nn=2\nR=1\ngrid=1024\nk_max=64\ndata=fourier\ncoefficients=0:1:0,1:0.3:0\n");
    let kappas = [0.01, 0.05, 0.1, 0.5, 1.0];
    let s = sweep_family(&base, SweepParam::Kappa, &kappas, None).map_err(|e| e.to_string())?;
    passed(&s.summary, "member_runs")?;
    passed(&s.summary, "trend_monotone")?;
    let flat = s.reference.as_ref().expect("kappa sweeps carry a flat reference");
    let d_flat = value(flat, "stability_functional", "value");
    let delta: Vec<f64> = s.records.iter().map(|r| value(r, "stability_functional", "value")).collect();
    let dist: Vec<f64> = s.records.iter().map(|r| value(r, "stability_functional", "polar_distortion")).collect();
    let gap = |i: usize| (delta[i] - d_flat).abs();
    require(gap(0) < 0.02 * gap(4), format!("delta(0.01) gap {} vs delta(1) gap {}", gap(0), gap(4)))?;
    require(dist[0] < 0.02 * dist[4] && dist.windows(2).all(|w| w[1] > w[0]), format!("distortion {dist:?}"))?;
    Ok(format!(
        "delta {:.5} -> {:.5} (flat {d_flat:.5}); distortion {:.2e} -> {:.2e}",
        delta[4], delta[0], dist[4], dist[0]
    ))
}

fn li_yau() -> Outcome {
    let flat = run_suite(&cfg(LI_YAU_FLAT));
    let sphere = run_suite(&cfg(LI_YAU_SPHERE));
    passed(&flat, "kernel_identity")?;
    passed(&sphere, "kernel_identity")?;
    for r in [&flat, &sphere] {
        passed(r, "li_yau_lower_bound")?;
        passed(r, "li_yau_refinement_order")?;
        passed(r, "g_upper_bound")?;
    }
    passed(&sphere, "no_false_rigidity")?;
    Ok(format!(
        "kernel |Z| <= {:.1e}; shrink flat x{:.2}, sphere x{:.2}; sphere max G = {:.3}",
        value(&flat, "kernel_identity", "max_abs"),
        value(&flat, "li_yau_refinement_order", "shrink_factor"),
        value(&sphere, "li_yau_refinement_order", "shrink_factor"),
        value(&sphere, "g_upper_bound", "max")
    ))
}

fn harnack() -> Outcome {
    let kernel = run_suite(&cfg(HARNACK_FLAT));
    passed(&kernel, "kernel_equality")?;
    passed(&kernel, "harnack_lower_bound")?;
    let floor = run_suite(&cfg(&HARNACK_FLAT.replace("initial=kernel", "initial=kernel-floor")));
    passed(&floor, "harnack_lower_bound")?;
    Ok(format!(
        "equality {:.1e}; min ratio {:.5} (tol {:.1e}), {:.4} with floor",
        value(&kernel, "kernel_equality", "ratio_minus_one"),
        value(&kernel, "harnack_lower_bound", "min_ratio"),
        value(&kernel, "harnack_lower_bound", "tol_pde"),
        value(&floor, "harnack_lower_bound", "min_ratio")
    ))
}

fn green_comparison() -> Outcome {
    let flat = run_suite(&cfg("suite=green\nkind=euclidean\nn=2\nR=1\ngrid=1024\n"));
    passed(&flat, "flat_identity")?;
    passed(&flat, "self_test")?;
    let sphere = run_suite(&cfg("suite=green\nkind=sphere\nkappa=1\nn=2\nR=1\ngrid=1024\n"));
    passed(&sphere, "self_test")?;
    passed(&sphere, "green_dominates_flat")?;
    // G(r) = (1/2pi) ln(tan(1/2)/tan(r/2)) on the unit sphere cap, flat G = (1/2pi) ln(1/r)
    let oracle = ((0.5f64.tan() / 0.25f64.tan()).ln() - 2f64.ln()) / (2.0 * PI);
    let gap = value(&sphere, "value_at_half", "g_minus_flat");
    require((gap - 0.0107).abs() <= 5e-4 && (gap - oracle).abs() <= 1e-8, format!("gap {gap}, oracle {oracle}"))?;
    Ok(format!(
        "flat |G - G0| <= {:.1e}; G(0.5) - G0(0.5) = {gap:.6} (oracle {oracle:.6})",
        value(&flat, "flat_identity", "sup_abs_difference")
    ))
}

fn b_function() -> Outcome {
    let flat = run_suite(&cfg("suite=b-function\nkind=euclidean\nn=3\nR=1\ngrid=1024\n"));
    let g0 = value(&flat, "radial_equality", "sup_grad");
    require((g0 - 1.0).abs() <= 1e-8, format!("flat sup grad {g0}"))?;
    let sphere = run_suite(&cfg("suite=b-function\nkind=sphere\nkappa=1\nn=3\nR=1\ngrid=1024\n"));
    passed(&sphere, "radial_equality")?;
    passed(&sphere, "rigidity_direction")?;
    let g1 = value(&sphere, "radial_equality", "sup_grad");
    let expect = 1.0 / 1f64.sin().powi(2);
    require((g1 - expect).abs() <= 1e-8 && g1 > 1.0, format!("sphere sup grad {g1} vs {expect}"))?;
    Ok(format!("flat {g0:.12}; sphere {g1:.10} (1/sin^2 1 = {expect:.10})"))
}

fn comparison_deficits() -> Outcome {
    let flat = run_suite(&cfg("suite=comparison-deficits\nkind=euclidean\nn=3\nR=1\ngrid=1024\n"));
    passed(&flat, "flat_identity")?;
    let worst = value(&flat, "flat_identity", "max_deficit");
    require(worst == 0.0, format!("flat deficit {worst}"))?;
    let base = cfg("suite=comparison-deficits\nkind=sphere\nkappa=1\nn=3\nR=1\ngrid=1024\n");
    let s =
        sweep_family(&base, SweepParam::Kappa, &[0.01, 0.05, 0.1, 0.5, 1.0], Some(1.0)).map_err(|e| e.to_string())?;
    passed(&s.summary, "member_runs")?;
    passed(&s.summary, "trend_monotone")?;
    passed(&s.summary, "trend_exponent")?;
    let exps: Vec<String> = s.summary.check("trend_exponent").unwrap().values[..4]
        .iter()
        .map(|m| format!("{} {:.3}", m.name, m.value))
        .collect();
    Ok(format!("flat max deficit {worst:.1e}; exponents {}", exps.join(", ")))
}

fn determinism_and_convergence() -> Outcome {
    for text in [SPHERE_POISSON, LI_YAU_FLAT, "suite=green\nkind=sphere\nkappa=1\nn=2\nR=1\ngrid=512\n"] {
        let (a, b) = (run_suite(&cfg(text)), run_suite(&cfg(text)));
        require(a.to_json() == b.to_json() && a.to_csv() == b.to_csv(), format!("{} reports differ", a.suite))?;
    }
    let grids = [256.0, 512.0, 1024.0];
    let mut orders = Vec::new();
    for text in [
        SPHERE_POISSON,
        "suite=cheng-yau\nkind=sphere\nkappa=1\nn=2\nR=1\nk_max=64\ndata=fourier\ncoefficients=0:1:0,1:0.3:0\n",
        "suite=green\nkind=sphere\nkappa=1\nn=2\nR=1\n",
        "suite=b-function\nkind=sphere\nkappa=1\nn=3\nR=1\n",
        "suite=comparison-deficits\nkind=sphere\nkappa=1\nn=3\nR=1\n",
    ] {
        let s = sweep_family(&cfg(text), SweepParam::Grid, &grids, None).map_err(|e| e.to_string())?;
        passed(&s.summary, "member_runs")?;
        passed(&s.summary, "richardson_order")?;
        let min = value(&s.summary, "richardson_order", "min_order");
        orders.push(format!(
            "{} {}",
            s.records[0].suite,
            if min.is_finite() { format!("{min:.2}") } else { "roundoff".into() }
        ));
    }
    Ok(format!("reports byte-identical; min Richardson order: {}", orders.join(", ")))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("sharp gradient equality and strict margin", sharp_gradient_equality),
        ("differential inequality for v", v_inequality),
        ("stability direction under flattening", stability_direction),
        ("Li-Yau inequality and refinement", li_yau),
        ("Harnack equality and random configurations", harnack),
        ("Green's function comparison", green_comparison),
        ("b-function boundary gradient", b_function),
        ("comparison deficits", comparison_deficits),
        ("determinism and grid convergence", determinism_and_convergence),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = std::time::Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {} {name} ({secs:.1}s): {detail}", i + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL {} {name} ({secs:.1}s): {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
