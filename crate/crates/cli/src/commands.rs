//! One function per command. Each returns the JSON result, the CSV tables
//! and a one-line summary; writing is left to the caller.

use admlab_core::admissibility::{
    infinite_time_sup, l1_input_norm, l2_input_norm, linfty_bounds, zero_class_profile, AdmissibilityReport,
    BoundOptions, InputOperator, Space,
};
use admlab_core::certify::{
    boundedness_probe, counterexample_run, iiss_certificate, iss_certificate, shift_demo, sqfct_constants,
    trajectory, weak_sqfct_estimate, weiss_check, CertificateVerdict, ModularOutcome, ShiftProfile, TrialOptions,
    WeissExponent,
};
use admlab_core::orlicz::{dvp_construct, luxemburg_norm};
use admlab_core::spectral::{DiagonalGenerator, Scale, SpectralVector};
use admlab_core::Error;
use serde::Serialize;
use serde_json::{json, Value};

use crate::output::{fmt_f64, Sink, Table};
use crate::scenario::{self, Scenario, TrialSection};
use crate::{CliError, Command};

pub struct Context<'a> {
    pub scenario: &'a Scenario,
    pub seed: Option<u64>,
    pub modes: Option<usize>,
    pub sink: &'a Sink,
}

impl Context<'_> {
    fn seed(&self, what: &str) -> Result<u64, CliError> {
        self.seed
            .ok_or_else(|| CliError::Config(format!("{what} is randomized: set /seed or pass --seed")))
    }

    fn generator(&self) -> Result<DiagonalGenerator, CliError> {
        self.scenario.generator(self.modes)
    }
}

pub struct Outcome {
    pub result: Value,
    pub tables: Vec<Table>,
    pub summary: String,
    pub modes: Option<usize>,
}

fn to_value<T: Serialize>(v: &T) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Io(e.to_string()))
}

pub fn dispatch(cmd: Command, ctx: &Context) -> Result<Outcome, CliError> {
    match cmd {
        Command::OrliczNorm => orlicz_norm(ctx),
        Command::Simulate => simulate(ctx),
        Command::Adm => adm(ctx),
        Command::Weiss => weiss(ctx),
        Command::Sqfct => sqfct(ctx),
        Command::Counterexample => counterexample(ctx),
        Command::Iss => certificate(ctx, false),
        Command::Iiss => certificate(ctx, true),
        Command::ShiftDemo => shift(ctx),
        Command::ProbeBoundedness => probe(ctx),
    }
}

fn orlicz_norm(ctx: &Context) -> Result<Outcome, CliError> {
    let s = ctx.scenario;
    let sec = s
        .orlicz_norm
        .as_ref()
        .ok_or_else(|| CliError::Config("missing key /orlicz_norm".into()))?;
    let f = scenario::checked_function(&sec.function, "/orlicz_norm/function")?;
    let phi = s.phi()?;
    let norm = luxemburg_norm(phi, &f)?;
    let modular = if norm > 0.0 { f.modular(phi, norm) } else { 0.0 };
    let dvp = sec.dvp_tau.map(|tau| dvp_construct(&f, tau)).transpose()?;

    let mut table = Table::new("function", &["t [time]", "value [input units]"]);
    for (t, v) in f.grid().iter().zip(f.values()) {
        table.push([*t, *v]);
    }
    let mut tables = vec![table];
    if let Some(d) = &dvp {
        let mut slopes = Table::new("dvp_slopes", &["level [input units]", "slope [1]"]);
        for (j, c) in d.slopes.iter().enumerate() {
            slopes.push([j as f64, *c]);
        }
        tables.push(slopes);
    }
    Ok(Outcome {
        summary: format!("Luxemburg norm {} (modular at the norm {}, L1 norm {})", norm, modular, f.l1_norm()),
        result: json!({
            "luxemburg_norm": norm,
            "modular_at_norm": modular,
            "l1_norm": f.l1_norm(),
            "phi": phi,
            "dvp": to_value(&dvp)?,
        }),
        tables,
        modes: None,
    })
}

fn simulate(ctx: &Context) -> Result<Outcome, CliError> {
    let s = ctx.scenario;
    let sec = s
        .simulate
        .as_ref()
        .ok_or_else(|| CliError::Config("missing key /simulate".into()))?;
    let a = ctx.generator()?;
    let b = s.input(&a)?;
    let x0 = match &sec.x0 {
        Some(v) => s.x0(v, &a, "/simulate/x0")?,
        None => SpectralVector::zeros(a.len(), Scale::X),
    };
    let u = sec
        .signal
        .build()
        .map_err(|e| CliError::Config(format!("/simulate/signal: {e}")))?;
    if u.channels() != b.channels(&a) {
        return Err(CliError::Config(format!(
            "/simulate/signal has {} channels, the input operator {}",
            u.channels(),
            b.channels(&a)
        )));
    }
    if let Some(t) = sec.times.iter().find(|t| !(**t >= 0.0 && **t <= u.horizon())) {
        return Err(CliError::Config(format!(
            "/simulate/times: {t} lies outside the signal horizon [0, {}]",
            u.horizon()
        )));
    }
    let mut table = Table::new("trajectory", &["t [time]", "state_norm [X]", "free_norm [X]"]);
    let mut last = None;
    for &t in &sec.times {
        let x = if t == 0.0 { x0.clone() } else { trajectory(&a, &b, &x0, &u, t)? };
        let free = a.semigroup_apply(t, &x0)?;
        table.push([t, a.space_norm(&x)?, a.space_norm(&free)?]);
        last = Some((t, x));
    }
    let summary = match &last {
        Some((t, x)) => format!("{} times, ‖x({t})‖ = {}", sec.times.len(), a.space_norm(x)?),
        None => "no evaluation times".into(),
    };
    Ok(Outcome {
        result: json!({
            "times": sec.times,
            "final_state": to_value(&last.map(|(t, x)| json!({"t": t, "coefficients": x.coeffs})))?,
        }),
        tables: vec![table],
        summary,
        modes: Some(a.len()),
    })
}

fn bound_row(table: &mut Table, r: &AdmissibilityReport) {
    table.push_strings(vec![
        fmt_f64(r.horizon),
        fmt_f64(r.lower_bound),
        fmt_f64(r.upper_bound),
        r.route.to_string(),
    ]);
}

fn adm(ctx: &Context) -> Result<Outcome, CliError> {
    let s = ctx.scenario;
    let sec = s.adm.clone().unwrap_or_default();
    let a = ctx.generator()?;
    let b = s.input(&a)?;
    let horizons = s.horizons()?;
    let seed = match sec.space {
        Space::Linf | Space::Orlicz => ctx.seed("adm")?,
        _ => ctx.seed.unwrap_or(0),
    };
    let opts = BoundOptions {
        pieces: sec.pieces,
        seed,
        real_field: sec.real_field,
        candidates: vec![],
    };
    let unit = "[X per unit input norm]";
    let mut table = Table::new(
        "bounds",
        &["t [time]", &format!("lower {unit}"), &format!("upper {unit}"), "route"],
    );
    let mut per_horizon = Vec::new();
    for &t in &horizons {
        let r = match sec.space {
            Space::Linf => Some(linfty_bounds(&a, &b, t, &opts)?),
            Space::L2 => {
                let v = l2_input_norm(&a, &b, t)?;
                Some(closed_form_report(t, Space::L2, v, a.len()))
            }
            Space::L1 => {
                let v = l1_input_norm(&a, &b)?;
                Some(closed_form_report(t, Space::L1, v, a.len()))
            }
            Space::Orlicz => None,
        };
        if let Some(r) = r {
            bound_row(&mut table, &r);
            per_horizon.push(r);
        }
    }
    let psi = if sec.space == Space::Orlicz { Some(s.psi()?) } else { None };
    let infinite = if sec.infinite_time || sec.space == Space::Orlicz {
        let r = infinite_time_sup(&a, &b, sec.space, &horizons, &opts, psi)?;
        bound_row(&mut table, &r);
        Some(r)
    } else {
        None
    };

    let mut tables = vec![table];
    let profile = match &sec.zero_class {
        Some(z) => {
            let p = zero_class_profile(&a, &b, &z.ts, &opts, z.floor)?;
            let mut up = Table::new("zero_class_upper", &["t [time]", &format!("upper {unit}")]);
            let mut lo = Table::new("zero_class_lower", &["t [time]", &format!("lower {unit}")]);
            // rows come in decreasing t; curves are written with t increasing
            for r in p.rows.iter().rev() {
                up.push([r.t, r.upper]);
                lo.push([r.t, r.lower]);
            }
            tables.push(up);
            tables.push(lo);
            Some(p)
        }
        None => None,
    };

    let headline = infinite.as_ref().or(per_horizon.last()).expect("at least one bound");
    let mut summary = format!(
        "{} bounds at t = {}: [{}, {}] via {}",
        sec.space,
        fmt_f64(headline.horizon),
        headline.lower_bound,
        fmt_f64(headline.upper_bound),
        headline.route
    );
    if let Some(p) = &profile {
        summary.push_str(&format!("; zero-class verdict {:?}", p.verdict));
    }
    Ok(Outcome {
        result: json!({
            "space": sec.space,
            "per_horizon": to_value(&per_horizon)?,
            "infinite_time": to_value(&infinite)?,
            "zero_class": to_value(&profile)?,
        }),
        tables,
        summary,
        modes: Some(a.len()),
    })
}

fn closed_form_report(t: f64, space: Space, v: f64, modes: usize) -> AdmissibilityReport {
    use admlab_core::admissibility::{Route, RouteOutcome};
    AdmissibilityReport {
        horizon: t,
        space,
        lower_bound: v,
        upper_bound: v,
        lower_route: Route::ClosedForm,
        route: Route::ClosedForm,
        modes,
        upper_routes: vec![RouteOutcome {
            route: Route::ClosedForm,
            value: v,
            note: "exact operator norm".into(),
        }],
    }
}

fn weiss(ctx: &Context) -> Result<Outcome, CliError> {
    let s = ctx.scenario;
    let sec = s.weiss.clone().unwrap_or_default();
    let p: WeissExponent = sec.p.parse().map_err(|e: Error| CliError::Config(format!("/weiss/p: {e}")))?;
    let a = ctx.generator()?;
    let b = s.input(&a)?;
    let r = weiss_check(&a, &b, p)?;
    let mut table = Table::new(
        "sup",
        &["grid_sup [X per unit input]", "refined_sup [X per unit input]", "closed_form [X per unit input]", "argmax_re [1/time]", "argmax_im [1/time]"],
    );
    table.push([r.grid_sup, r.refined_sup, r.closed_form, r.argmax.0, r.argmax.1]);
    Ok(Outcome {
        summary: format!(
            "p = {}: sup {} (grid {}, per-mode {}{})",
            sec.p,
            r.refined_sup,
            r.grid_sup,
            r.closed_form,
            if r.closed_form_exact { ", exact" } else { "" }
        ),
        result: to_value(&r)?,
        tables: vec![table],
        modes: Some(a.len()),
    })
}

fn sqfct(ctx: &Context) -> Result<Outcome, CliError> {
    let sec = ctx.scenario.sqfct.clone().unwrap_or_default();
    let a = ctx.generator()?;
    let r = sqfct_constants(&a, sec.phi0)?;
    let weak = if sec.weak_samples > 0 {
        Some(weak_sqfct_estimate(&a, sec.weak_samples, ctx.seed("the weak square-function estimate")?)?)
    } else {
        None
    };
    let mut modes = Table::new(
        "modes",
        &["mode [index]", "re_lambda [1/time]", "im_lambda [1/time]", "closed_form [1]", "quadrature [1]"],
    );
    for m in &r.per_mode {
        modes.push([m.n as f64, m.lambda.re, m.lambda.im, m.closed_form, m.quadrature]);
    }
    let mut partials = Table::new("printed_convention_partials", &["T [time]", "partial_integral [1]"]);
    for (t, v) in &r.printed_convention_partials {
        partials.push([*t, *v]);
    }
    Ok(Outcome {
        summary: format!(
            "k = {}, K = {} (quadrature rel diff {:.1e}){}",
            r.k_lower,
            r.k_upper,
            r.max_quadrature_rel_diff,
            weak.as_ref().map_or(String::new(), |w| format!(", weak estimate {}", w.estimate))
        ),
        result: json!({ "constants": to_value(&r)?, "weak": to_value(&weak)? }),
        tables: vec![modes, partials],
        modes: Some(a.len()),
    })
}

fn counterexample(ctx: &Context) -> Result<Outcome, CliError> {
    let mut sec = ctx.scenario.counterexample.clone().unwrap_or_default();
    if let Some(m) = ctx.modes {
        sec.ms = vec![m];
    }
    let t = counterexample_run(sec.k_bound, &sec.ms, sec.complex)?;
    let mut table = Table::new(
        "divergence",
        &[
            "M [modes]",
            "S_M [X norm squared]",
            "theory [X norm squared]",
            "per_column_bound [X per unit input]",
            "weiss [X per unit input]",
        ],
    );
    for r in &t.rows {
        table.push_strings(vec![
            r.m.to_string(),
            fmt_f64(r.s_m),
            r.theory.map_or(String::new(), fmt_f64),
            fmt_f64(r.per_column_bound_max),
            fmt_f64(r.weiss),
        ]);
    }
    let last = t.rows.last().expect("at least one M");
    Ok(Outcome {
        summary: format!(
            "S_{} = {}{}; per-column L∞ bound ≤ {}, Weiss sup {}",
            last.m,
            last.s_m,
            last.theory.map_or(String::new(), |v| format!(" (theory {v})")),
            last.per_column_bound_max,
            last.weiss
        ),
        modes: Some(last.m),
        result: to_value(&t)?,
        tables: vec![table],
    })
}

fn trial_options(sec: &TrialSection, seed: u64) -> TrialOptions {
    TrialOptions {
        trials: sec.trials,
        horizon: sec.horizon,
        times: sec.times,
        pieces: sec.pieces,
        seed,
        real_field: sec.real_field,
        gain_override: sec.gain_override,
    }
}

fn certificate(ctx: &Context, integral: bool) -> Result<Outcome, CliError> {
    let s = ctx.scenario;
    let name = if integral { "iiss" } else { "iss" };
    let sec = if integral { s.iiss.clone() } else { s.iss.clone() }.unwrap_or_default();
    let opts = trial_options(&sec, ctx.seed(name)?);
    let a = ctx.generator()?;
    let b = s.input(&a)?;
    let verdict: Result<CertificateVerdict, Error> = if integral {
        let x0 = match &b {
            InputOperator::AMinusOneX0 { x0 } => x0.clone(),
            _ => return Err(CliError::Config("iiss needs /input of kind a_minus_one_x0".into())),
        };
        iiss_certificate(&a, &x0, s.psi()?, &opts)
    } else {
        iss_certificate(&a, &b, &opts)
    };
    let v = match verdict {
        Ok(v) => v,
        Err(Error::CertificateViolation(dump)) => {
            let path = ctx.sink.json(&format!("{name}_violation.json"), &dump)?;
            return Err(CliError::Violation(format!("{dump}; dump written to {}", path.display())));
        }
        Err(e) => return Err(e.into()),
    };
    let mut table = Table::new("trials", &["trial [index]", "t [time]", "state_norm [X]", "envelope [X]"]);
    for r in &v.rows {
        table.push([r.trial as f64, r.t, r.state_norm, r.envelope]);
    }
    Ok(Outcome {
        summary: format!(
            "{} checks over {} trials, no violation, max ratio {:.6} (gain {})",
            v.checks, v.trials, v.max_ratio, v.bundle.gain
        ),
        result: to_value(&v)?,
        tables: vec![table],
        modes: Some(a.len()),
    })
}

fn outcome_row(table: &mut Table, quantity: &str, o: &ModularOutcome) {
    let (status, value) = match *o {
        ModularOutcome::Finite { value } => ("finite", value),
        ModularOutcome::Divergent { partial, .. } => ("divergent", partial),
        ModularOutcome::Inconclusive { partial, .. } => ("inconclusive", partial),
    };
    table.push_strings(vec![quantity.into(), status.into(), fmt_f64(value)]);
}

fn shift(ctx: &Context) -> Result<Outcome, CliError> {
    let s = ctx.scenario;
    let sec = s
        .shift_demo
        .as_ref()
        .ok_or_else(|| CliError::Config("missing key /shift_demo".into()))?;
    let profile = scenario::checked_profile(&sec.profile)?;
    let r = shift_demo(&profile, s.phi()?, sec.t)?;
    let mut table = Table::new("integrals", &["quantity", "status", "value [input units times time]"]);
    outcome_row(&mut table, "output_l1", &r.output_l1);
    outcome_row(&mut table, "input_l1", &r.input_l1);
    outcome_row(&mut table, "modular", &r.modular);
    let mut tables = vec![table];
    if let ShiftProfile::Sampled { function } = &profile {
        let mut f = Table::new("profile", &["s [time]", "value [input units]"]);
        for (t, v) in function.grid().iter().zip(function.values()) {
            f.push([*t, *v]);
        }
        tables.push(f);
    }
    let describe = |o: &ModularOutcome| match *o {
        ModularOutcome::Finite { value } => value.to_string(),
        ModularOutcome::Divergent { partial, .. } => format!("divergent (partial {partial:.3e})"),
        ModularOutcome::Inconclusive { partial, .. } => format!("inconclusive (partial {partial:.3e})"),
    };
    Ok(Outcome {
        summary: format!(
            "‖Ψ_t f‖_L1 = {}, ‖f‖_L1 = {}, modular {}; in E_Φ: {}",
            describe(&r.output_l1),
            describe(&r.input_l1),
            describe(&r.modular),
            r.in_e_phi
        ),
        result: to_value(&r)?,
        tables,
        modes: None,
    })
}

fn probe(ctx: &Context) -> Result<Outcome, CliError> {
    let sec = ctx.scenario.probe_boundedness.clone().unwrap_or_default();
    let a = ctx.generator()?;
    let n = a.len();
    let mut requested = sec.truncations.clone();
    if ctx.modes.is_some() {
        // --modes shrinks the spectrum; keep the truncations that still fit
        requested.retain(|&t| t <= n);
    }
    let truncations = if requested.is_empty() {
        let mut t = vec![(n / 4).max(1), (n / 2).max(1), n];
        t.dedup();
        t
    } else {
        requested
    };
    let ts = if sec.ts.is_empty() {
        (0..7).map(|j| 10f64.powi(-j)).collect()
    } else {
        sec.ts.clone()
    };
    let tab = boundedness_probe(&a, &truncations, &ts)?;
    let mut all = Table::new("values", &["N [modes]", "t [time]", "value [1]", "critical [0/1]"]);
    let mut critical = Table::new("critical", &["N [modes]", "value [1]"]);
    for r in &tab.rows {
        all.push([r.modes as f64, r.t, r.value, if r.critical { 1.0 } else { 0.0 }]);
        if r.critical {
            critical.push([r.modes as f64, r.value]);
        }
    }
    Ok(Outcome {
        summary: format!(
            "{} truncations; zero-class limit degrades with N: {}",
            truncations.len(),
            tab.zero_class_degrades
        ),
        result: to_value(&tab)?,
        tables: vec![all, critical],
        modes: Some(n),
    })
}
