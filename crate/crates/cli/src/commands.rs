use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use halfspace_core::bounds::{
    check_gradient, check_linear_growth, check_lower_power, check_upper_power, BoundCertificate, SampleSource,
};
use halfspace_core::halfplane::{build_grid, consistent_data, solve, symmetry_deviation, Field2D, SolverSpec};
use halfspace_core::io::fmt_g15;
use halfspace_core::ode::{limit_slope, solve_prescribed_slope, ShootSpec};
use halfspace_core::profiles::{ScalingMap, StripSpec};
use halfspace_core::{GammaParam, Profile1D, ProfileKind};
use serde_json::{json, Value};

use crate::config::{pick, positive, CorrectionArg, Format, RunConfig};
use crate::svg::{self, Chart, Series};
use crate::{CliError, Common, ExactArgs, HalfplaneArgs, ReportArgs, ScaleArgs, ShootArgs, VerifyArgs};

type Res<T> = Result<T, CliError>;

struct Output {
    dir: PathBuf,
    format: Format,
}

impl Output {
    fn new(c: &Common, cfg: &RunConfig) -> Res<Self> {
        let dir = pick(c.out.clone(), cfg.out.clone(), PathBuf::from("."));
        fs::create_dir_all(&dir)
            .map_err(|e| CliError::Input(format!("cannot create output directory {}: {e}", dir.display())))?;
        Ok(Self {
            dir,
            format: pick(c.format, cfg.format, Format::Csv),
        })
    }

    fn write(&self, name: &str, contents: &str) -> Res<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
    }

    fn json(&self, name: &str, mut v: Value) -> Res<()> {
        round_json(&mut v);
        let mut s = serde_json::to_string_pretty(&v).expect("json value serializes");
        s.push('\n');
        self.write(name, &s)
    }

    /// Profile as `<stem>.csv` or `<stem>.json`, plus `<stem>.svg` for the
    /// svg format.
    fn profile(&self, stem: &str, p: &Profile1D, chart: impl FnOnce() -> Chart) -> Res<()> {
        match self.format {
            Format::Json => self.json(&format!("{stem}.json"), p.to_json()),
            Format::Csv => self.write(&format!("{stem}.csv"), &p.to_csv_string()),
            Format::Svg => {
                self.write(&format!("{stem}.csv"), &p.to_csv_string())?;
                self.write(&format!("{stem}.svg"), &svg::render(&chart()))
            }
        }
    }
}

/// Rounds every float in `v` to 15 significant digits.
fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            if let Some(r) = fmt_g15(x).parse::<f64>().ok().and_then(serde_json::Number::from_f64) {
                *n = r;
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_json),
        Value::Object(o) => o.values_mut().for_each(round_json),
        _ => {}
    }
}

fn gamma(flag: Option<f64>, cfg: &RunConfig) -> Res<GammaParam> {
    Ok(GammaParam::new(pick(flag, cfg.gamma, 2.0))?)
}

fn slope(flag: Option<f64>, cfg: &RunConfig) -> Res<f64> {
    let m = pick(flag, cfg.slope, 1.0);
    if m > 0.0 && m.is_finite() {
        Ok(m)
    } else {
        Err(CliError::Input(format!("slope must be positive, got {m}")))
    }
}

fn profile_chart(title: &str, p: &Profile1D, slope: Option<f64>) -> Chart {
    let g = p.gamma();
    let pts: Vec<(f64, f64)> = p.grid().iter().copied().zip(p.values().iter().copied()).collect();
    let mut series = vec![Series::new("v", pts.clone())];
    series.push(
        Series::new(
            "C t^α",
            pts.iter()
                .map(|&(t, _)| (t, g.c_gamma() * t.powf(g.alpha_pow())))
                .collect(),
        )
        .dashed(),
    );
    if let Some(m) = slope {
        series.push(Series::new("M t", pts.iter().map(|&(t, _)| (t, m * t)).collect()).dashed());
    }
    Chart {
        title: format!("{title}, γ = {}", g.gamma()),
        x_label: "t".into(),
        y_label: "v".into(),
        log_x: true,
        log_y: true,
        series,
    }
}

pub fn exact(a: &ExactArgs, cfg: &RunConfig) -> Res<()> {
    let g = gamma(a.gamma, cfg)?;
    let t_max = positive("t_max", pick(a.t_max, cfg.t_max, 10.0))?;
    let n = pick(a.n, cfg.n, 1000);
    if n == 0 {
        return Err(CliError::Input("n must be at least 1".into()));
    }
    let out = Output::new(&a.common, cfg)?;
    let p = Profile1D::power_uniform(g, t_max, n)?;
    out.profile("power_profile", &p, || profile_chart("power solution", &p, None))
}

pub fn shoot(a: &ShootArgs, cfg: &RunConfig) -> Res<()> {
    let g = gamma(a.gamma, cfg)?;
    let m = slope(a.slope, cfg)?;
    let threshold = positive("route_tol", pick(a.route_tol, cfg.route_tol, 1e-4))?;
    let spec = ShootSpec {
        rel_tol: positive("tol", pick(a.tol, cfg.tol, 1e-12))?,
        horizon: positive("horizon", pick(a.horizon, cfg.horizon, 1e4))?,
        // the threshold is applied below, after the outputs are written
        route_tol: f64::INFINITY,
        ..ShootSpec::default()
    };
    let out = Output::new(&a.common, cfg)?;
    let (p, rep) = solve_prescribed_slope(g, m, &spec)?;
    out.profile("profile", &p, || profile_chart("prescribed slope", &p, Some(m)))?;
    let ok = rep.discrepancy_sup_rel <= threshold;
    let mut report = json!({
        "gamma": g.gamma(),
        "slope": m,
        "route_tol": threshold,
        "pass": ok,
    });
    merge(&mut report, serde_json::to_value(rep).expect("report serializes"));
    out.json("shoot_report.json", report)?;
    if ok {
        Ok(())
    } else {
        Err(CliError::Numeric(format!(
            "route discrepancy {:.3e} exceeds threshold {threshold:.3e}",
            rep.discrepancy_sup_rel
        )))
    }
}

fn merge(into: &mut Value, from: Value) {
    if let (Value::Object(a), Value::Object(b)) = (into, from) {
        a.extend(b);
    }
}

enum Loaded {
    Profile(Profile1D),
    Field(Field2D),
}

fn load(path: Option<&PathBuf>, g: Option<f64>, cfg: &RunConfig) -> Res<Loaded> {
    let path = path
        .or(cfg.input.as_ref())
        .ok_or_else(|| CliError::Input("missing --input".into()))?;
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let ctx = |e: halfspace_core::Error| CliError::Input(format!("{}: {e}", path.display()));
    if is_json(path, &text) {
        let v: Value = serde_json::from_str(&text).map_err(|e| ctx(e.into()))?;
        return if v.get("grid").is_some() {
            Ok(Loaded::Field(Field2D::from_json(&v).map_err(ctx)?))
        } else {
            Ok(Loaded::Profile(Profile1D::from_json(&v).map_err(ctx)?))
        };
    }
    let g = gamma(g, cfg)?;
    let header = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("").replace(' ', "");
    if header == "x,z,u" {
        Ok(Loaded::Field(Field2D::read_csv(BufReader::new(text.as_bytes()), g).map_err(ctx)?))
    } else {
        Ok(Loaded::Profile(
            Profile1D::read_csv(BufReader::new(text.as_bytes()), g, ProfileKind::Raw).map_err(ctx)?,
        ))
    }
}

fn is_json(path: &Path, text: &str) -> bool {
    path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with('{')
}

pub fn scale(a: &ScaleArgs, cfg: &RunConfig) -> Res<()> {
    let Loaded::Profile(p) = load(a.input.as_ref(), a.gamma, cfg)? else {
        return Err(CliError::Input("scale needs a profile (t,v,dv), not a field".into()));
    };
    let lambda = a.lambda.or(cfg.lambda);
    let target = a.slope.or(cfg.slope);
    let map = match (lambda, target) {
        (Some(l), None) => ScalingMap::new(p.gamma(), l)?,
        (None, Some(m)) => {
            let from = p.limit_slope().unwrap_or_else(|| limit_slope(&p));
            if from.is_nan() || from <= 0.0 {
                return Err(CliError::Input(
                    "input profile has no positive slope at infinity; use --lambda".into(),
                ));
            }
            ScalingMap::for_slopes(p.gamma(), from, m)?
        }
        _ => return Err(CliError::Input("give exactly one of --lambda and --slope".into())),
    };
    let out = Output::new(&a.common, cfg)?;
    let q = map.apply(&p);
    let m = q.limit_slope();
    out.profile("scaled", &q, || profile_chart("rescaled profile", &q, m))
}

fn certificates<S: SampleSource + ?Sized>(s: &S, strip: f64, far: f64) -> Res<Vec<BoundCertificate>> {
    let near = StripSpec::new(strip)?;
    let far = StripSpec::new(far)?;
    let (grad_strip, _) = check_gradient(s, near)?;
    let (_, grad_far) = check_gradient(s, far)?;
    Ok(vec![
        check_upper_power(s, near)?,
        check_lower_power(s)?,
        check_linear_growth(s, far)?,
        grad_strip,
        grad_far,
    ])
}

fn ratio_chart<S: SampleSource + ?Sized>(s: &S) -> Chart {
    let g = s.gamma();
    let pts: Vec<(f64, f64)> = s
        .value_samples(0)
        .into_iter()
        .map(|(x, u)| (x, u / x.powf(g.alpha_pow())))
        .collect();
    let c = vec![(pts.first().map_or(0.0, |p| p.0), g.c_gamma()), (s.extent(), g.c_gamma())];
    Chart {
        title: format!("power-bound ratio, γ = {}", g.gamma()),
        x_label: "x_N".into(),
        y_label: "u / x_N^α".into(),
        log_x: true,
        log_y: false,
        series: vec![Series::new("u / x_N^α", pts), Series::new("C_γ", c).dashed()],
    }
}

fn failed(certs: &[BoundCertificate]) -> Vec<String> {
    certs
        .iter()
        .filter(|c| !c.pass)
        .map(|c| serde_json::to_value(c.kind).expect("kind serializes").as_str().unwrap_or("?").to_string())
        .collect()
}

pub fn verify(a: &VerifyArgs, cfg: &RunConfig) -> Res<()> {
    let src = load(a.input.as_ref(), a.gamma, cfg)?;
    let strip = positive("strip", pick(a.strip, cfg.strip, 1.0))?;
    let far = a.far_strip.or(cfg.far_strip);
    let out = Output::new(&a.common, cfg)?;
    let (certs, chart) = match &src {
        Loaded::Profile(p) => (
            certificates(p, strip, far.unwrap_or(p.extent() / 10.0))?,
            ratio_chart(p),
        ),
        Loaded::Field(f) => (
            certificates(f, strip, far.unwrap_or(f.extent() / 10.0))?,
            ratio_chart(f),
        ),
    };
    out.json("certificates.json", serde_json::to_value(&certs).expect("certificates serialize"))?;
    if out.format == Format::Svg {
        out.write("certificates.svg", &svg::render(&chart))?;
    }
    let bad = failed(&certs);
    if bad.is_empty() {
        Ok(())
    } else {
        Err(CliError::Numeric(format!("certificates failed: {}", bad.join(", "))))
    }
}

pub fn halfplane(a: &HalfplaneArgs, cfg: &RunConfig) -> Res<()> {
    let g = gamma(a.gamma, cfg)?;
    let m = slope(a.slope, cfg)?;
    let width = pick(a.width, cfg.width, 8.0);
    let height = pick(a.height, cfg.height, 4.0);
    let h = pick(a.h, cfg.h, 0.0625);
    let perturb = pick(a.perturb, cfg.perturb, 0.0);
    let correction = pick(a.correction, cfg.correction, CorrectionArg::Series);
    let spec = SolverSpec {
        tol: positive("tol", pick(a.tol, cfg.tol, 1e-11))?,
        correction: correction.into(),
        ..SolverSpec::default()
    };
    let grid = build_grid(width, height, h)?;
    let out = Output::new(&a.common, cfg)?;

    // top value from the 1-D profile; lateral data from the discrete column
    // so that unperturbed data has an exactly x'-independent solution
    let (p, _) = solve_prescribed_slope(g, m, &ShootSpec::default())?;
    let top = p.eval(height).0;
    let mut data = consistent_data(g, &grid, top, &spec)?;
    if perturb != 0.0 {
        data = data.perturbed(&grid, perturb)?;
    }
    let (field, rep) = solve(g, &grid, &data, &spec)?;
    let sym = symmetry_deviation(&field);

    match out.format {
        Format::Json => out.json("field.json", field.to_json())?,
        Format::Csv | Format::Svg => {
            let mut buf = Vec::new();
            field.write_csv(&mut buf)?;
            out.write("field.csv", &String::from_utf8(buf).expect("ascii output"))?;
        }
    }
    let mut curve = String::from("z,dev\n");
    for (j, d) in sym.per_row.iter().enumerate() {
        curve.push_str(&format!("{},{}\n", fmt_g15(grid.z(j)), fmt_g15(*d)));
    }
    out.write("symmetry.csv", &curve)?;
    if out.format == Format::Svg {
        out.write("symmetry.svg", &svg::render(&symmetry_chart(&[(width, curve_points(&sym.per_row, h))])))?;
    }
    out.json(
        "halfplane_report.json",
        json!({
            "gamma": g.gamma(),
            "slope": m,
            "width": width,
            "height": height,
            "h": h,
            "perturb": perturb,
            "correction": spec.correction,
            "top_value": top,
            "max_dev": sym.max_dev,
            "symmetry": sym,
            "iteration": rep,
        }),
    )
}

fn curve_points(per_row: &[f64], h: f64) -> Vec<(f64, f64)> {
    per_row.iter().enumerate().skip(1).map(|(j, d)| (j as f64 * h, *d)).collect()
}

fn symmetry_chart(curves: &[(f64, Vec<(f64, f64)>)]) -> Chart {
    Chart {
        title: "deviation from x'-independence".into(),
        x_label: "x_N".into(),
        y_label: "max |u − mean| / mean".into(),
        log_x: false,
        log_y: true,
        series: curves
            .iter()
            .map(|(w, pts)| Series::new(format!("W = {w}"), pts.clone()))
            .collect(),
    }
}

pub fn report(a: &ReportArgs, cfg: &RunConfig) -> Res<()> {
    let g = gamma(a.gamma, cfg)?;
    let m = slope(a.slope, cfg)?;
    let strip = positive("strip", pick(a.strip, cfg.strip, 1.0))?;
    let out = Output::new(&a.common, cfg)?;
    let (p, rep) = solve_prescribed_slope(g, m, &ShootSpec::default())?;
    let far = pick(a.far_strip, cfg.far_strip, p.extent() / 10.0);
    let certs = certificates(&p, strip, far)?;

    let files = if a.halfplane.is_empty() {
        cfg.halfplane.clone().unwrap_or_default()
    } else {
        a.halfplane.clone()
    };
    let mut runs = Vec::new();
    let mut curves = Vec::new();
    for f in &files {
        let text = fs::read_to_string(f).map_err(|e| CliError::Input(format!("cannot read {}: {e}", f.display())))?;
        let v: Value = serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", f.display())))?;
        let num = |k: &str| {
            v.get(k)
                .and_then(Value::as_f64)
                .ok_or_else(|| CliError::Input(format!("{}: missing number '{k}'", f.display())))
        };
        let (w, h) = (num("width")?, num("h")?);
        let per_row: Vec<f64> = v["symmetry"]["per_row"]
            .as_array()
            .map(|r| r.iter().filter_map(Value::as_f64).collect())
            .unwrap_or_default();
        curves.push((w, curve_points(&per_row, h)));
        runs.push(json!({
            "width": w,
            "height": num("height")?,
            "h": h,
            "perturb": num("perturb")?,
            "max_dev": num("max_dev")?,
        }));
    }

    out.json(
        "summary.json",
        json!({
            "gamma": g.gamma(),
            "alpha": g.alpha_pow(),
            "c_gamma": g.c_gamma(),
            "slope": m,
            "shoot": rep,
            "certificates": certs,
            "halfplane": runs,
        }),
    )?;
    out.write("profile.svg", &svg::render(&profile_chart("prescribed slope", &p, Some(m))))?;
    out.write("certificates.svg", &svg::render(&ratio_chart(&p)))?;
    if !curves.is_empty() {
        out.write("symmetry_decay.svg", &svg::render(&symmetry_chart(&curves)))?;
    }
    let bad = failed(&certs);
    if bad.is_empty() {
        Ok(())
    } else {
        Err(CliError::Numeric(format!("certificates failed: {}", bad.join(", "))))
    }
}
