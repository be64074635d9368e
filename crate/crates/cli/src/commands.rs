use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use fockext::counterexample::{comb_density_scan, growth_table, Mode};
use fockext::density::upper_density;
use fockext::extend_min::{crossing_extend, kernel_extension, minimal_extension, BranchDatum, ConstraintSet};
use fockext::extend_model::{clipped_extend, model_extend, CjsTable, LaurentSeries, DEFAULT_NODES, DEFAULT_TERMS};
use fockext::fock::Region;
use fockext::geometry::{
    make_comb, make_crossing, make_model_curve, make_sine_curve, sine_window, surface_samples, Curve, LinearForm,
};
use fockext::report::Table;
use fockext::rng::stream;
use fockext::uniflat::{flatness_report, FlatnessConfig};
use fockext::{Point2, Poly2, Weight, C64};
use rand::Rng;
use serde_json::{json, Value};

use crate::acceptance::run_all;
use crate::config::{
    parse_complex_list, parse_f64_list, parse_groups, parse_int_list, parse_point, parse_points, points_json,
};
use crate::{Command, CurveArgs, Failure, Output, EXIT_ACCEPTANCE, EXIT_OK};

type Res<T> = std::result::Result<T, Failure>;

fn usage<T>(r: std::result::Result<T, String>) -> Res<T> {
    r.map_err(Failure::Usage)
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn output(results: Value, stderr: Option<f64>, table: Option<Table>) -> Output {
    Output {
        results,
        stderr,
        table,
        lines: Vec::new(),
        exit: EXIT_OK,
    }
}

fn random_c64(rng: &mut impl Rng) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn random_poly(rng: &mut impl Rng, degree: usize) -> Poly2 {
    Poly2::from_coeffs(degree, (0..Poly2::dim(degree)).map(|_| random_c64(rng)).collect())
}

fn build_curve(c: &CurveArgs) -> Res<Curve> {
    let curve = match c.curve.as_str() {
        "line" => make_crossing(&[LinearForm::x()])?,
        "crossing" => make_crossing(&[LinearForm::x(), LinearForm::y()])?,
        "parallel" => make_crossing(&[
            LinearForm::vertical(C64::new(0.0, 0.0)),
            LinearForm::vertical(C64::new(c.sep, 0.0)),
        ])?,
        "model" => make_model_curve(C64::new(c.model_s, 0.0), None, Point2::ORIGIN)?,
        "sine" => {
            if c.nmax < 1 {
                return Err(Failure::Usage("--nmax must be at least 1".into()));
            }
            make_sine_curve(&sine_window(c.nmax))?
        }
        "comb" => make_comb(c.teeth)?,
        other => {
            return Err(Failure::Usage(format!(
                "unknown curve {other:?} (line, crossing, parallel, model, sine, comb)"
            )))
        }
    };
    Ok(curve)
}

fn curve_config(c: &CurveArgs) -> Value {
    json!({"curve": c.curve, "model-s": c.model_s, "nmax": c.nmax, "teeth": c.teeth, "sep": c.sep})
}

fn merge(mut a: Value, b: Value) -> Value {
    if let (Some(a), Value::Object(b)) = (a.as_object_mut(), b) {
        a.extend(b);
    }
    a
}

pub(crate) fn execute(cmd: &Command) -> Res<Output> {
    let seed = cmd.common().seed;
    match cmd {
        Command::Constants { j, s, eps, .. } => {
            let js = usage(parse_int_list(j))?;
            let ss = usage(parse_f64_list(s))?;
            let table = CjsTable::build(&js, &ss, *eps)?;
            let worst_err = table.entries.iter().map(|e| e.err).fold(0.0, f64::max);
            let worst_identity = table.entries.iter().filter_map(|e| e.identity_residual).fold(0.0, f64::max);
            let results = json!({"entries": to_value(&table.entries), "max_identity_residual": worst_identity});
            Ok(output(results, Some(worst_err), Some(table.to_table())))
        }
        Command::Density {
            curve,
            radii,
            centers,
            weight,
            n_mc,
            ..
        } => {
            let c = build_curve(curve)?;
            let rs = usage(parse_f64_list(radii))?;
            let zs = usage(parse_points(centers))?;
            let diag = usage(parse_f64_list(weight))?;
            if diag.len() != 2 {
                return Err(Failure::Usage("--weight needs two values".into()));
            }
            let zero = C64::new(0.0, 0.0);
            let w = Weight::quadratic([[C64::new(diag[0], 0.0), zero], [zero, C64::new(diag[1], 0.0)]])?;
            let rep = upper_density(Some(&c), &w, &rs, &zs, *n_mc, seed)?;
            let stderr = rep.rows.iter().map(|r| r.stderr).fold(0.0, f64::max);
            Ok(output(to_value(&rep), Some(stderr), Some(rep.to_table())))
        }
        Command::Flatness {
            curve,
            eps,
            region_r,
            grid,
            graph,
            area_r,
            n_mc,
            strict,
            ..
        } => {
            let c = build_curve(curve)?;
            let center_text = region_center_text(cmd).expect("flatness command");
            let center = usage(parse_point(&center_text))?;
            let graph_points = match graph {
                Some(g) => usage(parse_points(g))?,
                None => Vec::new(),
            };
            let cfg = FlatnessConfig {
                eps: *eps,
                region: Region::Ball {
                    center,
                    r: *region_r,
                },
                grid_density: *grid,
                graph_points,
                area_radius: *area_r,
                area_centers: vec![center],
                n_mc: *n_mc,
                seed,
                strict_levels: *strict,
            };
            let rep = flatness_report(&c, &cfg)?;
            let mut table = Table::new(&["eps", "passes"]);
            for (e, p) in &rep.strict {
                table.push(vec![(*e).into(), (*p).into()]);
            }
            Ok(output(to_value(&rep), Some(rep.area_stderr), Some(table)))
        }
        Command::ExtendModel {
            s,
            s_arg,
            n,
            coeffs,
            eps,
            c,
            degree,
            ..
        } => {
            let sc = C64::from_polar(*s, *s_arg);
            let mut rng = stream(seed, 0);
            let mut table = Table::new(&["side", "k", "re", "im"]);
            match eps {
                None => {
                    let a = match coeffs {
                        Some(text) => usage(parse_complex_list(text))?,
                        None => {
                            if *n == 0 {
                                return Err(Failure::Usage("--n must be at least 1".into()));
                            }
                            (0..2 * n + 1).map(|_| random_c64(&mut rng)).collect()
                        }
                    };
                    let series = LaurentSeries::from_coeffs(sc, a)?;
                    let ext = model_extend(&series)?;
                    let datum = series.datum_norm_sqr()?;
                    for (k, v) in ext.x_tail.coeffs.iter().enumerate() {
                        table.push(vec!["x".into(), k.into(), v.re.into(), v.im.into()]);
                    }
                    for (k, v) in ext.y_tail.coeffs.iter().enumerate() {
                        table.push(vec!["y".into(), k.into(), v.re.into(), v.im.into()]);
                    }
                    let ratio = if datum > 0.0 { ext.norm_sqr / datum } else { 0.0 };
                    let results = json!({
                        "laurent": to_value(&series),
                        "extension": to_value(&ext),
                        "datum_norm_sqr": datum,
                        "ratio": ratio,
                        "bound": 2.0 * PI,
                        "holds": ext.norm_sqr <= 2.0 * PI * datum * (1.0 + 1e-12),
                    });
                    Ok(output(results, None, Some(table)))
                }
                Some(e) => {
                    let center = usage(parse_point(c))?;
                    let g = random_poly(&mut rng, *degree);
                    let ext = clipped_extend(|p| g.eval(p), sc, *e, center, DEFAULT_TERMS, DEFAULT_NODES)?;
                    for (k, v) in ext.centered.x_tail.coeffs.iter().enumerate() {
                        table.push(vec!["x".into(), k.into(), v.re.into(), v.im.into()]);
                    }
                    for (k, v) in ext.centered.y_tail.coeffs.iter().enumerate() {
                        table.push(vec!["y".into(), k.into(), v.re.into(), v.im.into()]);
                    }
                    let results = json!({"datum": to_value(&g), "extension": to_value(&ext)});
                    Ok(output(results, Some(ext.laurent.residual), Some(table)))
                }
            }
        }
        Command::ExtendMin {
            curve,
            points,
            degree,
            region_r,
            constraints,
            kernel,
            ..
        } => {
            let w = Weight::gaussian();
            let (cs, source) = match constraints {
                Some(path) => (usage(read_constraints(path))?, json!({"file": path.display().to_string()})),
                None => {
                    let c = build_curve(curve)?;
                    let region = Region::Ball {
                        center: Point2::ORIGIN,
                        r: *region_r,
                    };
                    let samples = surface_samples(&c, &region, *points, seed)?;
                    let mut rng = stream(seed, 1);
                    let g = random_poly(&mut rng, (*degree).min(3));
                    let pts: Vec<Point2> = samples.points.iter().take(*points).copied().collect();
                    let vals = pts.iter().map(|p| g.eval(*p)).collect();
                    (ConstraintSet::new(pts, vals, Vec::new())?, json!({"datum": to_value(&g)}))
                }
            };
            let ext = minimal_extension(&cs, *degree, &w)?;
            let kernel_ext = if *kernel { Some(kernel_extension(&cs)?) } else { None };
            let mut table = Table::new(&["x_re", "x_im", "y_re", "y_im", "v_re", "v_im", "residual"]);
            for (p, v) in cs.points.iter().zip(&cs.values) {
                let r = p.to_reals();
                let resid = (ext.f.eval(*p) - v).norm();
                table.push(vec![r[0].into(), r[1].into(), r[2].into(), r[3].into(), v.re.into(), v.im.into(), resid.into()]);
            }
            let results = json!({
                "source": source,
                "constraint_points": points_json(&cs.points),
                "extension": to_value(&ext),
                "kernel_norm_sqr": kernel_ext.as_ref().map(|k| k.norm_sqr),
            });
            Ok(output(results, None, Some(table)))
        }
        Command::Crossing {
            forms,
            degree,
            order,
            example,
            ..
        } => {
            let lf: Vec<LinearForm> = usage(parse_groups(forms, 6))?
                .into_iter()
                .map(|v| LinearForm::new(C64::new(v[0], v[1]), C64::new(v[2], v[3]), C64::new(v[4], v[5])))
                .collect();
            let curve = make_crossing(&lf)?;
            let ord: Option<Vec<usize>> = match order {
                Some(o) => Some(
                    usage(parse_int_list(o))?
                        .into_iter()
                        .map(|i| usize::try_from(i).map_err(|_| Failure::Usage(format!("bad branch index {i}"))))
                        .collect::<Res<_>>()?,
                ),
                None => None,
            };
            let g = if *example {
                Poly2::from_terms(&[((1, 0), C64::new(1.0, 0.0)), ((0, 2), C64::new(1.0, 0.0))])
            } else {
                random_poly(&mut stream(seed, 0), *degree)
            };
            let gf = |p: Point2| g.eval(p);
            let data: Vec<BranchDatum> = (0..lf.len()).map(|_| &gf as BranchDatum).collect();
            let ext = crossing_extend(&data, &curve, *degree, ord.as_deref(), &Weight::gaussian())?;
            let mut table = Table::new(&["branch", "residual", "datum_norm_sqr"]);
            for (i, (r, d)) in ext.branch_residuals.iter().zip(&ext.branch_datum_norms).enumerate() {
                table.push(vec![i.into(), (*r).into(), (*d).into()]);
            }
            let results = json!({"datum": to_value(&g), "extension": to_value(&ext)});
            Ok(output(results, None, Some(table)))
        }
        Command::Counterexample {
            k,
            mode,
            degree,
            threshold,
            scan,
            teeth,
            n_mc,
            ..
        } => {
            let ks: Vec<usize> = usage(parse_int_list(k))?
                .into_iter()
                .map(|v| usize::try_from(v).map_err(|_| Failure::Usage(format!("bad k {v}"))))
                .collect::<Res<_>>()?;
            let m = match mode.as_str() {
                "kernel" => Mode::Kernel,
                "truncated" => Mode::Truncated { degree: *degree },
                other => return Err(Failure::Usage(format!("unknown mode {other:?} (kernel, truncated)"))),
            };
            let growth = growth_table(&ks, m, *threshold)?;
            let density = match scan {
                Some(radii) => {
                    let rs = usage(parse_f64_list(radii))?;
                    Some(comb_density_scan(*teeth, &rs, &[Point2::ORIGIN], *n_mc, seed)?)
                }
                None => None,
            };
            let results = json!({"growth": to_value(&growth), "density": density.as_ref().map(to_value)});
            Ok(output(results, None, Some(growth.to_table())))
        }
        Command::Reproduce { only, .. } => {
            let ids: Vec<usize> = usage(parse_int_list(only))?
                .into_iter()
                .map(|v| match usize::try_from(v) {
                    Ok(i @ 1..=12) => Ok(i),
                    _ => Err(Failure::Usage(format!("no criterion {v} (1..12)"))),
                })
                .collect::<Res<_>>()?;
            let outcomes = run_all(&ids, seed);
            let mut table = Table::new(&["criterion", "title", "passed"]);
            for o in &outcomes {
                table.push(vec![o.id.into(), o.title.into(), o.passed.into()]);
            }
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            let mut lines: Vec<String> = outcomes.iter().map(|o| o.line()).collect();
            lines.push(format!("{} passed, {failed} failed", outcomes.len() - failed));
            let mut checks: Vec<Value> = Vec::new();
            for o in &outcomes {
                // runtimes stay out of the report unless --timing is set
                let mut v = to_value(o);
                if !cmd.common().timing {
                    v["runtime_s"] = Value::Null;
                }
                checks.push(v);
            }
            let results = json!({"criteria": checks, "passed": outcomes.len() - failed, "failed": failed});
            Ok(Output {
                results,
                stderr: None,
                table: Some(table),
                lines,
                exit: if failed > 0 { EXIT_ACCEPTANCE } else { EXIT_OK },
            })
        }
    }
}

/// Reads `x_re,x_im,y_re,y_im,v_re,v_im` rows; `#` lines and a header are skipped.
fn read_constraints(path: &Path) -> std::result::Result<ConstraintSet, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut points = Vec::new();
    let mut values = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(|c: char| c.is_ascii_alphabetic()) {
            continue;
        }
        let v = parse_f64_list(line).map_err(|e| format!("{}:{}: {e}", path.display(), n + 1))?;
        if v.len() != 6 {
            return Err(format!("{}:{}: expected 6 columns", path.display(), n + 1));
        }
        points.push(Point2::from_reals([v[0], v[1], v[2], v[3]]));
        values.push(C64::new(v[4], v[5]));
    }
    ConstraintSet::new(points, values, Vec::new()).map_err(|e| e.to_string())
}

/// Effective flag values of `cmd`, keyed by flag name so they can be fed back through `--config`.
pub(crate) fn config_of(cmd: &Command) -> Value {
    let seed = cmd.common().seed;
    match cmd {
        Command::Constants { j, s, eps, .. } => json!({"j": j, "s": s, "eps": eps, "seed": seed}),
        Command::Density {
            curve,
            radii,
            centers,
            weight,
            n_mc,
            ..
        } => merge(
            curve_config(curve),
            json!({"radii": radii, "centers": centers, "weight": weight, "n-mc": n_mc, "seed": seed}),
        ),
        Command::Flatness {
            curve,
            eps,
            region_r,
            grid,
            graph,
            area_r,
            n_mc,
            strict,
            ..
        } => merge(
            curve_config(curve),
            json!({
                "eps": eps, "region-r": region_r, "region-center": region_center_text(cmd), "grid": grid,
                "graph": graph, "area-r": area_r, "n-mc": n_mc, "strict": strict, "seed": seed,
            }),
        ),
        Command::ExtendModel {
            s,
            s_arg,
            n,
            coeffs,
            eps,
            c,
            degree,
            ..
        } => json!({
            "s": s, "s-arg": s_arg, "n": n, "coeffs": coeffs, "eps": eps, "c": c,
            "degree": degree, "seed": seed,
        }),
        Command::ExtendMin {
            curve,
            points,
            degree,
            region_r,
            constraints,
            kernel,
            ..
        } => merge(
            curve_config(curve),
            json!({
                "points": points, "degree": degree, "region-r": region_r,
                "constraints": constraints.as_ref().map(|p| p.display().to_string()),
                "kernel": kernel, "seed": seed,
            }),
        ),
        Command::Crossing {
            forms,
            degree,
            order,
            example,
            ..
        } => json!({"forms": forms, "degree": degree, "order": order, "example": example, "seed": seed}),
        Command::Counterexample {
            k,
            mode,
            degree,
            threshold,
            scan,
            teeth,
            n_mc,
            ..
        } => json!({
            "k": k, "mode": mode, "degree": degree, "threshold": threshold, "scan": scan,
            "teeth": teeth, "n-mc": n_mc, "seed": seed,
        }),
        Command::Reproduce { only, .. } => json!({"only": only, "seed": seed}),
    }
}

fn region_center_text(cmd: &Command) -> Option<String> {
    match cmd {
        Command::Flatness {
            curve, region_center, ..
        } => Some(match region_center {
            Some(t) => t.clone(),
            None if curve.curve == "sine" => format!("0,0,{},0", curve.nmax as f64 * PI),
            None => "0,0,0,0".into(),
        }),
        _ => None,
    }
}
