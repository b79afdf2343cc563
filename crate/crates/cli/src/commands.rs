use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context};
use num_bigint::BigInt;
use serde_json::{json, Value};

use quadfib::config::{search_u, Admissibility, Policy, Witness};
use quadfib::fibration::{classify_fibre, count_y_stratified, y_polynomial, ModelSpec};
use quadfib::gf::{Elem, Field};
use quadfib::lefschetz::{congruence_check, fit_polys, model_betti_table, CountSeries};
use quadfib::quadform::QuadForm;
use quadfib::resolution::{count_resolved, ledger_polynomials, node_centers, qmap_certify, singular_census};
use quadfib::symbols::{all_lines, residue_report};
use quadfib_verify::{a2_hypersurface_bound, default_witnesses, verify_all, CheckRow, VerifyError, VerifyOptions};

use crate::{AdmissibilityArg, Cli, Command, PolicyArg, Space};

pub enum Failure {
    Input(anyhow::Error),
    Budget(anyhow::Error),
}

trait OrFail<T> {
    fn or_fail(self) -> Result<T, Failure>;
}

impl<T, E: Into<VerifyError>> OrFail<T> for Result<T, E> {
    fn or_fail(self) -> Result<T, Failure> {
        self.map_err(|e| {
            let e: VerifyError = e.into();
            if e.is_budget() {
                Failure::Budget(e.into())
            } else {
                Failure::Input(e.into())
            }
        })
    }
}

fn input<T>(r: anyhow::Result<T>) -> Result<T, Failure> {
    r.map_err(Failure::Input)
}

/// First line that is neither blank nor a `#` comment.
fn read_witness(path: &Path) -> anyhow::Result<Witness> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let line = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .ok_or_else(|| anyhow!("{}: no witness line", path.display()))?;
    Ok(line.parse()?)
}

fn load_model(path: &Path) -> Result<ModelSpec, Failure> {
    let w = input(read_witness(path))?;
    ModelSpec::from_witness(&w).or_fail()
}

fn emit(cli: &Cli, report: &Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(report).expect("json values serialize");
    match &cli.out {
        Some(path) => input(fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn codes(f: &Field, s: &str) -> anyhow::Result<Vec<Elem>> {
    s.split(',')
        .map(|t| {
            let c: u32 = t.trim().parse().with_context(|| format!("element code {t:?}"))?;
            f.elem(c).ok_or_else(|| anyhow!("element code {c} out of range for F_{}", f.q()))
        })
        .collect()
}

pub fn run(cli: &Cli) -> Result<bool, Failure> {
    let (report, ok) = match &cli.command {
        Command::SearchConfig { field, policy, admissibility, seed, tries, count_all, witness_out } => {
            let f = Field::from_spec_str(field).or_fail()?;
            let policy = match policy {
                PolicyArg::Exhaustive => Policy::Exhaustive,
                PolicyArg::Random => Policy::Random { seed: *seed, tries: *tries },
            };
            let adm = match admissibility {
                AdmissibilityArg::Strict => Admissibility::Strict,
                AdmissibilityArg::Generic => Admissibility::Generic,
            };
            let r = search_u(&f, policy, adm, *count_all);
            let witness =
                r.witness.map(|(l1, l2)| Witness { p: f.p(), e: f.e(), a: f.smallest_nonsquare(), l1, l2 });
            if let (Some(w), Some(path)) = (&witness, witness_out) {
                input(fs::write(path, format!("{w}\n")).with_context(|| format!("writing {}", path.display())))?;
            }
            let report = json!({
                "field": field,
                "policy": r.policy,
                "admissibility": r.admissibility,
                "single_l_passing": r.block_valid,
                "box_size": r.box_size.to_string(),
                "tried": r.tried.to_string(),
                "valid_count": r.valid_count.map(|c| c.to_string()),
                "witness": witness.map(|w| w.to_string()),
                "exhausted": r.exhausted(),
            });
            (report, !r.exhausted())
        }
        Command::VerifyBound { seed } => {
            let opts = VerifyOptions { budget: cli.budget, seed: *seed, ..Default::default() };
            let row = a2_hypersurface_bound(&opts).or_fail()?;
            let ok = row.passed();
            (serde_json::to_value(&row).expect("row serializes"), ok)
        }
        Command::Count { space, witness, ext, point } => count(cli, *space, witness, &ext.0, point.as_deref())?,
        Command::QuadCount { field, diag, ext, brute } => {
            let f = Field::from_spec_str(field).or_fail()?;
            let form = QuadForm::diag(&input(codes(&f, diag))?);
            let mut rows = Vec::new();
            let mut ok = true;
            for &m in &ext.0 {
                let closed = form.count_projective_points(&f, m).or_fail()?;
                let enumerated = if *brute { Some(form.count_brute(&f, m, cli.budget).or_fail()?) } else { None };
                ok &= enumerated.map_or(true, |b| BigInt::from(b) == closed);
                rows.push(json!({ "m": m, "closed_form": closed.to_string(), "brute": enumerated }));
            }
            let poly = form.count_polynomial(&f).or_fail()?;
            (json!({ "field": field, "diag": diag, "invariants": form.invariants(&f), "polynomial": poly, "counts": rows }), ok)
        }
        Command::SingularCensus { witness, ext } => {
            let ms = load_model(witness)?;
            let mut rows = Vec::new();
            let mut ok = true;
            for &m in &ext.0 {
                let r = singular_census(&ms, m, cli.budget).or_fail()?;
                ok &= r.equal;
                rows.push(json!({
                    "m": m,
                    "observed": r.observed,
                    "expected": r.expected,
                    "missing": r.missing.len(),
                    "extra": r.extra.len(),
                    "by_stratum": r.by_stratum,
                    "first_missing": r.missing.first(),
                    "first_extra": r.extra.first(),
                    "equal": r.equal,
                }));
            }
            (json!({ "witness": ms.witness().to_string(), "census": rows }), ok)
        }
        Command::QmapCertify { witness } => {
            let ms = load_model(witness)?;
            let c = qmap_certify(&ms).or_fail()?;
            let ok = c.ok;
            (json!({ "witness": ms.witness().to_string(), "certificate": c }), ok)
        }
        Command::BettiCheck { space, witness, ext } => betti(cli, space, witness.as_deref(), &ext.0)?,
        Command::Residues { witness } => {
            let ms = load_model(witness)?;
            let f = &ms.field;
            let rep = residue_report(f, ms.a, &ms.cfg, &all_lines(f));
            let lines: Vec<&quadfib::symbols::LineResidue> =
                rep.lines.iter().filter(|r| r.in_l || r.residue.is_some() || r.error.is_some()).collect();
            let verdict = format!("xi != 0 certified: {}", if rep.certified { "yes" } else { "no" });
            let report = json!({
                "witness": ms.witness().to_string(),
                "lines_checked": rep.lines.len(),
                "outside_zero": rep.outside_zero,
                "reciprocity": rep.reciprocity_ok,
                "witness_line": rep.witness.map(|l| l.to_string()),
                "lines": lines,
                "verdict": verdict,
            });
            (report, rep.certified)
        }
        Command::VerifyAll { witness, only, csv, seed } => {
            let witnesses = match witness {
                Some(p) => vec![input(read_witness(p))?],
                None => default_witnesses(),
            };
            let opts = VerifyOptions { budget: cli.budget, seed: *seed, witnesses };
            let ids: Option<Vec<&str>> = only.as_deref().map(|s| s.split(',').map(str::trim).collect());
            let rows = verify_all(&opts, ids.as_deref()).or_fail()?;
            for r in &rows {
                let mark = if r.passed() { "PASS" } else { "FAIL" };
                println!("{:<4} {mark}  {:>7.1}s  {}", r.id, r.elapsed.as_secs_f64(), r.claim);
            }
            if let Some(path) = csv {
                input(write_csv(path, &rows))?;
            }
            let ok = rows.iter().all(CheckRow::passed);
            let report = serde_json::to_value(&rows).expect("rows serialize");
            if cli.out.is_some() {
                emit(cli, &report)?;
            }
            return Ok(ok);
        }
    };
    emit(cli, &report)?;
    Ok(ok)
}

fn write_csv(path: &Path, rows: &[CheckRow]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    w.write_record(["id", "verdict", "claim", "inputs", "observed", "expected"])?;
    for r in rows {
        let verdict = if r.passed() { "pass" } else { "fail" };
        w.write_record([
            r.id.as_str(),
            verdict,
            r.claim.as_str(),
            &r.inputs.to_string(),
            &r.observed.to_string(),
            &r.expected.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn count(cli: &Cli, space: Space, witness: &Path, ext: &[u32], point: Option<&str>) -> Result<(Value, bool), Failure> {
    let ms = load_model(witness)?;
    let q = ms.field.q() as u64;
    let mut rows = Vec::new();
    let mut ok = true;
    for &m in ext {
        let row = match space {
            Space::Y => {
                let c = count_y_stratified(&ms, m).or_fail()?;
                let poly = y_polynomial(&ms, m).or_fail()?;
                ok &= poly.eval(q, m) == c.total;
                json!({ "m": m, "count": c.total.to_string(), "polynomial": poly.to_string(), "strata": c.strata })
            }
            Space::Y1 | Space::Y0 | Space::X => {
                let r = count_resolved(&ms, m, cli.budget).or_fail()?;
                let lp = ledger_polynomials(&ms, m).or_fail()?;
                let (c, poly) = match space {
                    Space::Y1 => (r.y1.clone(), lp.y1),
                    Space::Y0 => (r.y0.clone(), lp.y0),
                    _ => (r.x.clone(), lp.x),
                };
                ok &= r.agree;
                json!({ "m": m, "count": c.to_string(), "polynomial": poly.to_string(), "tallies": r.tallies, "cross_checks_agree": r.agree })
            }
            Space::Fibre => {
                let p = point.ok_or_else(|| Failure::Input(anyhow!("--space fibre needs --point x,y,z")))?;
                let v = input(codes(&ms.field, p))?;
                let [x, y, z]: [Elem; 3] = v.try_into().map_err(|_| Failure::Input(anyhow!("point needs three coordinates")))?;
                if [x, y, z].iter().all(|c| c.is_zero()) {
                    return Err(Failure::Input(anyhow!("the zero vector is not a point")));
                }
                let model = ms.over(m).or_fail()?;
                let pt = [x, y, z].map(|c| model.emb.map(c));
                let class = classify_fibre(&ms, m, &pt).or_fail()?;
                let fibre = model.fibre_count(&class);
                json!({ "m": m, "class": class, "count": fibre.to_string() })
            }
        };
        rows.push(row);
    }
    Ok((json!({ "witness": ms.witness().to_string(), "space": format!("{space:?}"), "counts": rows }), ok))
}

fn betti(cli: &Cli, space: &str, witness: Option<&Path>, ext: &[u32]) -> Result<(Value, bool), Failure> {
    if space.starts_with('C') {
        let rows = model_betti_table(&[3, 5, 7], &[2, 4], cli.budget.min(1 << 20)).or_fail()?;
        let row = rows
            .into_iter()
            .find(|r| r.name == space)
            .ok_or_else(|| Failure::Input(anyhow!("unknown model {space:?}")))?;
        let ok = row.ok;
        let verdict = if ok { "pass" } else { "fail" };
        return Ok((json!({ "space": space, "fit": row, "congruences": Value::Null, "verdict": verdict }), ok));
    }
    let path = witness.ok_or_else(|| Failure::Input(anyhow!("--space {space} needs --witness")))?;
    let ms = load_model(path)?;
    let q = ms.field.q() as u64;
    let mut polys = Vec::new();
    for &m in ext {
        let p = match space {
            "Y" => y_polynomial(&ms, m).or_fail()?,
            "Y1" => ledger_polynomials(&ms, m).or_fail()?.y1,
            "X" => ledger_polynomials(&ms, m).or_fail()?.x,
            _ => return Err(Failure::Input(anyhow!("unknown space {space:?}"))),
        };
        polys.push((m, p));
    }
    let series = CountSeries { label: space.into(), q, counts: polys.iter().map(|(m, p)| (*m, p.eval(q, *m))).collect() };
    let congruences = match space {
        "Y" => Some(congruence_check(&series, |_| 2)),
        "Y1" => {
            let d = node_centers(&ms, &ms.over(1).or_fail()?).len() as i64;
            Some(congruence_check(&series, move |_| 2 + d))
        }
        _ => None,
    };
    // two orbit periods need at least two degrees
    let fit = if ext.len() >= 2 { Some(fit_polys(space, q, &polys, &[1, 2], ext).or_fail()?) } else { None };
    let ok = congruences.as_ref().map_or(true, |c| c.ok) && fit.as_ref().map_or(true, |f| f.consistent && f.integral);
    let verdict = if ok { "pass" } else { "fail" };
    let b2: Vec<(u32, String)> = congruences
        .as_ref()
        .map(|c| c.rows.iter().map(|r| (r.m, r.observed_b2.to_string())).collect())
        .unwrap_or_default();
    Ok((
        json!({
            "witness": ms.witness().to_string(),
            "space": space,
            "polynomials": polys.iter().map(|(m, p)| (m, p.to_string())).collect::<Vec<_>>(),
            "b2": b2,
            "congruences": congruences,
            "fit": fit,
            "verdict": verdict,
        }),
        ok,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use quadfib::config::LinearForm;

    #[test]
    fn reads_witness_after_comments() {
        let dir = std::env::temp_dir().join(format!("qfib-cli-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let p = dir.join("w.txt");
        fs::write(&p, "# F_25 witness\n\n5^2; 2; 1,2,6; 10,2,14\n").unwrap();
        let w = read_witness(&p).unwrap();
        assert_eq!(w.l2, LinearForm::new(Elem(10), Elem(2), Elem(14)));
        fs::remove_dir_all(&dir).unwrap();
    }
}
