//! Report assembly and rendering for each subcommand.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, Context};
use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use shtuka_core::galois::{openness_report_in, unit_group_capped};
use shtuka_core::field::prime_power;
use shtuka_core::{
    associate_local_shtuka, det_criterion, rank_one_normalize, BaseRingSpec, DetCriterion, Error, FieldSpec,
    MotiveOverT, OpennessReport, PlaceData, Ring, TowerSpec, EXACT,
};

use crate::Format;

/// A rendered-on-demand report plus the status it implies.
pub struct Outcome {
    json: String,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    table: String,
    /// Human-readable summary, printed to stderr for machine formats.
    pub summary: Option<String>,
    pub diagnostics: Vec<String>,
    check_failed: bool,
    errored: bool,
}

impl Outcome {
    pub fn render(&self, format: Format) -> anyhow::Result<String> {
        match format {
            Format::Json => Ok(format!("{}\n", self.json)),
            Format::Table => Ok(self.table.clone()),
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.header)?;
                for row in &self.rows {
                    w.write_record(row)?;
                }
                Ok(String::from_utf8(w.into_inner().map_err(|e| anyhow!("{e}"))?)?)
            }
        }
    }

    pub fn exit_code(&self) -> u8 {
        if self.errored {
            2
        } else if self.check_failed {
            1
        } else {
            0
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

fn residue_field(q: u64) -> anyhow::Result<FieldSpec> {
    let (p, m) = prime_power(q).ok_or_else(|| anyhow!("q = {q} must be an odd prime power"))?;
    if p == 2 {
        return Err(anyhow!("q = {q} must be an odd prime power: {}", Error::EvenCharacteristic));
    }
    Ok(FieldSpec::new(p, m, None)?)
}

#[derive(Serialize)]
struct TowerReport {
    command: &'static str,
    q_v: u64,
    p: u64,
    level: u32,
    zeta_prec: i64,
    z_prec: i64,
    degree: u64,
    expected_degree: u64,
    generator_valuations: Vec<String>,
    expected_valuations: Vec<String>,
    /// `σ(l_+) - (z - ζ) l_+` vanishes modulo `z^{n+1}`.
    carlitz_residual_zero: bool,
    residual_prec: i64,
    value_group_index: u64,
    totally_ramified: bool,
    /// Frobenius as a ring homomorphism agrees with `a ↦ a^{q_v}` on generators.
    frobenius_consistent: bool,
}

fn ratio(r: Ratio<i64>) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn tower(q: u64, level: u32, zeta_prec: i64, z_prec: i64) -> anyhow::Result<Outcome> {
    let field = residue_field(q)?;
    let base = BaseRingSpec::new(field.clone(), zeta_prec, z_prec)?;
    let t = TowerSpec::build(&base, level)?;
    let valuations = (0..=level).map(|i| t.valuation(&t.gen(i))).collect::<Result<Vec<_>, _>>()?;
    let expected: Vec<Ratio<i64>> = (0..=level).map(|i| Ratio::new(1, ((q - 1) * q.pow(i)) as i64)).collect();
    let zr = t.z_ring();
    let lp = t.l_plus();
    let zmz = zr.make(0, vec![t.neg(&t.zeta_pow(1)), t.one()], EXACT);
    let residual = zr.sub(&zr.frobenius(&lp, q), &zr.mul(&zmz, &lp));
    let frobenius_consistent = (0..=level).all(|i| {
        let g = t.gen(i);
        t.eq_to_prec(&t.frobenius_hom(&g), &t.frobenius_pow(&g))
    });
    let value_group_index = t.value_group_index()?;
    let degree = t.degree() as u64;
    let rep = TowerReport {
        command: "tower",
        q_v: q,
        p: field.p(),
        level,
        zeta_prec,
        z_prec,
        degree,
        expected_degree: (q - 1) * q.pow(level),
        generator_valuations: valuations.iter().map(|&r| ratio(r)).collect(),
        expected_valuations: expected.iter().map(|&r| ratio(r)).collect(),
        carlitz_residual_zero: zr.is_zero(&residual),
        residual_prec: residual.prec(),
        value_group_index,
        totally_ramified: value_group_index == degree,
        frobenius_consistent,
    };
    let mut diagnostics = Vec::new();
    if rep.degree != rep.expected_degree {
        diagnostics.push(format!("check failed: degree {} != {}", rep.degree, rep.expected_degree));
    }
    if valuations != expected {
        diagnostics.push("check failed: generator valuations differ from 1/((q-1) q^i)".into());
    }
    if !rep.carlitz_residual_zero {
        diagnostics.push("check failed: σ(l_+) - (z - ζ) l_+ is nonzero".into());
    }
    if !rep.totally_ramified {
        diagnostics.push("check failed: value-group index differs from the degree".into());
    }
    if !rep.frobenius_consistent {
        diagnostics.push("check failed: Frobenius homomorphism differs from q_v-th power".into());
    }
    let header = vec![
        "q_v",
        "p",
        "level",
        "zeta_prec",
        "z_prec",
        "degree",
        "generator_valuations",
        "carlitz_residual_zero",
        "value_group_index",
        "totally_ramified",
    ];
    let row = vec![
        q.to_string(),
        rep.p.to_string(),
        level.to_string(),
        zeta_prec.to_string(),
        z_prec.to_string(),
        degree.to_string(),
        rep.generator_valuations.join(";"),
        rep.carlitz_residual_zero.to_string(),
        value_group_index.to_string(),
        rep.totally_ramified.to_string(),
    ];
    let mut table = String::new();
    for (k, v) in header.iter().zip(&row) {
        writeln!(table, "{k:<22} {v}")?;
    }
    Ok(Outcome {
        json: to_json(&rep)?,
        header,
        rows: vec![row],
        table,
        summary: None,
        check_failed: !diagnostics.is_empty(),
        diagnostics,
        errored: false,
    })
}

#[derive(Serialize)]
struct SweepPoint {
    d: u64,
    n: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<OpennessReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct OpennessDoc<'a> {
    command: &'static str,
    q_v: u64,
    d: &'a [u64],
    levels: &'a [u32],
    /// All points computed without error.
    complete: bool,
    points: &'a [SweepPoint],
}

pub fn openness(q: u64, ds: &[u64], levels: &[u32], cap: u128) -> anyhow::Result<Outcome> {
    let field = residue_field(q)?;
    let groups: Vec<_> = levels.par_iter().map(|&n| unit_group_capped(&field, n, cap)).collect();
    let jobs: Vec<(u64, usize)> = ds.iter().flat_map(|&d| (0..levels.len()).map(move |i| (d, i))).collect();
    let points: Vec<SweepPoint> = jobs
        .par_iter()
        .map(|&(d, i)| {
            let n = levels[i];
            match groups[i].as_ref().map_err(Clone::clone).and_then(|g| openness_report_in(g, d)) {
                Ok(r) => SweepPoint { d, n, report: Some(r), error: None },
                Err(e) => SweepPoint { d, n, report: None, error: Some(e.to_string()) },
            }
        })
        .collect();

    let mut diagnostics = Vec::new();
    for pt in &points {
        match (&pt.report, &pt.error) {
            (Some(r), _) if !(r.contained && r.open_in_ambient && r.kernel_bound) => diagnostics.push(format!(
                "check failed at d={}, n={}: contained={}, index {} vs d'={}, kernel {}",
                pt.d, pt.n, r.contained, r.index, r.d_prime, r.kernel_order
            )),
            (_, Some(e)) => diagnostics.push(format!("error at d={}, n={}: {e} (partial output)", pt.d, pt.n)),
            _ => {}
        }
    }
    let complete = points.iter().all(|p| p.error.is_none());

    let header = vec![
        "q_v",
        "p",
        "n",
        "d",
        "e",
        "d_prime",
        "full_order",
        "image_order",
        "ambient_order",
        "index",
        "full_index",
        "contained",
        "open_in_full",
        "open_in_ambient",
        "kernel_order",
        "kernel_bound",
        "error",
    ];
    let rows = points
        .iter()
        .map(|pt| match &pt.report {
            Some(r) => vec![
                r.q_v.to_string(),
                r.p.to_string(),
                r.n.to_string(),
                r.d.to_string(),
                r.e.to_string(),
                r.d_prime.to_string(),
                r.full_order.to_string(),
                r.image_order.to_string(),
                r.ambient_order.to_string(),
                r.index.to_string(),
                r.full_index.to_string(),
                r.contained.to_string(),
                r.open_in_full.to_string(),
                r.open_in_ambient.to_string(),
                r.kernel_order.to_string(),
                r.kernel_bound.to_string(),
                String::new(),
            ],
            None => {
                let mut row = vec![String::new(); header.len()];
                row[0] = q.to_string();
                row[2] = pt.n.to_string();
                row[3] = pt.d.to_string();
                row[header.len() - 1] = pt.error.clone().unwrap_or_default();
                row
            }
        })
        .collect();

    // index in the ambient / index in the full group, d down, n across
    let mut table = format!("q_v = {q}: index in z^(p^e)-ambient / index in full group\n{:>6}", "d \\ n");
    for n in levels {
        write!(table, " {n:>12}")?;
    }
    table.push('\n');
    for (row_d, chunk) in ds.iter().zip(points.chunks(levels.len())) {
        write!(table, "{row_d:>6}")?;
        for pt in chunk {
            let cell = match &pt.report {
                Some(r) => format!("{}/{}", r.index, r.full_index),
                None => "error".into(),
            };
            write!(table, " {cell:>12}")?;
        }
        table.push('\n');
    }

    let doc = OpennessDoc { command: "openness", q_v: q, d: ds, levels, complete, points: &points };
    Ok(Outcome {
        json: to_json(&doc)?,
        header,
        rows,
        summary: Some(table.clone()),
        table,
        check_failed: !diagnostics.is_empty(),
        diagnostics,
        errored: !complete,
    })
}

#[derive(Serialize)]
struct NormalFormSummary {
    d: i64,
    residue_ext: u32,
    eff_valuation: u32,
}

#[derive(Serialize)]
struct MotiveReport {
    command: &'static str,
    input: String,
    zeta_prec: i64,
    z_prec: i64,
    rank: usize,
    dim: i64,
    twist: i64,
    det_valuation: u32,
    place: PlaceData,
    criterion: DetCriterion,
    #[serde(skip_serializing_if = "Option::is_none")]
    normal_form: Option<NormalFormSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    normal_form_error: Option<String>,
}

pub fn motive(input: &Path, zeta_prec: i64, residue_ext: u32, max_ext: u32) -> anyhow::Result<Outcome> {
    let mot = MotiveOverT::from_path(input).with_context(|| format!("reading {}", input.display()))?;
    let (m, place) = associate_local_shtuka(&mot, zeta_prec)?;
    let criterion = det_criterion(&m)?;
    let mut diagnostics = Vec::new();
    let (normal_form, normal_form_error) = if m.rank() == 1 {
        match rank_one_normalize(&m, residue_ext, max_ext) {
            Ok(nf) => {
                if nf.d != m.dim() {
                    diagnostics.push(format!("check failed: normal form dimension {} != {}", nf.d, m.dim()));
                }
                let s = nf.trivialization.s;
                (Some(NormalFormSummary { d: nf.d, residue_ext: s, eff_valuation: nf.eff_valuation }), None)
            }
            Err(e @ Error::ResidueNotSolvable { .. }) => (None, Some(e.to_string())),
            Err(e) => return Err(e.into()),
        }
    } else {
        (None, None)
    };
    let rep = MotiveReport {
        command: "motive",
        input: input.display().to_string(),
        zeta_prec,
        z_prec: place.z_prec,
        rank: m.rank(),
        dim: m.dim(),
        twist: m.twist(),
        det_valuation: m.det_valuation(),
        place,
        criterion,
        normal_form,
        normal_form_error,
    };
    let header = vec!["input", "rank", "dim", "f_v", "q_v", "zeta_prec", "z_prec", "verdict", "normal_form_d"];
    let row = vec![
        rep.input.clone(),
        rep.rank.to_string(),
        rep.dim.to_string(),
        rep.place.f_v.to_string(),
        rep.place.q_v.to_string(),
        zeta_prec.to_string(),
        rep.z_prec.to_string(),
        format!("{:?}", rep.criterion.verdict),
        rep.normal_form.as_ref().map(|n| n.d.to_string()).unwrap_or_default(),
    ];
    let mut table = String::new();
    for (k, v) in header.iter().zip(&row) {
        writeln!(table, "{k:<14} {v}")?;
    }
    Ok(Outcome {
        json: to_json(&rep)?,
        header,
        rows: vec![row],
        table,
        summary: None,
        check_failed: !diagnostics.is_empty(),
        diagnostics,
        errored: false,
    })
}

pub fn selftest(only: &[String]) -> Outcome {
    let results = shtuka_core::selftest::run(only);
    let failed = results.iter().any(|r| !r.passed);
    let mut table = format!("{:<22} {:<9} {:<6} {:>8}  {}\n", "suite", "params", "result", "ms", "detail");
    for r in &results {
        let verdict = if r.passed { "PASS" } else { "FAIL" };
        table.push_str(&format!(
            "{:<22} {:<9} {:<6} {:>8}  {}\n",
            r.suite, r.params, verdict, r.millis, r.detail
        ));
    }
    let passed = results.iter().filter(|r| r.passed).count();
    table.push_str(&format!("{passed}/{} passed\n", results.len()));
    let header = vec!["suite", "params", "passed", "detail"];
    let rows = results
        .iter()
        .map(|r| vec![r.suite.to_string(), r.params.clone(), r.passed.to_string(), r.detail.clone()])
        .collect();
    Outcome {
        json: serde_json::to_string_pretty(&results).expect("selftest rows serialize"),
        header,
        rows,
        table,
        summary: None,
        diagnostics: Vec::new(),
        check_failed: failed,
        errored: false,
    }
}
