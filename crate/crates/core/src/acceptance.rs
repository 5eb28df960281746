//! The fifteen acceptance checks, shared by the test suite and `weylhyp selftest`.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::correspond::*;
use crate::coxeter::*;
use crate::error::{Error, Result};
use crate::exactalg::*;
use crate::hypnum::*;
use crate::sample::Sampler;

#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "[{mark}] {:>2} {}: {} ({:.2} s)", self.id, self.name, self.detail, self.seconds)
    }
}

type Check = fn(u64) -> Result<(bool, String)>;

pub const CRITERIA: [(u8, &str, Check); 15] = [
    (1, "coset census", coset_census),
    (2, "group orders", group_orders),
    (3, "coxeter presentation", coxeter_presentation),
    (4, "Q-orbits", q_orbits),
    (5, "equivariance", equivariance),
    (6, "metric suite", metric_suite),
    (7, "compression", compression),
    (8, "triple censuses", triple_censuses),
    (9, "gamma layer", gamma_layer),
    (10, "invariances", invariances),
    (11, "L cross-representation", cross_representation),
    (12, "relations", relations),
    (13, "limits", limits),
    (14, "reference table", appendix),
    (15, "222 pipeline", pipeline),
];

pub fn run(id: u8, seed: u64) -> Result<Outcome> {
    let (id, name, check) = CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .ok_or_else(|| Error::Precondition(format!("no criterion {id}; expected 1..=15")))?;
    let t = Instant::now();
    let (pass, detail) = match check(seed) {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    Ok(Outcome { id: *id, name, pass, detail, seconds: t.elapsed().as_secs_f64() })
}

pub fn run_all(seed: u64) -> Vec<Outcome> {
    CRITERIA.iter().map(|c| run(c.0, seed).expect("listed criterion")).collect()
}

fn within(t: Instant, limit: Duration) -> bool {
    t.elapsed() <= limit
}

/// Peak resident set size in bytes, where the platform reports it.
pub fn peak_rss_bytes() -> Option<u64> {
    let s = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = s.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024)
}

fn coset_census(_: u64) -> Result<(bool, String)> {
    let t = Instant::now();
    let n = m_coset_census();
    Ok((n == 56 && within(t, Duration::from_secs(1)), format!("{n} labels")))
}

fn group_orders(_: u64) -> Result<(bool, String)> {
    let t = Instant::now();
    let want = [
        (NamedGroup::GJ, 720),
        (NamedGroup::GL, 1920),
        (NamedGroup::H1, 23040),
        (NamedGroup::Q, 23040),
        (NamedGroup::G, 51840),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (g, n) in want {
        let got = group_order(g, false)?;
        ok &= got == n;
        parts.push(format!("|{}|={got}", g.name()));
    }
    ok &= within(t, Duration::from_secs(120));
    if let Some(rss) = peak_rss_bytes() {
        let small = rss < 1 << 30;
        ok &= small;
        parts.push(format!("peak rss {} 1 GB", if small { "below" } else { "above" }));
    }
    Ok((ok, parts.join(" ")))
}

fn coxeter_presentation(_: u64) -> Result<(bool, String)> {
    let mut pairs = 0;
    for gens in [&W_GENS[..], &V_GENS[..]] {
        for &g in gens {
            for &h in gens {
                let m = coxeter_exponent(g, h).expect("same side");
                let p = g.matrix().mul(&h.matrix());
                if !p.pow(m).is_identity() || (m > 1 && p.pow(m - 1).is_identity()) {
                    return Ok((false, format!("({g} {h}) does not have order {m}")));
                }
                pairs += 1;
            }
        }
    }
    Ok((true, format!("{pairs} ordered pairs")))
}

fn q_orbits(_: u64) -> Result<(bool, String)> {
    let [blue, red, j] = orbits_q();
    let sizes = (blue.len(), red.len(), j.len());
    let mut want_blue = BTreeSet::new();
    let mut want_red = BTreeSet::new();
    for k in 2..=7 {
        want_blue.extend([MLabel::pos(0, k), MLabel::neg(1, k)]);
        want_red.extend([MLabel::pos(1, k), MLabel::neg(0, k)]);
    }
    let mut want_j = BTreeSet::from([MLabel::pos(0, 1), MLabel::neg(0, 1)]);
    for i in 2..=7 {
        for k in i + 1..=7 {
            want_j.extend([MLabel::pos(i, k), MLabel::neg(i, k)]);
        }
    }
    let members = blue.into_iter().collect::<BTreeSet<_>>() == want_blue
        && red.into_iter().collect::<BTreeSet<_>>() == want_red
        && j.into_iter().collect::<BTreeSet<_>>() == want_j;
    Ok((sizes == (12, 12, 32) && members, format!("sizes {sizes:?}, membership {}", if members { "exact" } else { "differs" })))
}

fn equivariance(_: u64) -> Result<(bool, String)> {
    let mut n = 0;
    for g in Q_GENS {
        let h = m_iso(g)?;
        for t in MLabel::all() {
            let (_, lhs) = gamma1(act_m(g, t));
            let rhs = act_t(h, gamma1(t).1);
            if lhs != rhs {
                return Ok((false, format!("{g} on {t}: {lhs} vs {rhs}")));
            }
            n += 1;
        }
    }
    Ok((true, format!("{n} generator-label pairs")))
}

fn metric_suite(_: u64) -> Result<(bool, String)> {
    let all = MLabel::all();
    for &u in &all {
        for &v in &all {
            let d = dd(u, v);
            if ![0, 2, 4, 6].contains(&d) || d + dd(u, central_m(v)) != 6 || d != dd_by_cases(u, v) {
                return Ok((false, format!("dd({u},{v}) = {d}")));
            }
            if let Some(g) = W_GENS.iter().find(|&&g| dd(act_m(g, u), act_m(g, v)) != d) {
                return Ok((false, format!("{g} changes dd({u},{v})")));
            }
        }
    }
    Ok((true, format!("{} pairs, case table agrees", all.len() * all.len())))
}

fn compression(_: u64) -> Result<(bool, String)> {
    let all = MLabel::all();
    for &u in &all {
        for &v in &all {
            let (cu, su) = gamma1(u);
            let (cv, sv) = gamma1(v);
            let opposite = matches!(
                (cu, cv),
                (OrbitColor::BlueL, OrbitColor::RedL) | (OrbitColor::RedL, OrbitColor::BlueL)
            );
            let want = if opposite { dd(u, v) - 2 } else { dd(u, v) };
            if t_distance(su, sv) != want {
                return Ok((false, format!("{u},{v}: d = {} want {want}", t_distance(su, sv))));
            }
        }
    }
    Ok((true, format!("{} pairs", all.len() * all.len())))
}

fn triple_censuses(_: u64) -> Result<(bool, String)> {
    let t = Instant::now();
    let m = triple_census(Space::M);
    let j = triple_census(Space::J);
    let l = triple_census(Space::L);
    let tt = triple_census(Space::T);
    let count = |p: &str| tt.orbits.iter().filter(|o| o.tag.starts_with(p)).count();
    let l_sizes: BTreeSet<(String, usize)> = l.orbits.iter().map(|o| (o.tag.clone(), o.size)).collect();
    let ok = m.total == 27720
        && m.orbits.len() == 5
        && m.orbits.iter().all(|o| o.tag_constant)
        && j.total == 4960
        && j.orbits.len() == 5
        && j.orbits.iter().all(|o| o.tag_constant)
        && l.total == 220
        && l_sizes == BTreeSet::from([("coherent".into(), 160), ("incoherent".into(), 60)])
        && tt.total == 13244
        && tt.orbits.len() == 18
        && (count("LLL"), count("LLJ"), count("LJJ"), count("JJJ")) == (2, 4, 7, 5)
        && within(t, Duration::from_secs(60));
    Ok((
        ok,
        format!(
            "M {}/{} J {}/{} L {}/{} T {}/{} ({}/{}/{}/{})",
            m.total,
            m.orbits.len(),
            j.total,
            j.orbits.len(),
            l.total,
            l.orbits.len(),
            tt.total,
            tt.orbits.len(),
            count("LLL"),
            count("LLJ"),
            count("LJJ"),
            count("JJJ")
        ),
    ))
}

/// Truncated Stirling series, kept separate from the one inside `lgamma`.
pub fn stirling_oracle(z: CNum) -> CNum {
    let z2 = z * z;
    (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + 1.0 / (12.0 * z) - 1.0 / (360.0 * z * z2)
        + 1.0 / (1260.0 * z * z2 * z2)
}

fn rel_from_log(d: CNum) -> f64 {
    (d.exp() - 1.0).norm()
}

/// Worst relative residuals of reflection, recursion and Stirling agreement.
pub fn gamma_residuals(seed: u64, n: usize) -> Result<[f64; 3]> {
    let mut s = Sampler::new(seed);
    let mut refl: f64 = 0.0;
    let mut rec: f64 = 0.0;
    let mut k = 0;
    while k < n {
        let z = s.complex(30.0);
        if int_distance(z) < SIN_MARGIN {
            continue;
        }
        k += 1;
        let d = lgamma(z)?.as_log() + lgamma(1.0 - z)?.as_log() + log_sin_pi(z)?.as_log() - PI.ln();
        refl = refl.max(rel_from_log(d));
        let d = lgamma(z + 1.0)?.as_log() - lgamma(z)?.as_log() - z.ln();
        rec = rec.max(rel_from_log(d));
    }
    let mut stir: f64 = 0.0;
    for i in 0..=38 {
        let theta = (i as f64 / 19.0 - 1.0) * 0.95 * PI;
        let z = CNum::from_polar(1000.0, theta);
        stir = stir.max(rel_from_log(lgamma(z)?.as_log() - stirling_oracle(z)));
    }
    Ok([refl, rec, stir])
}

fn gamma_layer(seed: u64) -> Result<(bool, String)> {
    let [refl, rec, stir] = gamma_residuals(seed, 1000)?;
    Ok((
        refl <= 1e-12 && rec <= 1e-12 && stir <= 1e-10,
        format!("reflection {refl:.1e} recursion {rec:.1e} (1000 points), Stirling |z|=1e3 {stir:.1e}"),
    ))
}

fn rel(a: CNum, b: CNum) -> f64 {
    (a - b).norm() / a.norm().max(b.norm())
}

fn arr7(v: Vec<CNum>) -> [CNum; 7] {
    v.try_into().expect("seven coordinates")
}

fn arr8(v: Vec<CNum>) -> [CNum; 8] {
    v.try_into().expect("eight coordinates")
}

/// Worst relative change of `f` under each matrix, over `points` seeded points.
fn invariance_v(
    seed: u64,
    points: usize,
    ctrl: &SeriesCtrl,
    gens: &[RatMatrix],
    margins: fn(&[CNum; 7]) -> Margins,
    f: fn(&[CNum; 7], &SeriesCtrl) -> Result<Eval>,
) -> Result<f64> {
    let mut s = Sampler::new(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..points {
        let p = s.point_v(|p| {
            margins(p.coords()).ok() && gens.iter().all(|g| margins(&arr7(g.apply_numeric(p.coords()))).ok())
        })?;
        let base = f(p.coords(), ctrl)?.value;
        for g in gens {
            worst = worst.max(rel(base, f(&arr7(g.apply_numeric(p.coords())), ctrl)?.value));
        }
    }
    Ok(worst)
}

pub fn m_invariance(seed: u64, points: usize, ctrl: &SeriesCtrl) -> Result<f64> {
    let gens = NamedGroup::G.generators();
    let mut s = Sampler::new(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..points {
        let p = s.point_w(|p| {
            m_margins(p.coords()).ok() && gens.iter().all(|g| m_margins(&arr8(g.apply_numeric(p.coords()))).ok())
        })?;
        let base = m_value(p.coords(), ctrl)?.value;
        for g in &gens {
            worst = worst.max(rel(base, m_value(&arr8(g.apply_numeric(p.coords())), ctrl)?.value));
        }
    }
    Ok(worst)
}

pub fn j_invariance(seed: u64, points: usize, ctrl: &SeriesCtrl) -> Result<f64> {
    invariance_v(seed, points, ctrl, &NamedGroup::GJ.generators(), j_margins, j_value)
}

pub fn l_invariance(seed: u64, points: usize, ctrl: &SeriesCtrl) -> Result<f64> {
    invariance_v(seed, points, ctrl, &NamedGroup::GL.generators(), l_margins, l_value)
}

fn invariances(seed: u64) -> Result<(bool, String)> {
    let ctrl = SeriesCtrl::default();
    let j = j_invariance(seed, 5, &ctrl)?;
    let l = l_invariance(seed, 5, &ctrl)?;
    let m = m_invariance(seed, 3, &ctrl)?;
    Ok((
        j <= 1e-7 && l <= 1e-7 && m <= 1e-5,
        format!("J/G_J {j:.1e} L/G_L {l:.1e} (5 points), M/G {m:.1e} (3 points)"),
    ))
}

/// Smallest `Re(F-D)` accepted when sampling 7F6 points. The series
/// converges like `n^-(1+Re(F-D))` up to constants, too slowly near zero.
pub const L7F6_MIN_EXCESS: f64 = 0.1;

pub fn l7f6_admissible(x: &[CNum; 7]) -> bool {
    (x[5] - x[3]).re >= L7F6_MIN_EXCESS && l_margins(x).ok() && l7f6_margins(x).ok()
}

pub fn l_cross_check(seed: u64, points: usize, ctrl: &SeriesCtrl) -> Result<f64> {
    let mut s = Sampler::new(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..points {
        let p = s.point_v(|p| l7f6_admissible(p.coords()))?;
        worst = worst.max(rel(l_value(p.coords(), ctrl)?.value, l_value_7f6(p.coords(), ctrl)?.value));
    }
    Ok(worst)
}

fn cross_representation(seed: u64) -> Result<(bool, String)> {
    let e = l_cross_check(seed, 3, &SeriesCtrl::default())?;
    Ok((e <= 1e-7, format!("4F3 pair vs 7F6 {e:.1e} (3 points)")))
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationCheck {
    pub name: String,
    pub points: Vec<serde_json::Value>,
    /// One report per point for the relation itself.
    pub reports: Vec<RelationReport>,
    pub worst: f64,
    /// Worst residual over all translates and points.
    pub translated_worst: f64,
    pub translates: Vec<String>,
}

/// `r` and its translates by `words`, evaluated at `points` seeded points
/// admissible for all of them.
pub fn relation_check(r: &Relation, words: &[GenWord], seed: u64, points: usize, ctrl: &SeriesCtrl) -> Result<RelationCheck> {
    let translates: Vec<Relation> = words.iter().map(|w| translate_relation(r, w)).collect::<Result<_>>()?;
    let admissible = |c: &[CNum]| r.margins(c).ok() && translates.iter().all(|t| t.margins(c).ok());
    let mut s = Sampler::new(seed);
    let mut out = RelationCheck {
        name: r.name.clone(),
        points: Vec::new(),
        reports: Vec::new(),
        worst: 0.0,
        translated_worst: 0.0,
        translates: translates.iter().map(|t| t.name.clone()).collect(),
    };
    for _ in 0..points {
        let (p, json): (Vec<CNum>, _) = match r.side {
            Side::W => {
                let p = s.point_w(|p| admissible(p.coords()))?;
                (p.coords().to_vec(), p.to_json())
            }
            Side::V => {
                let p = s.point_v(|p| admissible(p.coords()))?;
                (p.coords().to_vec(), p.to_json())
            }
        };
        let rep = eval_relation(r, &p, ctrl)?;
        out.worst = out.worst.max(rep.residual);
        out.reports.push(rep);
        out.points.push(json);
        for t in &translates {
            out.translated_worst = out.translated_worst.max(eval_relation(t, &p, ctrl)?.residual);
        }
    }
    Ok(out)
}

/// Worst residual of `r` and of its translates by `words`.
pub fn relation_residuals(r: &Relation, words: &[GenWord], seed: u64, points: usize) -> Result<(f64, f64)> {
    let c = relation_check(r, words, seed, points, &SeriesCtrl::default())?;
    Ok((c.worst, c.translated_worst))
}

/// Single-generator words for the Q generators (W side) and their H1
/// images (V side).
pub fn q_translation_words() -> (Vec<GenWord>, Vec<GenWord>) {
    let pairs = q_generator_pairs();
    (pairs.iter().map(|p| GenWord(vec![p.0])).collect(), pairs.iter().map(|p| GenWord(vec![p.1])).collect())
}

fn relations(seed: u64) -> Result<(bool, String)> {
    let (w_words, v_words) = q_translation_words();
    let (r, rt) = relation_residuals(&roy463(), &w_words, seed, 3)?;
    let (j, jt) = relation_residuals(&orbit1jll(), &v_words, seed, 3)?;
    Ok((
        r <= 1e-5 && rt <= 1e-4 && j <= 1e-7 && jt <= 1e-6,
        format!("roy463 {r:.1e} (Q-translates {rt:.1e}), orbit1jll {j:.1e} (translates {jt:.1e})"),
    ))
}

pub const LIMIT_LABELS: [&str; 4] = ["+v(0,7)", "+v(1,7)", "+v(0,1)", "+v(2,7)"];

pub fn limit_reports(seed: u64, labels: &[MLabel], ctrl: &SeriesCtrl) -> Result<Vec<LimitReport>> {
    let rows: Vec<&AppendixRow> = labels.iter().map(|&t| table_row(t)).collect::<Result<_>>()?;
    let p = Sampler::new(seed).point_w(|p| rows.iter().all(|r| limit_margins(r, p, &DEFAULT_SHIFTS).ok()))?;
    Ok(rows.iter().map(|r| check_limit(r, &p, &DEFAULT_SHIFTS, ctrl)).collect())
}

fn limits(seed: u64) -> Result<(bool, String)> {
    let labels: Vec<MLabel> = LIMIT_LABELS.iter().map(|s| s.parse()).collect::<Result<_>>()?;
    let reps = limit_reports(seed, &labels, &SeriesCtrl::default())?;
    let mut ok = reps.iter().all(|r| r.verdict);
    let (blue, red) = (&reps[0], &reps[1]);
    let same_target = gamma2_target(labels[0]) == gamma2_target(labels[1]);
    let t0 = CNum::new(blue.target[0], blue.target[1]);
    let t1 = CNum::new(red.target[0], red.target[1]);
    let tol = blue.errors.last().unwrap_or(&f64::NAN) + red.errors.last().unwrap_or(&f64::NAN);
    let gap = rel(t0, t1);
    ok &= same_target && gap <= tol;
    let mut parts: Vec<String> = reps
        .iter()
        .map(|r| {
            let e: Vec<String> = r.errors.iter().map(|e| format!("{e:.1e}")).collect();
            format!("{} [{}]", r.label, e.join(" "))
        })
        .collect();
    parts.push(format!("blue/red target gap {gap:.1e}"));
    Ok((ok, parts.join("; ")))
}

/// Structural match of every row plus numeric M agreement of generated and
/// transcribed argument lists; returns mismatches and the worst deviation.
pub fn appendix_check(seed: u64, points_per_row: usize) -> Result<(Vec<String>, f64)> {
    let ctrl = SeriesCtrl::default();
    let table = appendix_table()?;
    let fixture = appendix_fixture();
    let mut bad = Vec::new();
    if table.len() != 56 || fixture.len() != 56 {
        bad.push(format!("{} generated rows, {} fixture rows", table.len(), fixture.len()));
    }
    let mut s = Sampler::new(seed);
    let mut worst: f64 = 0.0;
    for row in table {
        let Some(fix) = fixture.iter().find(|f| f.label == row.label) else {
            bad.push(format!("{}: missing from fixture", row.label));
            continue;
        };
        if let Err(e) = rows_match(row, fix) {
            bad.push(e);
        }
        let gen = row.m_term();
        let lit = FunTerm::new(FunKind::M, fix.m_args.clone())?;
        for _ in 0..points_per_row {
            let p = s.point_w(|p| gen.margins(p.coords()).ok() && lit.margins(p.coords()).ok())?;
            let a = gen.evaluate(p.coords(), &ctrl)?.value;
            let b = lit.evaluate(p.coords(), &ctrl)?.value;
            worst = worst.max(rel(a, b));
        }
    }
    Ok((bad, worst))
}

fn appendix(seed: u64) -> Result<(bool, String)> {
    let t = Instant::now();
    let (bad, worst) = appendix_check(seed, 2)?;
    let ok = bad.is_empty() && worst <= 1e-8 && within(t, Duration::from_secs(300));
    let mut detail = format!("56 rows, {} structural mismatches, M agreement {worst:.1e}", bad.len());
    if let Some(first) = bad.first() {
        detail.push_str(&format!("; first: {first}"));
    }
    Ok((ok, detail))
}

pub fn pipeline_report(seed: u64, ctrl: &SeriesCtrl, tol: &PipelineTol) -> Result<PipelineReport> {
    let p = Sampler::new(seed).point_w(|p| pipeline_margins(p, &DEFAULT_SHIFTS).ok())?;
    limit222_pipeline(&p, &DEFAULT_SHIFTS, ctrl, tol)
}

fn pipeline(seed: u64) -> Result<(bool, String)> {
    let r = pipeline_report(seed, &SeriesCtrl::default(), &PipelineTol::default())?;
    let halving: Vec<String> = r.factor_halving.iter().flatten().map(|h| format!("{h:.2}")).collect();
    let mut detail = format!(
        "roy463 {:.1e}, orbit1jll {:.1e}, factor halving [{}]",
        r.roy463_residual,
        r.orbit1jll_residual,
        halving.join(" ")
    );
    if let Some(f) = r.failures.first() {
        detail.push_str(&format!("; {f}"));
    }
    Ok((r.verdict, detail))
}
