//! The M cosets and their J/L images: the correspondence table, limit targets and
//! normalizers, three-term relations with translation and evaluation.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::OnceLock;

use serde::Serialize;
use serde_json::{json, Value};

use crate::coxeter::{
    act_j, act_m, classify_j_first, coset_classify_m, gamma1, j_first_coordinate, m_iso,
    representative_words, JLabel, LLabel, MLabel, OrbitColor, TLabel, Q_GENS,
};
use crate::error::{Error, Result};
use crate::exactalg::{word_to_matrix, Gen, GenWord, LinForm, Rat, Side, SymVec, V_GENS};
use crate::hypnum::{
    j_margins, j_value, l_margins, l_value, lgamma, log_sin_pi, m_margins, m_value, CNum, Eval,
    LogC, Margins, PointW, SeriesCtrl,
};

/// Generator order for the table search.
pub const TABLE_GENS: [Gen; 7] = [Gen::S1, Gen::S2, Gen::S3, Gen::S4, Gen::S5, Gen::S3p, Gen::S6];

fn form(side: Side, s: &str) -> LinForm {
    LinForm::parse(side, s).unwrap_or_else(|e| panic!("built-in form `{s}`: {e}"))
}

fn forms(side: Side, list: &[&str]) -> Vec<LinForm> {
    list.iter().map(|s| form(side, s)).collect()
}

fn b_coef(f: &LinForm) -> Rat {
    f.reduced().coef(1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FactorKind {
    Gamma,
    SinPi,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Factor {
    pub kind: FactorKind,
    pub arg: LinForm,
}

impl Factor {
    pub fn gamma(arg: LinForm) -> Factor {
        Factor { kind: FactorKind::Gamma, arg }
    }

    pub fn sin_pi(arg: LinForm) -> Factor {
        Factor { kind: FactorKind::SinPi, arg }
    }

    fn log_value(&self, z: CNum) -> Result<LogC> {
        match self.kind {
            FactorKind::Gamma => lgamma(z),
            FactorKind::SinPi => log_sin_pi(z),
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FactorKind::Gamma => write!(f, "Gamma({})", self.arg),
            FactorKind::SinPi => write!(f, "sin pi({})", self.arg),
        }
    }
}

/// `prefactor * pi^pi_power * prod(num) / prod(den)` over Gamma and
/// `sin(pi z)` factors.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaSinExpr {
    pub prefactor: Rat,
    pub pi_power: i32,
    pub num: Vec<Factor>,
    pub den: Vec<Factor>,
}

impl GammaSinExpr {
    pub fn one() -> GammaSinExpr {
        GammaSinExpr { prefactor: Rat::ONE, pi_power: 0, num: vec![], den: vec![] }
    }

    pub fn scaled(mut self, r: Rat, pi_power: i32) -> GammaSinExpr {
        self.prefactor = self.prefactor * r;
        self.pi_power += pi_power;
        self
    }

    pub fn sin(mut self, arg: LinForm) -> GammaSinExpr {
        self.num.push(Factor::sin_pi(arg));
        self
    }

    pub fn gammas(mut self, args: &[LinForm]) -> GammaSinExpr {
        self.num.extend(args.iter().map(|a| Factor::gamma(*a)));
        self
    }

    pub fn over_gammas(mut self, args: &[LinForm]) -> GammaSinExpr {
        self.den.extend(args.iter().map(|a| Factor::gamma(*a)));
        self
    }

    pub fn mul(mut self, o: &GammaSinExpr) -> GammaSinExpr {
        self.prefactor = self.prefactor * o.prefactor;
        self.pi_power += o.pi_power;
        self.num.extend(o.num.iter().cloned());
        self.den.extend(o.den.iter().cloned());
        self
    }

    pub fn is_zero(&self) -> bool {
        self.prefactor.is_zero()
    }

    fn map_forms(&self, f: impl Fn(&LinForm) -> LinForm) -> GammaSinExpr {
        let m = |v: &Vec<Factor>| v.iter().map(|x| Factor { kind: x.kind, arg: f(&x.arg) }).collect();
        GammaSinExpr { prefactor: self.prefactor, pi_power: self.pi_power, num: m(&self.num), den: m(&self.den) }
    }

    pub fn margins(&self, point: &[CNum]) -> Margins {
        let mut m = Margins::default();
        for x in self.num.iter().chain(&self.den) {
            let z = x.arg.eval(point);
            match x.kind {
                FactorKind::Gamma => m.gamma(z),
                FactorKind::SinPi => m.sin(z),
            };
        }
        m
    }

    /// Value in log form; `None` for a zero prefactor.
    pub fn log_eval(&self, point: &[CNum]) -> Result<Option<LogC>> {
        if self.is_zero() {
            return Ok(None);
        }
        let mut acc = LogC::of_real(self.prefactor.to_f64()) * LogC::of_real(PI).powi(self.pi_power);
        for x in &self.num {
            acc = acc * x.log_value(x.arg.eval(point))?;
        }
        for x in &self.den {
            acc = acc / x.log_value(x.arg.eval(point))?;
        }
        Ok(Some(acc))
    }

    pub fn eval(&self, point: &[CNum]) -> Result<CNum> {
        Ok(self.log_eval(point)?.map(LogC::exp).unwrap_or_default())
    }
}

impl fmt::Display for GammaSinExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[Factor]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        write!(f, "{}", self.prefactor)?;
        if self.pi_power != 0 {
            write!(f, " pi^{}", self.pi_power)?;
        }
        if !self.num.is_empty() {
            write!(f, " {}", join(&self.num))?;
        }
        if !self.den.is_empty() {
            write!(f, " / [{}]", join(&self.den))?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum FunKind {
    M,
    J,
    L,
}

impl FunKind {
    pub fn arity(self) -> usize {
        match self {
            FunKind::M => 8,
            FunKind::J | FunKind::L => 7,
        }
    }
}

impl fmt::Display for FunKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Coset label of a function term, as far as it can be read off.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CosetLabel {
    M(MLabel),
    T(TLabel),
}

impl fmt::Display for CosetLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CosetLabel::M(t) => write!(f, "{t}"),
            CosetLabel::T(t) => write!(f, "{t}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FunTerm {
    kind: FunKind,
    args: Vec<LinForm>,
}

impl FunTerm {
    /// Checks arity, a common alphabet, and the hyperplane identity of
    /// the kind modulo the ambient constraint.
    pub fn new(kind: FunKind, args: Vec<LinForm>) -> Result<FunTerm> {
        if args.len() != kind.arity() {
            return Err(Error::DimensionMismatch { expected: kind.arity(), got: args.len() });
        }
        let side = args[0].side();
        if args.iter().any(|a| a.side() != side) {
            return Err(Error::Malformed("arguments mix alphabets".into()));
        }
        let zero = LinForm::zero(side);
        let id = match kind {
            FunKind::M => {
                args[1..].iter().fold(zero, |acc, x| acc + *x) - args[0].scale(Rat::int(3)) - LinForm::constant_form(side, Rat::int(2))
            }
            FunKind::J | FunKind::L => {
                args[4] + args[5] + args[6] - args[0] - args[1] - args[2] - args[3] - LinForm::constant_form(side, Rat::ONE)
            }
        };
        if !id.eq_on_hyperplane(&zero) {
            return Err(Error::Precondition(format!("{kind} arguments violate the hyperplane identity (defect {id})")));
        }
        Ok(FunTerm { kind, args })
    }

    pub fn parse(kind: FunKind, side: Side, list: &[&str]) -> Result<FunTerm> {
        let args = list.iter().map(|s| LinForm::parse(side, s)).collect::<Result<Vec<_>>>()?;
        FunTerm::new(kind, args)
    }

    pub fn kind(&self) -> FunKind {
        self.kind
    }

    pub fn args(&self) -> &[LinForm] {
        &self.args
    }

    pub fn side(&self) -> Side {
        self.args[0].side()
    }

    pub fn numeric_args(&self, point: &[CNum]) -> Vec<CNum> {
        self.args.iter().map(|a| a.eval(point)).collect()
    }

    pub fn margins(&self, point: &[CNum]) -> Margins {
        let x = self.numeric_args(point);
        match self.kind {
            FunKind::M => m_margins(&x.try_into().unwrap()),
            FunKind::J => j_margins(&x.try_into().unwrap()),
            FunKind::L => l_margins(&x.try_into().unwrap()),
        }
    }

    pub fn evaluate(&self, point: &[CNum], ctrl: &SeriesCtrl) -> Result<Eval> {
        let x = self.numeric_args(point);
        match self.kind {
            FunKind::M => m_value(&x.try_into().unwrap(), ctrl),
            FunKind::J => j_value(&x.try_into().unwrap(), ctrl),
            FunKind::L => l_value(&x.try_into().unwrap(), ctrl),
        }
    }

    pub fn substitute(&self, images: &[LinForm]) -> FunTerm {
        FunTerm { kind: self.kind, args: self.args.iter().map(|a| a.substitute(images)).collect() }
    }

    /// M terms by their second entry; J and L terms over the V alphabet
    /// by their first entry or their L key.
    pub fn label(&self) -> Option<CosetLabel> {
        match (self.kind, self.side()) {
            (FunKind::M, Side::W) => coset_classify_m(&SymVec::new(Side::W, self.args.clone())).ok().map(CosetLabel::M),
            (FunKind::J, side) => classify_j_with(&self.args[0], &base_for(side)).ok().map(|t| CosetLabel::T(TLabel::J(t))),
            (FunKind::L, side) => classify_l_with(&self.args, &base_for(side)).ok().map(|t| CosetLabel::T(TLabel::L(t))),
            _ => None,
        }
    }
}

impl fmt::Display for FunTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a: Vec<String> = self.args.iter().map(|x| x.to_string()).collect();
        match self.kind {
            FunKind::M => write!(f, "M[{}; {}; {}]", a[0], a[1], a[2..].join(", ")),
            FunKind::J => write!(f, "J[{}; {}; {}]", a[0], a[1..4].join(", "), a[4..].join(", ")),
            FunKind::L => write!(f, "L[{}; {}; {}]", a[..4].join(", "), a[4], a[5..].join(", ")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RelationTerm {
    pub coef: GammaSinExpr,
    pub fun: FunTerm,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Relation {
    pub name: String,
    pub side: Side,
    pub terms: Vec<RelationTerm>,
    pub provenance: String,
}

impl Relation {
    pub fn margins(&self, point: &[CNum]) -> Margins {
        let mut m = Margins::default();
        for t in &self.terms {
            m.extend(&t.coef.margins(point));
            m.extend(&t.fun.margins(point));
        }
        m
    }

    pub fn labels(&self) -> Vec<Option<CosetLabel>> {
        self.terms.iter().map(|t| t.fun.label()).collect()
    }
}

fn w(list: &[&str]) -> Vec<LinForm> {
    forms(Side::W, list)
}

fn v(list: &[&str]) -> Vec<LinForm> {
    forms(Side::V, list)
}

fn m_term(list: &[&str]) -> FunTerm {
    FunTerm::new(FunKind::M, w(list)).expect("built-in M term")
}

/// Pochhammer ratio `(b)_y (h)_y / ((1+a-b)_y (1+a-h)_y)` with `y = c-a`,
/// written with Gamma quotients.
pub fn pochhammer_ratio_222() -> GammaSinExpr {
    GammaSinExpr::one()
        .gammas(&w(&["b+c-a", "h+c-a", "1+a-b", "1+a-h"]))
        .over_gammas(&w(&["b", "h", "1+c-b", "1+c-h"]))
}

/// The two ratios whose product is `pochhammer_ratio_222`: `(b)_y/(1+a-h)_y`
/// and `(h)_y/(1+a-b)_y`. Each tends to 1 like `1/Im b`; in the product the
/// `1/Im b` terms cancel.
pub fn pochhammer_factors_222() -> [GammaSinExpr; 2] {
    [
        GammaSinExpr::one().gammas(&w(&["b+c-a", "1+a-h"])).over_gammas(&w(&["b", "1+c-h"])),
        GammaSinExpr::one().gammas(&w(&["h+c-a", "1+a-b"])).over_gammas(&w(&["h", "1+c-b"])),
    ]
}

pub fn roy463() -> Relation {
    let t = |sin: &str, den: &[&str], m: &[&str]| RelationTerm {
        coef: GammaSinExpr::one().sin(form(Side::W, sin)).over_gammas(&w(den)),
        fun: m_term(m),
    };
    Relation {
        name: "roy463".into(),
        side: Side::W,
        terms: vec![
            t("b-a", &["c-a+d", "c-a+e", "c-a+f", "c-a+g", "c-a+h"], &["a", "b", "c", "d", "e", "f", "g", "h"]),
            t("a-c", &["b-a+d", "b-a+e", "b-a+f", "b-a+g", "b-a+h"], &["a", "c", "b", "d", "e", "f", "g", "h"]),
            t("c-b", &["d", "e", "f", "g", "h"], &["2c-a", "c+b-a", "c", "c+d-a", "c+e-a", "c+f-a", "c+g-a", "c+h-a"]),
        ],
        provenance: "Euclidean type 222 M relation on v(0,7), v(6,7), v(0,6)".into(),
    }
}

/// Normalizers of the three roy463b terms, in term order.
pub fn roy463b_normalizers() -> [GammaSinExpr; 3] {
    [
        GammaSinExpr::one().gammas(&w(&["1+a-h", "b-a+c", "b-a+d", "b-a+e", "b-a+f", "b-a+g"])).over_gammas(&w(&["b-a"])),
        GammaSinExpr::one().gammas(&w(&["1-c", "1+a-b", "1+a-h", "c-a+b", "c-a+h"])),
        GammaSinExpr::one().gammas(&w(&["1+c-h", "b", "b-a+d", "b-a+e", "b-a+f", "b-a+g"])).over_gammas(&w(&["b-c"])),
    ]
}

/// Outer coefficients of roy463b; the third excludes the Pochhammer ratio.
pub fn roy463b_outer() -> [GammaSinExpr; 3] {
    let two_over_pi = |e: GammaSinExpr| e.scaled(Rat::int(2), -1);
    [
        two_over_pi(GammaSinExpr::one().sin(form(Side::W, "c+g-a")).over_gammas(&w(&["1-g", "c-a+d", "c-a+e", "c-a+f"]))),
        two_over_pi(GammaSinExpr::one().sin(form(Side::W, "a-c")).over_gammas(&w(&["1-c", "2+2a-c-d-e-f-g", "1-g", "1+a-c-g"]))),
        two_over_pi(GammaSinExpr::one().sin(form(Side::W, "g")).over_gammas(&w(&["1+a-c-g", "d", "e", "f"]))).scaled(Rat::int(-1), 0),
    ]
}

pub fn roy463b() -> Relation {
    let [o1, o2, o3] = roy463b_outer();
    let [n1, n2, n3] = roy463b_normalizers();
    Relation {
        name: "roy463b".into(),
        side: Side::W,
        terms: vec![
            RelationTerm { coef: o1.mul(&n1), fun: m_term(&["a", "b", "c", "d", "e", "f", "g", "h"]) },
            RelationTerm { coef: o2.mul(&n2), fun: m_term(&["a", "c", "g", "d", "e", "f", "b", "h"]) },
            RelationTerm {
                coef: o3.mul(&pochhammer_ratio_222()).mul(&n3),
                fun: m_term(&["2c-a", "c+b-a", "c", "c+d-a", "c+e-a", "c+f-a", "c+g-a", "c+h-a"]),
            },
        ],
        provenance: "roy463 multiplied by a Gamma ratio, terms grouped for the Im(b) limit".into(),
    }
}

pub fn orbit1jll() -> Relation {
    let t = |sign: i64, sin: &str, den: &[&str], kind: FunKind, args: &[&str]| RelationTerm {
        coef: GammaSinExpr::one().scaled(Rat::int(sign), 0).sin(form(Side::V, sin)).over_gammas(&v(den)),
        fun: FunTerm::new(kind, v(args)).expect("built-in term"),
    };
    Relation {
        name: "orbit1jll".into(),
        side: Side::V,
        terms: vec![
            t(1, "F-E", &["1-A", "E-A", "F-A", "G-A"], FunKind::J, &["A", "B", "C", "D", "E", "F", "G"]),
            t(1, "F-A", &["E-A", "E-B", "E-C", "E-D"], FunKind::L, &["A", "B", "C", "D", "E", "F", "G"]),
            t(-1, "E-A", &["F-A", "F-B", "F-C", "F-D"], FunKind::L, &["A", "B", "C", "D", "F", "E", "G"]),
        ],
        provenance: "orbit 1 (J,L,L) relation on J_p0, L_4, L_5".into(),
    }
}

pub fn builtin_relations() -> BTreeMap<&'static str, Relation> {
    BTreeMap::from([("roy463", roy463()), ("roy463b", roy463b()), ("orbit1jll", orbit1jll())])
}

/// Change of variable `w -> alpha w` (or `x -> alpha x`) for the matrix of `word`.
pub fn translate_relation(r: &Relation, word: &GenWord) -> Result<Relation> {
    if let Some(g) = word.gens().iter().find(|g| g.side() != r.side) {
        return Err(Error::Precondition(format!("generator {g} does not act on the alphabet of {}", r.name)));
    }
    let images = word_to_matrix(word, r.side)?.apply(&SymVec::identity(r.side))?;
    let imgs = images.entries();
    Ok(Relation {
        name: if word.is_empty() { r.name.clone() } else { format!("{}*[{}]", r.name, word) },
        side: r.side,
        terms: r
            .terms
            .iter()
            .map(|t| RelationTerm { coef: t.coef.map_forms(|f| f.substitute(imgs)), fun: t.fun.substitute(imgs) })
            .collect(),
        provenance: r.provenance.clone(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TermReport {
    pub fun: String,
    pub label: Option<String>,
    pub log_magnitude: f64,
    pub phase: f64,
    pub low_precision: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationReport {
    pub name: String,
    pub residual: f64,
    /// Largest minus smallest term log-magnitude.
    pub log_spread: f64,
    pub terms: Vec<TermReport>,
    pub warning: Option<String>,
}

/// Scaled residual `|sum of terms| / max |term|`, all terms formed in log space.
pub fn eval_relation(r: &Relation, point: &[CNum], ctrl: &SeriesCtrl) -> Result<RelationReport> {
    if point.len() != r.side.dim() {
        return Err(Error::DimensionMismatch { expected: r.side.dim(), got: point.len() });
    }
    r.margins(point).check()?;
    let mut logs = Vec::new();
    let mut reports = Vec::new();
    for t in &r.terms {
        let label = t.fun.label().map(|l| l.to_string());
        let Some(c) = t.coef.log_eval(point)? else {
            reports.push(TermReport { fun: t.fun.to_string(), label, log_magnitude: f64::NEG_INFINITY, phase: 0.0, low_precision: false });
            continue;
        };
        let f = t.fun.evaluate(point, ctrl)?;
        let l = c * LogC::of(f.value);
        logs.push(l);
        reports.push(TermReport { fun: t.fun.to_string(), label, log_magnitude: l.log_mag, phase: l.phase, low_precision: f.low_precision });
    }
    if logs.is_empty() {
        return Ok(RelationReport {
            name: r.name.clone(),
            residual: 0.0,
            log_spread: 0.0,
            terms: reports,
            warning: Some("all coefficients vanish".into()),
        });
    }
    let top = logs.iter().map(|l| l.log_mag).fold(f64::NEG_INFINITY, f64::max);
    let low = logs.iter().map(|l| l.log_mag).fold(f64::INFINITY, f64::min);
    let sum: CNum = logs.iter().map(|l| LogC::new(l.log_mag - top, l.phase).exp()).sum();
    let warning = reports.iter().any(|t| t.low_precision).then(|| "a term lost precision to cancellation".to_string());
    Ok(RelationReport { name: r.name.clone(), residual: sum.norm(), log_spread: top - low, terms: reports, warning })
}

/// `x(w)` in terms of `a, c, d, e, f, g`.
pub fn xfromw() -> SymVec {
    SymVec::new(
        Side::W,
        w(&["2+2a-c-d-e-f-g", "1+a-e-f", "1+a-e-g", "1+a-f-g", "2+2a-d-e-f-g", "2+2a-c-e-f-g", "2+a-e-f-g"]),
    )
}

/// Change of variable used for the 222 limit.
pub fn newxdef() -> SymVec {
    SymVec::new(Side::W, w(&["c", "1+a-d-g", "1+a-e-g", "1+a-f-g", "1+c-g", "1+a-g", "2+2a-d-e-f-g"]))
}

fn base_for(side: Side) -> SymVec {
    match side {
        Side::V => SymVec::identity(Side::V),
        Side::W => xfromw(),
    }
}

/// Arguments `(A,B,C,D;E;F,G)` of `L_mu` at the point `x`.
pub fn l_row(mu: LLabel, x: &SymVec) -> Vec<LinForm> {
    let e = x.entries();
    let one = LinForm::constant_form(e[0].side(), Rat::ONE);
    let two = LinForm::constant_form(e[0].side(), Rat::int(2));
    let (a, b, c, d, ee, f, g) = (e[0], e[1], e[2], e[3], e[4], e[5], e[6]);
    // slot order for indices 6,5,4 (E slot, F slot, G slot) and 3,2,1
    let upper = |k: u8| match k {
        6 => (g, f, ee),
        5 => (f, ee, g),
        _ => (ee, f, g),
    };
    match (mu.bar, mu.idx) {
        (false, k @ 4..=6) => {
            let (x5, x6, x7) = upper(k);
            vec![a, b, c, d, x5, x6, x7]
        }
        (true, k @ 4..=6) => {
            let (x5, x6, x7) = upper(k);
            vec![one - a, one - b, one - c, one - d, two - x5, two - x6, two - x7]
        }
        (bar, k) => {
            // E slot from D, C, B for 3, 2, 1; the other two fill F, G
            let pick = [d, c, b];
            let idx = (3 - k) as usize;
            let rest: Vec<LinForm> = [b, c, d].into_iter().filter(|y| *y != pick[idx]).collect();
            let p = |y: LinForm| one + a - y;
            let q = |y: LinForm| one + y - a;
            if !bar {
                vec![a, p(ee), p(f), p(g), p(pick[idx]), p(rest[0]), p(rest[1])]
            } else {
                vec![one - a, ee - a, f - a, g - a, q(pick[idx]), q(rest[0]), q(rest[1])]
            }
        }
    }
}

/// `F + G - E` of an L argument list; constant along each L coset.
pub fn l_key(args: &[LinForm]) -> LinForm {
    args[5] + args[6] - args[4]
}

pub fn classify_l_with(args: &[LinForm], base: &SymVec) -> Result<LLabel> {
    let key = l_key(args);
    LLabel::all()
        .into_iter()
        .find(|mu| l_key(&l_row(*mu, base)).eq_on_hyperplane(&key))
        .ok_or_else(|| Error::Malformed(format!("L key {key} matches no L coset")))
}

pub fn classify_l(args: &[LinForm]) -> Result<LLabel> {
    classify_l_with(args, &SymVec::identity(Side::V))
}

pub fn classify_j_with(first: &LinForm, base: &SymVec) -> Result<JLabel> {
    if first.side() == Side::V {
        return classify_j_first(first);
    }
    JLabel::all()
        .into_iter()
        .find(|t| j_first_coordinate(*t).substitute(base.entries()).eq_on_hyperplane(first))
        .ok_or_else(|| Error::Malformed(format!("first entry {first} matches no J coset")))
}

fn j_words() -> &'static BTreeMap<JLabel, Vec<Gen>> {
    static WORDS: OnceLock<BTreeMap<JLabel, Vec<Gen>>> = OnceLock::new();
    WORDS.get_or_init(|| representative_words(JLabel::from_bits(0).unwrap(), &V_GENS, act_j))
}

fn m_words() -> &'static BTreeMap<MLabel, Vec<Gen>> {
    static WORDS: OnceLock<BTreeMap<MLabel, Vec<Gen>>> = OnceLock::new();
    WORDS.get_or_init(|| representative_words(MLabel::pos(0, 7), &TABLE_GENS, act_m))
}

pub fn j_representative_word(t: JLabel) -> GenWord {
    GenWord(j_words()[&t].clone())
}

pub fn m_representative_word(t: MLabel) -> GenWord {
    GenWord(m_words()[&t].clone())
}

/// `J_sigma` at the point `x`: `J(alpha x)` for the representative `alpha`.
pub fn j_args(t: JLabel, x: &SymVec) -> Vec<LinForm> {
    let m = word_to_matrix(&j_representative_word(t), Side::V).expect("V word");
    m.apply(x).expect("seven entries").entries().to_vec()
}

/// `J_sigma` or `L_mu` as a function term at the point `x`.
pub fn t_term(t: TLabel, x: &SymVec) -> FunTerm {
    match t {
        TLabel::J(j) => FunTerm::new(FunKind::J, j_args(j, x)).expect("J image of a valid point"),
        TLabel::L(l) => FunTerm::new(FunKind::L, l_row(l, x)).expect("L row of a valid point"),
    }
}

/// Limit target of `M_tau`: the `gamma1(tau)` function at `x(w)`.
pub fn gamma2_target(t: MLabel) -> FunTerm {
    t_term(gamma1(t).1, &xfromw())
}

#[derive(Clone, Debug, PartialEq)]
pub struct AppendixRow {
    pub label: MLabel,
    pub word: GenWord,
    pub color: OrbitColor,
    pub m_args: Vec<LinForm>,
    pub target_kind: FunKind,
    pub target_label: TLabel,
    pub target_args: Vec<LinForm>,
    /// Every admissible arrangement of the coset vector; `m_args` is the first.
    pub arrangements: Vec<Vec<LinForm>>,
}

impl AppendixRow {
    pub fn m_term(&self) -> FunTerm {
        FunTerm::new(FunKind::M, self.m_args.clone()).expect("row arguments on W")
    }

    pub fn target_term(&self) -> FunTerm {
        FunTerm::new(self.target_kind, self.target_args.clone()).expect("row target on V")
    }

    pub fn to_json(&self) -> Value {
        let s = |v: &[LinForm]| v.iter().map(|f| f.to_string()).collect::<Vec<_>>();
        json!({
            "label": self.label.to_string(),
            "word": self.word.to_string(),
            "color": self.color.to_string(),
            "m_args": s(&self.m_args),
            "target_kind": self.target_kind.to_string(),
            "target_label": self.target_label.to_string(),
            "target_args": s(&self.target_args),
        })
    }
}

/// Puts the b-carrying entries into the slots of the limit normal form and
/// sorts the b-free middle entries by their text.
pub fn normal_form(label: MLabel, args: &[LinForm]) -> Result<Vec<LinForm>> {
    let color = gamma1(label).0;
    let bc: Vec<Rat> = args.iter().map(b_coef).collect();
    let fail = |why: &str| Error::Malformed(format!("normal form unreachable for {label}: {why}"));
    if !bc[0].is_zero() {
        return Err(fail("first slot depends on b"));
    }
    let find = |want: Rat| {
        let hits: Vec<usize> = (2..8).filter(|&k| bc[k] == want).collect();
        if hits.len() == 1 { Ok(hits[0]) } else { Err(fail("b-carrying middle slot is not unique")) }
    };
    let one = Rat::ONE;
    let (fixed, tail): (usize, Vec<usize>) = match color {
        OrbitColor::BlueL | OrbitColor::RedL => {
            let want = if color == OrbitColor::BlueL { one } else { -one };
            if bc[1] != want {
                return Err(fail("second slot has the wrong b sign"));
            }
            (2, vec![find(-want)?])
        }
        OrbitColor::J => {
            if !bc[1].is_zero() {
                return Err(fail("second slot depends on b"));
            }
            (2, vec![find(one)?, find(-one)?])
        }
    };
    let mut middle: Vec<LinForm> = (2..8).filter(|k| !tail.contains(k)).map(|k| args[k]).collect();
    if middle.iter().any(|f| !b_coef(f).is_zero()) {
        return Err(fail("extra b-carrying slot"));
    }
    middle.sort_by_key(|f| f.to_string());
    let mut out: Vec<LinForm> = args[..fixed].to_vec();
    out.extend(middle);
    out.extend(tail.iter().map(|&k| args[k]));
    Ok(out)
}

/// Reduced W form as doubled integers: constant, then `a..g`.
type IntForm = [i8; 8];

fn to_int(f: &LinForm) -> IntForm {
    let r = f.reduced();
    let dbl = |q: Rat| {
        let x = q * Rat::int(2);
        assert!(x.is_integer(), "form {f} has a coefficient outside half-integers");
        i8::try_from(x.numer()).expect("small coefficient")
    };
    let mut out = [0; 8];
    out[0] = dbl(r.constant());
    for k in 0..7 {
        out[k + 1] = dbl(r.coef(k));
    }
    out
}

fn from_int(x: &IntForm) -> LinForm {
    let mut coef = [Rat::ZERO; 8];
    for k in 0..7 {
        coef[k] = Rat::new(x[k + 1] as i64, 2);
    }
    LinForm::from_parts(Side::W, Rat::new(x[0] as i64, 2), &coef)
}

/// Generators of the M invariance group `G`.
pub const G_GENS: [Gen; 6] = [Gen::S2, Gen::S3, Gen::S4, Gen::S5, Gen::S6, Gen::S3p];

fn int_matrix(g: Gen) -> Vec<Vec<(usize, i32)>> {
    let m = g.matrix();
    (0..8)
        .map(|i| {
            (0..8)
                .map(|j| (j, (m.get(i, j) * Rat::int(2)).numer() as i32))
                .filter(|&(_, v)| v != 0)
                .collect()
        })
        .collect()
}

fn apply_int(m: &[Vec<(usize, i32)>], x: &[IntForm; 8]) -> [IntForm; 8] {
    std::array::from_fn(|i| {
        let mut acc = [0i32; 8];
        for &(j, mij) in &m[i] {
            for k in 0..8 {
                acc[k] += mij * x[j][k] as i32;
            }
        }
        acc.map(|v| i8::try_from(v / 2).expect("small coefficient"))
    })
}

/// Slots 3..8 sorted: one representative per class of slot permutations.
fn canonical(mut x: [IntForm; 8]) -> [IntForm; 8] {
    x[2..].sort_unstable();
    x
}

fn permutations6() -> Vec<[usize; 6]> {
    let mut out = Vec::with_capacity(720);
    let mut p = [0, 1, 2, 3, 4, 5];
    fn rec(k: usize, p: &mut [usize; 6], out: &mut Vec<[usize; 6]>) {
        if k == 6 {
            out.push(*p);
            return;
        }
        for i in k..6 {
            p.swap(k, i);
            rec(k + 1, p, out);
            p.swap(k, i);
        }
    }
    rec(0, &mut p, &mut out);
    out
}

/// Admissible arrangements of `u` under `G`, each with the least number of
/// `s3'` moves needed to reach it. `G` is the slot permutations of 3..8
/// together with `s3'`, so the search runs over the 72 permutation classes.
pub fn admissible_arrangements(label: MLabel, u: &SymVec) -> Vec<(usize, Vec<LinForm>)> {
    let x3 = int_matrix(Gen::S3p);
    let perms = permutations6();
    let start = canonical(std::array::from_fn(|i| to_int(&u.entries()[i])));
    let mut seen = std::collections::HashSet::from([start]);
    let mut level = vec![start];
    let mut found: Vec<(usize, Vec<LinForm>)> = Vec::new();
    let mut d = 0;
    while !level.is_empty() {
        let mut next = Vec::new();
        for x in &level {
            let forms: Vec<LinForm> = x.iter().map(from_int).collect();
            if let Ok(nf) = normal_form(label, &forms) {
                found.push((d, nf));
            }
            for p in &perms {
                let mut y = *x;
                for (k, &pk) in p.iter().enumerate() {
                    y[2 + k] = x[2 + pk];
                }
                let z = canonical(apply_int(&x3, &y));
                if seen.insert(z) {
                    next.push(z);
                }
            }
        }
        level = next;
        d += 1;
    }
    found
}

/// The shorter of `f` and `f` shifted by the hyperplane form, so that `h`
/// is written as `h` rather than in terms of the other letters.
pub fn tidy(f: &LinForm) -> LinForm {
    let r = f.reduced();
    let c = Side::W.constraint();
    let size = |g: &LinForm| g.coefs().iter().map(|q| q.numer().abs() * 2 / q.denom()).sum::<i64>();
    [r, r + c, r - c].into_iter().min_by_key(size).expect("three candidates")
}

fn build_table() -> Result<Vec<AppendixRow>> {
    let id = SymVec::identity(Side::W);
    let mut rows = Vec::new();
    for (label, word) in m_words() {
        let word = GenWord(word.clone());
        let raw = word_to_matrix(&word, Side::W)?.apply(&id)?;
        let arrangements: Vec<Vec<LinForm>> = admissible_arrangements(*label, &raw)
            .into_iter()
            .map(|(_, a)| a.iter().map(tidy).collect())
            .collect();
        let m_args = arrangements
            .first()
            .cloned()
            .ok_or_else(|| Error::Malformed(format!("normal form unreachable for {label}")))?;
        let (color, target_label) = gamma1(*label);
        let target = gamma2_target(*label);
        rows.push(AppendixRow {
            label: *label,
            word,
            color,
            m_args,
            target_kind: target.kind(),
            target_label,
            target_args: target.args().to_vec(),
            arrangements,
        });
    }
    rows.sort_by_key(|r| r.label);
    Ok(rows)
}

/// The 56 rows, ordered by label. Each row takes the admissible arrangement
/// reached with the fewest `s3'` moves from the representative word's
/// vector, ties broken by search order.
pub fn appendix_table() -> Result<&'static [AppendixRow]> {
    static TABLE: OnceLock<std::result::Result<Vec<AppendixRow>, Error>> = OnceLock::new();
    TABLE.get_or_init(build_table).as_ref().map(|v| v.as_slice()).map_err(Clone::clone)
}

/// A row of the checked-in reference table.
#[derive(Clone, Debug, PartialEq)]
pub struct FixtureRow {
    pub label: MLabel,
    pub color: OrbitColor,
    pub m_args: Vec<LinForm>,
    pub target_label: TLabel,
    pub target_args: Vec<LinForm>,
}

impl FixtureRow {
    pub fn target_kind(&self) -> FunKind {
        if matches!(self.target_label, TLabel::L(_)) { FunKind::L } else { FunKind::J }
    }
}

pub const APPENDIX_FIXTURE: &str = include_str!("../data/appendix.txt");

pub fn parse_fixture(text: &str) -> Result<Vec<FixtureRow>> {
    let mut rows = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |m: &str| Error::Parse(format!("fixture line {}: {m}", n + 1));
        let cols: Vec<&str> = line.split('|').map(str::trim).collect();
        if cols.len() != 5 {
            return Err(err("expected five columns"));
        }
        let list = |s: &str| s.split(',').map(|x| LinForm::parse(Side::W, x.trim())).collect::<Result<Vec<_>>>();
        let color = match cols[1] {
            "blue" => OrbitColor::BlueL,
            "red" => OrbitColor::RedL,
            "J" => OrbitColor::J,
            other => return Err(err(&format!("unknown color {other}"))),
        };
        let row = FixtureRow {
            label: cols[0].parse()?,
            color,
            m_args: list(cols[2])?,
            target_label: cols[3].parse()?,
            target_args: list(cols[4])?,
        };
        if row.m_args.len() != 8 || row.target_args.len() != 7 {
            return Err(err("wrong argument count"));
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn appendix_fixture() -> Vec<FixtureRow> {
    parse_fixture(APPENDIX_FIXTURE).expect("embedded reference table parses")
}

/// Structural comparison of one arrangement with the fixture row: the first
/// two slots and the b-carrying slots exactly (on the hyperplane), the
/// middle slots as multisets.
pub fn arrangement_matches(color: OrbitColor, args: &[LinForm], fa: &[LinForm]) -> std::result::Result<(), String> {
    let fixed: &[usize] = if color == OrbitColor::J { &[0, 1, 6, 7] } else { &[0, 1, 7] };
    for &k in fixed {
        if !args[k].eq_on_hyperplane(&fa[k]) {
            return Err(format!("slot {}: {} vs {}", k + 1, args[k], fa[k]));
        }
    }
    let key = |v: &[LinForm]| {
        let mut s: Vec<String> = (0..8).filter(|k| !fixed.contains(k)).map(|k| v[k].reduced().to_string()).collect();
        s.sort();
        s
    };
    if key(args) != key(fa) {
        return Err(format!("middle slots differ: {:?} vs {:?}", key(args), key(fa)));
    }
    Ok(())
}

/// Checks that the fixture row is one of the admissible arrangements of the
/// generated coset vector. Returns the index of that arrangement.
pub fn rows_match(gen: &AppendixRow, fix: &FixtureRow) -> std::result::Result<usize, String> {
    if gen.label != fix.label || gen.color != fix.color || gen.target_label != fix.target_label {
        return Err(format!("label/color/target mismatch for {}", gen.label));
    }
    let fa = normal_form(fix.label, &fix.m_args).map_err(|e| e.to_string())?;
    gen.arrangements
        .iter()
        .position(|a| arrangement_matches(gen.color, a, &fa).is_ok())
        .ok_or_else(|| {
            let why = arrangement_matches(gen.color, &gen.m_args, &fa).err().unwrap_or_default();
            format!("{}: no admissible arrangement matches ({why})", gen.label)
        })
}

/// Reference-table target arguments agree with the limit formula read off the
/// fixture's own M arguments for some order of the b-free middle slots, up
/// to the symmetries of J (`B,C,D` and `E,F,G`) or L (`A,B,C,D` and `F,G`).
pub fn fixture_target_consistent(fix: &FixtureRow) -> std::result::Result<(), String> {
    let fa = normal_form(fix.label, &fix.m_args).map_err(|e| e.to_string())?;
    let groups: &[std::ops::Range<usize>] =
        if fix.color == OrbitColor::J { &[0..1, 1..4, 4..7] } else { &[0..4, 4..5, 5..7] };
    let key = |v: &[LinForm]| {
        groups
            .iter()
            .map(|g| {
                let mut s: Vec<String> = v[g.clone()].iter().map(|f| f.reduced().to_string()).collect();
                s.sort();
                s
            })
            .collect::<Vec<_>>()
    };
    let want = key(&fix.target_args);
    let middle: Vec<usize> = if fix.color == OrbitColor::J { (2..6).collect() } else { (2..7).collect() };
    let mut order = middle.clone();
    let mut found = false;
    permute(&mut order, 0, &mut |perm| {
        let mut args = fa.clone();
        for (slot, src) in middle.iter().zip(perm) {
            args[*slot] = fa[*src];
        }
        found |= key(limit_target(fix.color, &args).args()) == want;
    });
    if found {
        Ok(())
    } else {
        Err(format!("{}: no order of the middle slots gives the listed target", fix.label))
    }
}

fn permute(v: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == v.len() {
        visit(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, visit);
        v.swap(k, i);
    }
}

/// The normalizing Gamma quotient of the limit formula, with the letters
/// `a..h` read as the slots of `s`.
pub fn normalizer_for(color: OrbitColor, s: &[LinForm]) -> GammaSinExpr {
    let one = LinForm::constant_form(Side::W, Rat::ONE);
    let (a, b, g, h) = (s[0], s[1], s[6], s[7]);
    match color {
        OrbitColor::BlueL | OrbitColor::RedL => {
            let mut num = vec![one + a - h];
            num.extend(s[2..7].iter().map(|x| b - a + *x));
            GammaSinExpr::one().gammas(&num).over_gammas(&[b - a])
        }
        OrbitColor::J => GammaSinExpr::one().gammas(&[one - b, one + a - g, one + a - h, b - a + g, b - a + h]),
    }
}

/// The function a normalized arrangement tends to, read off its slots.
pub fn limit_target(color: OrbitColor, s: &[LinForm]) -> FunTerm {
    let one = LinForm::constant_form(Side::W, Rat::ONE);
    let (a, b, c, d, e, f, g) = (s[0], s[1], s[2], s[3], s[4], s[5], s[6]);
    let args = match color {
        OrbitColor::BlueL | OrbitColor::RedL => vec![e, f, g, one + a - c - d, e + f + g - a, one + a - c, one + a - d],
        OrbitColor::J => vec![b, c, d, one + a - e - f, b + c + d - a, one + a - e, one + a - f],
    };
    let kind = if color == OrbitColor::J { FunKind::J } else { FunKind::L };
    FunTerm::new(kind, args.iter().map(LinForm::reduced).collect()).expect("limit target on the hyperplane")
}

pub fn limit_normalizer(row: &AppendixRow) -> GammaSinExpr {
    normalizer_for(row.color, &row.m_args)
}

pub fn limit_formula_target(row: &AppendixRow) -> FunTerm {
    limit_target(row.color, &row.m_args)
}

pub const DEFAULT_SHIFTS: [f64; 3] = [8.0, 16.0, 32.0];
/// Required ratio of the last to the first error in a limit report.
pub const LIMIT_FACTOR: f64 = 0.6;

#[derive(Clone, Debug, Serialize)]
pub struct LimitReport {
    pub label: String,
    pub shifts: Vec<f64>,
    pub errors: Vec<f64>,
    pub target: [f64; 2],
    pub verdict: bool,
    pub diagnostic: Option<String>,
}

pub fn limit_verdict(errors: &[f64]) -> bool {
    errors.len() >= 2
        && errors.windows(2).all(|w| w[1] < w[0])
        && errors[errors.len() - 1] <= LIMIT_FACTOR * errors[0]
}

pub fn table_row(t: MLabel) -> Result<&'static AppendixRow> {
    appendix_table()?
        .iter()
        .find(|r| r.label == t)
        .ok_or_else(|| Error::Malformed(format!("no row for {t}")))
}

/// Shifted points `b -> b + iT` for every `T`.
pub fn shifted_points(p: &PointW, shifts: &[f64]) -> Vec<PointW> {
    shifts.iter().map(|&t| p.shift_b(CNum::new(0.0, t))).collect()
}

/// Margins of every evaluation `check_limit` performs at `p`.
pub fn limit_margins(row: &AppendixRow, p: &PointW, shifts: &[f64]) -> Margins {
    let mut m = gamma2_target(row.label).margins(p.coords());
    for q in shifted_points(p, shifts) {
        m.extend(&row.m_term().margins(q.coords()));
        m.extend(&limit_normalizer(row).margins(q.coords()));
    }
    m
}

pub fn check_limit(row: &AppendixRow, p: &PointW, shifts: &[f64], ctrl: &SeriesCtrl) -> LimitReport {
    let mut report = LimitReport {
        label: row.label.to_string(),
        shifts: shifts.to_vec(),
        errors: vec![],
        target: [f64::NAN; 2],
        verdict: false,
        diagnostic: None,
    };
    let run = |report: &mut LimitReport| -> Result<()> {
        let target = gamma2_target(row.label).evaluate(p.coords(), ctrl)?.value * (PI / 2.0);
        report.target = [target.re, target.im];
        let norm = limit_normalizer(row);
        for q in shifted_points(p, shifts) {
            let m = row.m_term().evaluate(q.coords(), ctrl)?;
            let n = norm.log_eval(q.coords())?.expect("non-zero normalizer");
            let val = n.times(m.value);
            report.errors.push((val - target).norm() / target.norm());
        }
        Ok(())
    };
    match run(&mut report) {
        Ok(()) => report.verdict = limit_verdict(&report.errors),
        Err(e) => report.diagnostic = Some(e.to_string()),
    }
    report
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineReport {
    pub point: Value,
    pub shifts: Vec<f64>,
    pub roy463_residual: f64,
    pub roy463b_residuals: Vec<f64>,
    /// `|ratio - 1|` for the whole Pochhammer bracket.
    pub pochhammer_errors: Vec<f64>,
    /// `|factor - 1|` for each of its two factors, and the ratio of
    /// successive errors per doubling of the shift.
    pub factor_errors: [Vec<f64>; 2],
    pub factor_halving: [Vec<f64>; 2],
    /// Per roy463b term, the relative distance to its limit term at each shift.
    pub term_errors: [Vec<f64>; 3],
    pub orbit1jll_residual: f64,
    pub verdict: bool,
    pub failures: Vec<String>,
}

/// Tolerances for the 222 pipeline.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PipelineTol {
    pub roy463: f64,
    pub orbit1jll: f64,
    pub halving: (f64, f64),
}

impl Default for PipelineTol {
    fn default() -> PipelineTol {
        PipelineTol { roy463: 1e-5, orbit1jll: 1e-7, halving: (0.3, 0.7) }
    }
}

/// Limit terms of roy463b, in roy463b term order: `L_4`, `J_p0` and `L_5`
/// terms of orbit1jll at `x = newxdef(w)`.
pub fn orbit1jll_at_newx() -> Relation {
    let base = orbit1jll();
    let images = newxdef();
    let sub = translate_to(&base, images.entries());
    Relation {
        name: "orbit1jll(newx)".into(),
        side: Side::W,
        terms: vec![sub.terms[1].clone(), sub.terms[0].clone(), sub.terms[2].clone()],
        provenance: base.provenance,
    }
}

fn translate_to(r: &Relation, images: &[LinForm]) -> Relation {
    Relation {
        name: r.name.clone(),
        side: images[0].side(),
        terms: r
            .terms
            .iter()
            .map(|t| RelationTerm { coef: t.coef.map_forms(|f| f.substitute(images)), fun: t.fun.substitute(images) })
            .collect(),
        provenance: r.provenance.clone(),
    }
}

pub fn pipeline_margins(p: &PointW, shifts: &[f64]) -> Margins {
    let mut m = roy463().margins(p.coords());
    m.extend(&orbit1jll_at_newx().margins(p.coords()));
    for q in shifted_points(p, shifts) {
        m.extend(&roy463b().margins(q.coords()));
    }
    m
}

fn term_value(t: &RelationTerm, point: &[CNum], ctrl: &SeriesCtrl) -> Result<CNum> {
    let c = t.coef.log_eval(point)?.ok_or_else(|| Error::Precondition("zero coefficient".into()))?;
    Ok(c.times(t.fun.evaluate(point, ctrl)?.value))
}

pub fn limit222_pipeline(p: &PointW, shifts: &[f64], ctrl: &SeriesCtrl, tol: &PipelineTol) -> Result<PipelineReport> {
    let mut failures = Vec::new();
    let roy = eval_relation(&roy463(), p.coords(), ctrl)?.residual;
    if roy > tol.roy463 {
        failures.push(format!("roy463 residual {roy:.3e} > {:.1e}", tol.roy463));
    }
    let limit_rel = orbit1jll_at_newx();
    let limits: Vec<CNum> = limit_rel.terms.iter().map(|t| term_value(t, p.coords(), ctrl)).collect::<Result<_>>()?;
    let scale = limits.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let jll = eval_relation(&limit_rel, p.coords(), ctrl)?.residual;
    if jll > tol.orbit1jll {
        failures.push(format!("orbit1jll residual {jll:.3e} > {:.1e}", tol.orbit1jll));
    }
    let rb = roy463b();
    let ratio = pochhammer_ratio_222();
    let factors = pochhammer_factors_222();
    let mut rb_res = Vec::new();
    let mut poch = Vec::new();
    let mut factor_errors: [Vec<f64>; 2] = Default::default();
    let mut term_errors: [Vec<f64>; 3] = Default::default();
    for q in shifted_points(p, shifts) {
        let r = eval_relation(&rb, q.coords(), ctrl)?.residual;
        if r > tol.roy463 {
            failures.push(format!("roy463b residual {r:.3e} > {:.1e} at Im shift {}", tol.roy463, q.coords()[1].im - p.coords()[1].im));
        }
        rb_res.push(r);
        poch.push((ratio.eval(q.coords())? - 1.0).norm());
        for (k, f) in factors.iter().enumerate() {
            factor_errors[k].push((f.eval(q.coords())? - 1.0).norm());
        }
        for (k, t) in rb.terms.iter().enumerate() {
            let val = term_value(t, q.coords(), ctrl)?;
            term_errors[k].push((val - limits[k]).norm() / scale);
        }
    }
    if !poch.windows(2).all(|w| w[1] < w[0]) {
        failures.push(format!("Pochhammer bracket errors not strictly decreasing: {poch:?}"));
    }
    let factor_halving = factor_errors.clone().map(|e| e.windows(2).map(|w| w[1] / w[0]).collect::<Vec<f64>>());
    for (k, h) in factor_halving.iter().enumerate() {
        if let Some(x) = h.iter().find(|x| **x < tol.halving.0 || **x > tol.halving.1) {
            failures.push(format!("Pochhammer factor {} error ratio {x:.3} outside [{}, {}]", k + 1, tol.halving.0, tol.halving.1));
        }
    }
    for (k, errs) in term_errors.iter().enumerate() {
        if !errs.windows(2).all(|w| w[1] < w[0]) {
            failures.push(format!("term {} errors not strictly decreasing: {errs:?}", k + 1));
        }
    }
    Ok(PipelineReport {
        point: p.to_json(),
        shifts: shifts.to_vec(),
        roy463_residual: roy,
        roy463b_residuals: rb_res,
        pochhammer_errors: poch,
        factor_errors,
        factor_halving,
        term_errors,
        orbit1jll_residual: jll,
        verdict: failures.is_empty(),
        failures,
    })
}

/// Q generators and their images `m(g)` in H1.
pub fn q_generator_pairs() -> Vec<(Gen, Gen)> {
    Q_GENS.iter().map(|&g| (g, m_iso(g).expect("Q generator"))).collect()
}

/// `x_0..x_5` as forms in `A..G`, inverting the twiddle parametrisation.
pub fn twiddle_inverse() -> [LinForm; 6] {
    let s = |t: &str| form(Side::V, t);
    let quarter = Rat::new(1, 4);
    let half = Rat::new(1, 2);
    let sum = s("E+F+G-3").scale(quarter);
    [
        s("F+G-E-1").scale(quarter),
        s("E+F-G-1").scale(quarter),
        s("E+G-F-1").scale(quarter),
        s("A+C-1").scale(half) - sum,
        s("A+D-1").scale(half) - sum,
        s("A+B-1").scale(half) - sum,
    ]
}

/// Twiddle parameters of `y_i = sign_i x_perm(i)` as forms in `A..G`.
pub fn twiddled_forms(perm: [usize; 6], negate: [bool; 6]) -> Vec<LinForm> {
    let x = twiddle_inverse();
    let y: Vec<LinForm> = (0..6).map(|i| if negate[i] { -x[perm[i]] } else { x[perm[i]] }).collect();
    let half = LinForm::constant_form(Side::V, Rat::new(1, 2));
    let one = LinForm::constant_form(Side::V, Rat::ONE);
    let two = Rat::int(2);
    let base = half + y[0] + y[1] + y[2];
    vec![
        base + y[3] + y[4] + y[5],
        base - y[3] - y[4] + y[5],
        base + y[3] - y[4] - y[5],
        base - y[3] + y[4] - y[5],
        one + (y[1] + y[2]).scale(two),
        one + (y[0] + y[1]).scale(two),
        one + (y[0] + y[2]).scale(two),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xfromw_is_saalschutzian_and_b_free() {
        let x = xfromw();
        let term = FunTerm::new(FunKind::J, x.entries().to_vec()).unwrap();
        assert!(term.args().iter().all(|f| f.coef(1).is_zero() && f.coef(7).is_zero()));
        assert_eq!(x[6].to_string(), "2+a-e-f-g");
        FunTerm::new(FunKind::J, newxdef().entries().to_vec()).unwrap();
    }

    #[test]
    fn builtins_construct() {
        let r = builtin_relations();
        assert_eq!(r.len(), 3);
        assert_eq!(r["roy463"].terms[0].coef.to_string(), "1 sin pi(-a+b) / [Gamma(-a+c+d) Gamma(-a+c+e) Gamma(-a+c+f) Gamma(-a+c+g) Gamma(-a+c+h)]");
        assert_eq!(r["orbit1jll"].terms[2].coef.to_string(), "-1 sin pi(-A+E) / [Gamma(-A+F) Gamma(-B+F) Gamma(-C+F) Gamma(-D+F)]");
        assert!(FunTerm::parse(FunKind::M, Side::W, &["a", "b", "c", "d", "e", "f", "g", "g"]).is_err());
    }

    #[test]
    fn relation_labels() {
        let labels: Vec<String> = roy463().labels().into_iter().map(|l| l.unwrap().to_string()).collect();
        assert_eq!(labels, ["+v(0,7)", "+v(6,7)", "+v(0,6)"]);
        let labels: Vec<String> = orbit1jll().labels().into_iter().map(|l| l.unwrap().to_string()).collect();
        assert_eq!(labels, ["p0", "4", "5"]);
    }

    #[test]
    fn l_rows_examples() {
        let id = SymVec::identity(Side::V);
        let s = |v: Vec<LinForm>| v.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(",");
        assert_eq!(s(l_row(LLabel::new(6, false), &id)), "A,B,C,D,G,F,E");
        assert_eq!(s(l_row(LLabel::new(2, false), &id)), "A,1+A-E,1+A-F,1+A-G,1+A-C,1+A-B,1+A-D");
        assert_eq!(s(l_row(LLabel::new(3, true), &id)), "1-A,-A+E,-A+F,-A+G,1-A+D,1-A+B,1-A+C");
        assert_eq!(s(l_row(LLabel::new(4, true), &id)), "1-A,1-B,1-C,1-D,2-E,2-F,2-G");
        for mu in LLabel::all() {
            assert_eq!(classify_l(&l_row(mu, &id)).unwrap(), mu);
        }
    }

    #[test]
    fn translation_by_empty_word_is_identity() {
        let r = roy463();
        assert_eq!(translate_relation(&r, &GenWord(vec![])).unwrap(), r);
        assert!(translate_relation(&r, &GenWord(vec![Gen::A1])).is_err());
    }

    #[test]
    fn zero_relation_guard() {
        let mut r = orbit1jll();
        for t in r.terms.iter_mut() {
            t.coef.prefactor = Rat::ZERO;
        }
        let x = crate::hypnum::PointV::new([CNum::new(0.31, 0.1), CNum::new(0.47, -0.2), CNum::new(0.62, 0.05), CNum::new(0.28, 0.1), CNum::new(0.83, -0.07), CNum::new(0.55, 0.22)]);
        let rep = eval_relation(&r, x.coords(), &SeriesCtrl::default()).unwrap();
        assert_eq!(rep.residual, 0.0);
        assert!(rep.warning.is_some());
    }

    #[test]
    fn twiddle_identity_transform() {
        let f = twiddled_forms([0, 1, 2, 3, 4, 5], [false; 6]);
        let id = SymVec::identity(Side::V);
        for (a, b) in f.iter().zip(id.entries()) {
            assert!(a.eq_on_hyperplane(b), "{a} vs {b}");
        }
    }
}
