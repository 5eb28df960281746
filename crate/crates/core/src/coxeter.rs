//! Coset labels and their generator actions, the discrete and T-distances,
//! the label map `gamma1`, and orbit censuses of labels and label triples.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactalg::{Gen, LinForm, RatMatrix, Side, SymVec, V_GENS, W_GENS};

/// W-symbol index of `x_k`: `x0=b, x1=h, x2=g, x3=f, x4=e, x5=d, x6=c, x7=a`.
pub const X_SYMBOL: [usize; 8] = [1, 7, 6, 5, 4, 3, 2, 0];

/// `+v(i,j)` or `-v(i,j)` with `i < j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MLabel {
    pub neg: bool,
    pub i: u8,
    pub j: u8,
}

impl MLabel {
    pub fn new(neg: bool, i: u8, j: u8) -> MLabel {
        assert!(i != j && i < 8 && j < 8, "bad v({i},{j})");
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        MLabel { neg, i, j }
    }

    pub fn pos(i: u8, j: u8) -> MLabel {
        MLabel::new(false, i, j)
    }

    pub fn neg(i: u8, j: u8) -> MLabel {
        MLabel::new(true, i, j)
    }

    /// All 56 labels: positive ones first, pairs in lexicographic order.
    pub fn all() -> Vec<MLabel> {
        let mut out = Vec::with_capacity(56);
        for neg in [false, true] {
            for i in 0..8 {
                for j in i + 1..8 {
                    out.push(MLabel { neg, i, j });
                }
            }
        }
        out
    }

    pub fn index(self) -> usize {
        let pair = (0..self.i as usize).map(|k| 7 - k).sum::<usize>() + (self.j - self.i - 1) as usize;
        pair + if self.neg { 28 } else { 0 }
    }

    pub fn negate(self) -> MLabel {
        MLabel { neg: !self.neg, ..self }
    }

    /// The second entry of `alpha * w` for any `alpha` in this coset.
    pub fn second_entry(self) -> LinForm {
        let x = |k: u8| LinForm::symbol(Side::W, X_SYMBOL[k as usize]);
        let f = x(self.i) + x(self.j) - x(7);
        if self.neg {
            (-f).add_const(1.into())
        } else {
            f
        }
    }
}

impl fmt::Display for MLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}v({},{})", if self.neg { '-' } else { '+' }, self.i, self.j)
    }
}

impl FromStr for MLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<MLabel> {
        let bad = || Error::Parse(format!("bad M label `{s}`"));
        let t = s.trim();
        let (neg, rest) = match t.chars().next() {
            Some('-') | Some('\u{2212}') => (true, &t[t.char_indices().nth(1).map_or(t.len(), |c| c.0)..]),
            Some('+') => (false, &t[1..]),
            _ => (false, t),
        };
        let inner = rest.strip_prefix("v(").and_then(|r| r.strip_suffix(')')).ok_or_else(bad)?;
        let (a, b) = inner.split_once(',').ok_or_else(bad)?;
        let i: u8 = a.trim().parse().map_err(|_| bad())?;
        let j: u8 = b.trim().parse().map_err(|_| bad())?;
        if i == j || i > 7 || j > 7 {
            return Err(bad());
        }
        Ok(MLabel::new(neg, i, j))
    }
}

impl Serialize for MLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

const B_TRIPLES: [u8; 4] = [0b000, 0b110, 0b101, 0b011];

/// A six-sign string with evenly many minus signs. Bit `k` set means a
/// minus sign in position `k+1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JLabel(u8);

impl JLabel {
    pub fn from_bits(bits: u8) -> Result<JLabel> {
        if bits >= 64 || bits.count_ones() % 2 != 0 {
            return Err(Error::Malformed(format!("sign mask {bits:#08b} has odd parity")));
        }
        Ok(JLabel(bits))
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    /// `p_k` for `neg == false`, `n_k` otherwise, `0 <= k <= 15`.
    pub fn from_index(neg: bool, k: u8) -> JLabel {
        assert!(k < 16);
        let (q, r) = (k / 4, k % 4);
        let bits = B_TRIPLES[r as usize] | (B_TRIPLES[q as usize] << 3);
        JLabel(if neg { bits ^ 0b111111 } else { bits })
    }

    pub fn index(self) -> (bool, u8) {
        let lo = self.0 & 0b111;
        let neg = lo.count_ones() % 2 == 1;
        let bits = if neg { self.0 ^ 0b111111 } else { self.0 };
        let r = B_TRIPLES.iter().position(|&b| b == bits & 0b111).unwrap() as u8;
        let q = B_TRIPLES.iter().position(|&b| b == bits >> 3).unwrap() as u8;
        (neg, 4 * q + r)
    }

    pub fn all() -> Vec<JLabel> {
        (0..64u8).filter(|b| b.count_ones() % 2 == 0).map(JLabel).collect()
    }

    /// Sign at 1-based position `k`; true means plus.
    pub fn plus_at(self, k: usize) -> bool {
        self.0 & (1 << (k - 1)) == 0
    }

    pub fn negate(self) -> JLabel {
        JLabel(self.0 ^ 0b111111)
    }

    pub fn signs(self) -> String {
        (1..=6).map(|k| if self.plus_at(k) { '+' } else { '-' }).collect()
    }

    pub fn parse_signs(s: &str) -> Result<JLabel> {
        let chars: Vec<char> = s.trim().chars().collect();
        if chars.len() != 6 {
            return Err(Error::Parse(format!("bad sign string `{s}`")));
        }
        let mut bits = 0u8;
        for (k, c) in chars.iter().enumerate() {
            match c {
                '+' => {}
                '-' | '\u{2212}' => bits |= 1 << k,
                _ => return Err(Error::Parse(format!("bad sign string `{s}`"))),
            }
        }
        JLabel::from_bits(bits)
    }

    pub fn hamming(self, o: JLabel) -> u32 {
        (self.0 ^ o.0).count_ones()
    }
}

impl fmt::Display for JLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (neg, k) = self.index();
        write!(f, "{}{}", if neg { 'n' } else { 'p' }, k)
    }
}

impl FromStr for JLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<JLabel> {
        let t = s.trim();
        let bad = || Error::Parse(format!("bad J label `{s}`"));
        match t.chars().next() {
            Some(c @ ('p' | 'n')) => {
                let k: u8 = t[1..].parse().map_err(|_| bad())?;
                if k > 15 {
                    return Err(bad());
                }
                Ok(JLabel::from_index(c == 'n', k))
            }
            _ => JLabel::parse_signs(t),
        }
    }
}

impl Serialize for JLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// One of `1..6` or `1bar..6bar`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LLabel {
    pub bar: bool,
    pub idx: u8,
}

impl LLabel {
    pub fn new(idx: u8, bar: bool) -> LLabel {
        assert!((1..=6).contains(&idx));
        LLabel { bar, idx }
    }

    pub fn all() -> Vec<LLabel> {
        [false, true]
            .into_iter()
            .flat_map(|bar| (1..=6).map(move |idx| LLabel { bar, idx }))
            .collect()
    }

    pub fn index(self) -> usize {
        (self.idx - 1) as usize + if self.bar { 6 } else { 0 }
    }

    pub fn toggle(self) -> LLabel {
        LLabel { bar: !self.bar, ..self }
    }
}

impl fmt::Display for LLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.idx, if self.bar { "bar" } else { "" })
    }
}

impl FromStr for LLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<LLabel> {
        let t = s.trim();
        let (num, bar) = match t.strip_suffix("bar") {
            Some(n) => (n, true),
            None => (t, false),
        };
        match num.parse::<u8>() {
            Ok(idx) if (1..=6).contains(&idx) => Ok(LLabel { bar, idx }),
            _ => Err(Error::Parse(format!("bad L label `{s}`"))),
        }
    }
}

impl Serialize for LLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A coset of either `G_L` or `G_J` in `H1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TLabel {
    L(LLabel),
    J(JLabel),
}

impl TLabel {
    pub fn all() -> Vec<TLabel> {
        LLabel::all()
            .into_iter()
            .map(TLabel::L)
            .chain(JLabel::all().into_iter().map(TLabel::J))
            .collect()
    }

    pub fn is_l(self) -> bool {
        matches!(self, TLabel::L(_))
    }
}

impl fmt::Display for TLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TLabel::L(l) => write!(f, "{l}"),
            TLabel::J(j) => write!(f, "{j}"),
        }
    }
}

impl FromStr for TLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<TLabel> {
        let t = s.trim();
        if t.starts_with(|c: char| c.is_ascii_digit()) {
            t.parse().map(TLabel::L)
        } else {
            t.parse().map(TLabel::J)
        }
    }
}

impl Serialize for TLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum OrbitColor {
    BlueL,
    RedL,
    J,
}

impl fmt::Display for OrbitColor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OrbitColor::BlueL => "blue",
            OrbitColor::RedL => "red",
            OrbitColor::J => "J",
        })
    }
}

/// Label action of a W-side generator.
pub fn act_m(g: Gen, t: MLabel) -> MLabel {
    let swap = |a: u8, b: u8| {
        let rho = |x: u8| if x == a { b } else if x == b { a } else { x };
        MLabel::new(t.neg, rho(t.i), rho(t.j))
    };
    match g {
        Gen::S1 => swap(6, 7),
        Gen::S2 => swap(5, 6),
        Gen::S3 => swap(4, 5),
        Gen::S4 => swap(3, 4),
        Gen::S5 => swap(2, 3),
        Gen::S6 => swap(1, 2),
        Gen::S3p => {
            for block in [[0u8, 1, 2, 3], [4, 5, 6, 7]] {
                if block.contains(&t.i) && block.contains(&t.j) {
                    let rest: Vec<u8> = block.into_iter().filter(|x| *x != t.i && *x != t.j).collect();
                    return MLabel::new(!t.neg, rest[0], rest[1]);
                }
            }
            t
        }
        _ => panic!("{g} does not act on M cosets"),
    }
}

/// Label action of a V-side generator on J cosets.
pub fn act_j(g: Gen, t: JLabel) -> JLabel {
    let bit = |b: u8, k: usize| (b >> (k - 1)) & 1;
    let swap = |k: usize| {
        let (x, y) = (bit(t.0, k), bit(t.0, k + 1));
        let mut b = t.0 & !(1 << (k - 1)) & !(1 << k);
        b |= y << (k - 1);
        b |= x << k;
        JLabel(b)
    };
    match g {
        Gen::A1 => swap(1),
        Gen::A2 => swap(2),
        Gen::A3 => swap(3),
        Gen::A4 => swap(4),
        Gen::A5 => swap(5),
        Gen::A1p => {
            let (x, y) = (bit(t.0, 1), bit(t.0, 2));
            JLabel((t.0 & !0b11) | (y ^ 1) | ((x ^ 1) << 1))
        }
        _ => panic!("{g} does not act on J cosets"),
    }
}

/// Label action of a V-side generator on L cosets.
pub fn act_l(g: Gen, t: LLabel) -> LLabel {
    let swap = |k: u8| {
        let idx = if t.idx == k { k + 1 } else if t.idx == k + 1 { k } else { t.idx };
        LLabel { idx, ..t }
    };
    match g {
        Gen::A1 => swap(1),
        Gen::A2 => swap(2),
        Gen::A3 => swap(3),
        Gen::A4 => swap(4),
        Gen::A5 => swap(5),
        Gen::A1p => match t.idx {
            1 => LLabel { idx: 2, bar: !t.bar },
            2 => LLabel { idx: 1, bar: !t.bar },
            _ => t,
        },
        _ => panic!("{g} does not act on L cosets"),
    }
}

pub fn act_t(g: Gen, t: TLabel) -> TLabel {
    match t {
        TLabel::L(l) => TLabel::L(act_l(g, l)),
        TLabel::J(j) => TLabel::J(act_j(g, j)),
    }
}

pub fn central_m(t: MLabel) -> MLabel {
    t.negate()
}

pub fn central_t(t: TLabel) -> TLabel {
    match t {
        TLabel::L(l) => TLabel::L(l.toggle()),
        TLabel::J(j) => TLabel::J(j.negate()),
    }
}

fn second_entry_table() -> &'static HashMap<LinForm, MLabel> {
    static TABLE: std::sync::OnceLock<HashMap<LinForm, MLabel>> = std::sync::OnceLock::new();
    TABLE.get_or_init(|| MLabel::all().into_iter().map(|t| (t.second_entry().reduced(), t)).collect())
}

/// Reads the M coset label off the second entry of `alpha * w`.
pub fn coset_classify_m(v: &SymVec) -> Result<MLabel> {
    if v.side() != Side::W || v.len() != 8 {
        return Err(Error::Malformed("expected an 8-entry W-side vector".into()));
    }
    second_entry_table()
        .get(&v[1].reduced())
        .copied()
        .ok_or_else(|| Error::Malformed(format!("second entry {} matches no M coset", v[1])))
}

/// `(1 + A_r - E_q)` for `p_{4q+r}`, `E_q - A_r` for `n_{4q+r}`.
pub fn j_first_coordinate(t: JLabel) -> LinForm {
    let (neg, k) = t.index();
    let (q, r) = ((k / 4) as usize, (k % 4) as usize);
    let a = LinForm::symbol(Side::V, r);
    let e = if q == 0 {
        LinForm::constant_form(Side::V, 1.into())
    } else {
        LinForm::symbol(Side::V, 3 + q)
    };
    if neg {
        e - a
    } else {
        (a - e).add_const(1.into())
    }
}

fn first_coordinate_table() -> &'static HashMap<LinForm, JLabel> {
    static TABLE: std::sync::OnceLock<HashMap<LinForm, JLabel>> = std::sync::OnceLock::new();
    TABLE.get_or_init(|| JLabel::all().into_iter().map(|t| (j_first_coordinate(t).reduced(), t)).collect())
}

/// Reads the J coset label off the first entry of `beta * x`.
pub fn coset_classify_j(v: &SymVec) -> Result<JLabel> {
    if v.side() != Side::V || v.len() != 7 {
        return Err(Error::Malformed("expected a 7-entry V-side vector".into()));
    }
    classify_j_first(&v[0])
}

pub fn classify_j_first(first: &LinForm) -> Result<JLabel> {
    first_coordinate_table()
        .get(&first.reduced())
        .copied()
        .ok_or_else(|| Error::Malformed(format!("first entry {first} matches no J coset")))
}

pub fn gamma1(t: MLabel) -> (OrbitColor, TLabel) {
    let l = |j: u8, bar| TLabel::L(LLabel::new(j - 1, bar));
    match (t.neg, t.i, t.j) {
        (false, 0, 1) => (OrbitColor::J, TLabel::J(JLabel(0))),
        (true, 0, 1) => (OrbitColor::J, TLabel::J(JLabel(0b111111))),
        (false, 0, j) => (OrbitColor::BlueL, l(j, false)),
        (true, 1, j) => (OrbitColor::BlueL, l(j, true)),
        (false, 1, j) => (OrbitColor::RedL, l(j, false)),
        (true, 0, j) => (OrbitColor::RedL, l(j, true)),
        (neg, i, j) => {
            let plus = (1u8 << (i - 2)) | (1u8 << (j - 2));
            let label = JLabel(0b111111 ^ plus);
            (OrbitColor::J, TLabel::J(if neg { label.negate() } else { label }))
        }
    }
}

pub fn color_of(t: MLabel) -> OrbitColor {
    gamma1(t).0
}

/// Blue preimage of an L label, or the unique preimage of a J label.
pub fn gamma1_preimage(t: TLabel) -> MLabel {
    match t {
        TLabel::L(l) if l.bar => MLabel::neg(1, l.idx + 1),
        TLabel::L(l) => MLabel::pos(0, l.idx + 1),
        TLabel::J(j) => {
            if j.bits() == 0 {
                return MLabel::pos(0, 1);
            }
            if j.bits() == 0b111111 {
                return MLabel::neg(0, 1);
            }
            let (neg, s) = if j.bits().count_ones() == 4 { (false, j) } else { (true, j.negate()) };
            let plus: Vec<u8> = (1..=6u8).filter(|&k| s.plus_at(k as usize)).collect();
            MLabel::new(neg, plus[0] + 1, plus[1] + 1)
        }
    }
}

/// `m(s_k) = a_{6-k}`, `m(s3') = a1'`.
pub fn m_iso(g: Gen) -> Result<Gen> {
    Ok(match g {
        Gen::S1 => Gen::A5,
        Gen::S2 => Gen::A4,
        Gen::S3 => Gen::A3,
        Gen::S4 => Gen::A2,
        Gen::S5 => Gen::A1,
        Gen::S3p => Gen::A1p,
        other => return Err(Error::UnknownGenerator(format!("{other} is not a generator of Q"))),
    })
}

pub const Q_GENS: [Gen; 6] = [Gen::S1, Gen::S2, Gen::S3, Gen::S4, Gen::S5, Gen::S3p];

/// The three Q-orbits on M labels: blue, red, J. Each sorted.
pub fn orbits_q() -> [Vec<MLabel>; 3] {
    let mut seen = HashSet::new();
    let mut orbits = Vec::new();
    for start in MLabel::all() {
        if seen.contains(&start) {
            continue;
        }
        let mut orbit = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(t) = queue.pop_front() {
            for g in Q_GENS {
                let u = act_m(g, t);
                if orbit.insert(u) {
                    queue.push_back(u);
                }
            }
        }
        seen.extend(orbit.iter().copied());
        orbits.push(orbit);
    }
    let pick = |t: MLabel| -> Vec<MLabel> {
        orbits.iter().find(|o| o.contains(&t)).expect("label in some orbit").iter().copied().collect()
    };
    assert_eq!(orbits.len(), 3, "Q has three orbits on M cosets");
    [pick(MLabel::pos(0, 2)), pick(MLabel::neg(0, 2)), pick(MLabel::pos(0, 1))]
}

pub fn vij_vector(t: MLabel) -> [i32; 8] {
    let mut v = [-1i32; 8];
    v[t.i as usize] += 4;
    v[t.j as usize] += 4;
    if t.neg {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    v
}

pub fn dd(u: MLabel, v: MLabel) -> u32 {
    let (a, b) = (vij_vector(u), vij_vector(v));
    let s: i32 = a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum();
    debug_assert_eq!(s % 16, 0);
    (s / 16) as u32
}

/// Discrete distance by the shared-index case table.
pub fn dd_by_cases(u: MLabel, v: MLabel) -> u32 {
    if u == v {
        return 0;
    }
    if u == v.negate() {
        return 6;
    }
    let shared = [u.i, u.j].iter().filter(|x| **x == v.i || **x == v.j).count();
    match (shared, u.neg == v.neg) {
        (1, true) | (0, false) => 2,
        (0, true) | (1, false) => 4,
        _ => unreachable!("pair sharing both indices is equal or opposite"),
    }
}

pub fn t_distance(s: TLabel, t: TLabel) -> u32 {
    dd(gamma1_preimage(s), gamma1_preimage(t))
}

/// Distance on T read directly off the labels: Hamming on J pairs, and for
/// pairs with an L label 0 / 2 / 4 for equal / not opposite / opposite.
/// Opposite L-J pairs are detected through the L label's preimage.
pub fn t_distance_by_cases(s: TLabel, t: TLabel) -> u32 {
    match (s, t) {
        (TLabel::J(a), TLabel::J(b)) => a.hamming(b),
        (TLabel::L(a), TLabel::L(b)) => {
            if a == b {
                0
            } else if a == b.toggle() {
                4
            } else {
                2
            }
        }
        (TLabel::L(l), TLabel::J(j)) | (TLabel::J(j), TLabel::L(l)) => {
            // unbarred label i meets a plus sign in position i at distance 2
            if j.plus_at(l.idx as usize) != l.bar {
                2
            } else {
                4
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Space {
    M,
    J,
    L,
    T,
}

impl FromStr for Space {
    type Err = Error;
    fn from_str(s: &str) -> Result<Space> {
        match s.trim() {
            "M" | "m" => Ok(Space::M),
            "J" | "j" => Ok(Space::J),
            "L" | "l" => Ok(Space::L),
            "T" | "t" => Ok(Space::T),
            _ => Err(Error::Parse(format!("unknown space `{s}`"))),
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// A label space encoded as `0..n` with one permutation per generator.
pub struct LabelSpace {
    pub space: Space,
    pub names: Vec<String>,
    pub perms: Vec<Vec<usize>>,
    dist: Vec<u32>,
    kinds: Vec<char>,
}

impl LabelSpace {
    pub fn new(space: Space) -> LabelSpace {
        match space {
            Space::M => {
                let all = MLabel::all();
                Self::build(space, &all, &W_GENS, act_m, dd, |_| 'M')
            }
            Space::J => {
                let all = JLabel::all();
                Self::build(space, &all, &V_GENS, act_j, |a, b| a.hamming(b), |_| 'J')
            }
            Space::L => {
                let all = LLabel::all();
                let d = |a: LLabel, b: LLabel| t_distance(TLabel::L(a), TLabel::L(b));
                Self::build(space, &all, &V_GENS, act_l, d, |_| 'L')
            }
            Space::T => {
                let all = TLabel::all();
                let kind = |t: &TLabel| if t.is_l() { 'L' } else { 'J' };
                Self::build(space, &all, &V_GENS, act_t, t_distance, kind)
            }
        }
    }

    fn build<T: Copy + Eq + Hash + fmt::Display>(
        space: Space,
        all: &[T],
        gens: &[Gen],
        act: impl Fn(Gen, T) -> T,
        dist: impl Fn(T, T) -> u32,
        kind: impl Fn(&T) -> char,
    ) -> LabelSpace {
        let index: HashMap<T, usize> = all.iter().enumerate().map(|(k, t)| (*t, k)).collect();
        let perms = gens.iter().map(|&g| all.iter().map(|&t| index[&act(g, t)]).collect()).collect();
        let n = all.len();
        let mut d = vec![0; n * n];
        for (a, &s) in all.iter().enumerate() {
            for (b, &t) in all.iter().enumerate() {
                d[a * n + b] = dist(s, t);
            }
        }
        LabelSpace {
            space,
            names: all.iter().map(|t| t.to_string()).collect(),
            perms,
            dist: d,
            kinds: all.iter().map(kind).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn dist(&self, a: usize, b: usize) -> u32 {
        self.dist[a * self.len() + b]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Type tag of a triple: sorted distances, prefixed by the L/J
    /// composition in T, or the coherence verdict in L.
    pub fn triple_tag(&self, t: [usize; 3]) -> String {
        let mut d = [self.dist(t[0], t[1]), self.dist(t[0], t[2]), self.dist(t[1], t[2])];
        d.sort_unstable();
        let digits: String = d.iter().map(|x| x.to_string()).collect();
        match self.space {
            Space::M | Space::J => digits,
            Space::L => {
                // opposite L labels sit at distance 4
                if d.contains(&4) {
                    "incoherent".into()
                } else {
                    "coherent".into()
                }
            }
            Space::T => {
                let mut k: Vec<char> = t.iter().map(|&i| self.kinds[i]).collect();
                k.sort_unstable_by(|a, b| b.cmp(a));
                format!("{}:{}", k.into_iter().collect::<String>(), digits)
            }
        }
    }

    /// `triple_tag`, plus for mixed T triples the distance between the two
    /// labels of the same kind. Sorted distances alone merge three pairs
    /// of orbits (LLJ 244, LJJ 224, LJJ 244).
    pub fn triple_refined_tag(&self, t: [usize; 3]) -> String {
        let tag = self.triple_tag(t);
        if self.space != Space::T {
            return tag;
        }
        let pairs = [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])];
        let same = pairs.iter().find(|(a, b)| self.kinds[*a] == self.kinds[*b]);
        match same {
            Some(&(a, b)) if !(tag.starts_with("LLL") || tag.starts_with("JJJ")) => {
                format!("{tag}/{}{}={}", self.kinds[a], self.kinds[b], self.dist(a, b))
            }
            _ => tag,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TripleOrbit {
    pub tag: String,
    pub refined_tag: String,
    pub size: usize,
    /// Smallest member, as label names.
    pub representative: [String; 3],
    /// True when every member carries `tag`.
    pub tag_constant: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TripleCensus {
    pub space: String,
    pub total: usize,
    pub orbits: Vec<TripleOrbit>,
}

fn sort3(mut t: [usize; 3]) -> [usize; 3] {
    t.sort_unstable();
    t
}

/// Orbits of the generator action on 3-element subsets.
pub fn triple_census(space: Space) -> TripleCensus {
    let ls = LabelSpace::new(space);
    let n = ls.len();
    let code = |t: [usize; 3]| (t[0] * n + t[1]) * n + t[2];
    let mut seen = vec![false; n * n * n];
    let mut orbits = Vec::new();
    let mut total = 0;
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let start = [a, b, c];
                if seen[code(start)] {
                    continue;
                }
                seen[code(start)] = true;
                let tag = ls.triple_tag(start);
                let refined = ls.triple_refined_tag(start);
                let mut constant = true;
                let mut size = 0;
                let mut queue = VecDeque::from([start]);
                while let Some(t) = queue.pop_front() {
                    size += 1;
                    constant &= ls.triple_tag(t) == tag && ls.triple_refined_tag(t) == refined;
                    for p in &ls.perms {
                        let u = sort3([p[t[0]], p[t[1]], p[t[2]]]);
                        if !seen[code(u)] {
                            seen[code(u)] = true;
                            queue.push_back(u);
                        }
                    }
                }
                total += size;
                orbits.push(TripleOrbit {
                    tag,
                    refined_tag: refined,
                    size,
                    representative: start.map(|k| ls.names[k].clone()),
                    tag_constant: constant,
                });
            }
        }
    }
    orbits.sort_by(|x, y| x.refined_tag.cmp(&y.refined_tag).then(x.representative.cmp(&y.representative)));
    TripleCensus { space: space.to_string(), total, orbits }
}

/// Subgroups that can be enumerated by matrix closure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NamedGroup {
    GJ,
    GL,
    H1,
    Q,
    G,
    /// W(E7); 2,903,040 elements.
    H,
}

impl NamedGroup {
    pub fn generators(self) -> Vec<RatMatrix> {
        let p7 = |c: &[&[usize]]| RatMatrix::perm(7, c);
        let x1 = crate::exactalg::mat_x1();
        match self {
            NamedGroup::GJ => vec![p7(&[&[2, 3]]), p7(&[&[3, 4]]), p7(&[&[5, 6]]), p7(&[&[6, 7]]), x1],
            NamedGroup::GL => {
                let c = p7(&[&[5, 7]]);
                vec![p7(&[&[1, 2]]), p7(&[&[2, 3]]), p7(&[&[3, 4]]), p7(&[&[6, 7]]), c.mul(&x1).mul(&c)]
            }
            NamedGroup::H1 => V_GENS.iter().map(|g| g.matrix()).collect(),
            NamedGroup::Q => Q_GENS.iter().map(|g| g.matrix()).collect(),
            NamedGroup::G => W_GENS[1..].iter().map(|g| g.matrix()).collect(),
            NamedGroup::H => W_GENS.iter().map(|g| g.matrix()).collect(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NamedGroup::GJ => "G_J",
            NamedGroup::GL => "G_L",
            NamedGroup::H1 => "H1",
            NamedGroup::Q => "Q",
            NamedGroup::G => "G",
            NamedGroup::H => "H",
        }
    }
}

impl FromStr for NamedGroup {
    type Err = Error;
    fn from_str(s: &str) -> Result<NamedGroup> {
        match s.trim() {
            "GJ" | "G_J" => Ok(NamedGroup::GJ),
            "GL" | "G_L" => Ok(NamedGroup::GL),
            "H1" => Ok(NamedGroup::H1),
            "Q" => Ok(NamedGroup::Q),
            "G" => Ok(NamedGroup::G),
            "H" | "E7" => Ok(NamedGroup::H),
            _ => Err(Error::Parse(format!("unknown group `{s}`"))),
        }
    }
}

/// Compact hash key for a matrix whose entries are all halves of integers.
fn half_key(m: &RatMatrix) -> Option<Vec<i8>> {
    let n = m.order();
    let mut key = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let r = m.get(i, j);
            if 2 % r.denom() != 0 {
                return None;
            }
            key.push(i8::try_from(r.numer() * (2 / r.denom())).ok()?);
        }
    }
    Some(key)
}

/// Order of the group generated by `gens`, by breadth-first closure.
/// `H` is refused unless `force` is set: it needs roughly 1.5 GB.
pub fn group_order(group: NamedGroup, force: bool) -> Result<usize> {
    if group == NamedGroup::H && !force {
        return Err(Error::Precondition(
            "enumerating W(E7) stores 2,903,040 matrices (about 1.5 GB); pass the force flag".into(),
        ));
    }
    Ok(closure_order(&group.generators()))
}

pub fn closure_order(gens: &[RatMatrix]) -> usize {
    closure_keys(gens).len()
}

/// True iff `m` lies in the group generated by `gens`.
pub fn closure_contains(gens: &[RatMatrix], m: &RatMatrix) -> bool {
    half_key(m).is_some_and(|k| closure_keys(gens).contains(&k))
}

fn closure_keys(gens: &[RatMatrix]) -> HashSet<Vec<i8>> {
    let n = gens[0].order();
    let id = RatMatrix::identity(n);
    let mut seen: HashSet<Vec<i8>> = HashSet::new();
    seen.insert(half_key(&id).expect("identity has integer entries"));
    let mut frontier = vec![id];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for m in &frontier {
            for g in gens {
                let p = m.mul(g);
                let key = half_key(&p).expect("group entries outside (1/2)Z");
                if seen.insert(key) {
                    next.push(p);
                }
            }
        }
        frontier = next;
    }
    seen
}

/// Breadth-first search over labels with generators tried in `gens` order,
/// recording the first word that reaches each label.
pub fn representative_words<T: Copy + Ord>(
    start: T,
    gens: &[Gen],
    act: impl Fn(Gen, T) -> T,
) -> BTreeMap<T, Vec<Gen>> {
    let mut words = BTreeMap::from([(start, Vec::new())]);
    let mut queue = VecDeque::from([start]);
    while let Some(t) = queue.pop_front() {
        let w = words[&t].clone();
        for &g in gens {
            let u = act(g, t);
            if !words.contains_key(&u) {
                let mut wu = w.clone();
                wu.push(g);
                words.insert(u, wu);
                queue.push_back(u);
            }
        }
    }
    words
}

/// Orbit of `v(0,7)` under all seven label actions.
pub fn m_coset_census() -> usize {
    representative_words(MLabel::pos(0, 7), &W_GENS, act_m).len()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_text() {
        for t in MLabel::all() {
            assert_eq!(t.to_string().parse::<MLabel>().unwrap(), t);
        }
        assert_eq!("p11".parse::<JLabel>().unwrap().signs(), "--+-+-");
        assert_eq!("n13".parse::<JLabel>().unwrap().signs(), "-++++-");
        assert_eq!(JLabel::parse_signs("-++++-").unwrap().to_string(), "n13");
        assert_eq!("4bar".parse::<LLabel>().unwrap(), LLabel::new(4, true));
        assert_eq!(JLabel::all().len(), 32);
        assert_eq!(TLabel::all().len(), 44);
        for t in JLabel::all() {
            let (neg, k) = t.index();
            assert_eq!(JLabel::from_index(neg, k), t);
        }
        assert!(JLabel::parse_signs("-+++++").is_err());
    }

    #[test]
    fn indices_dense() {
        for (k, t) in MLabel::all().into_iter().enumerate() {
            assert_eq!(t.index(), k);
        }
    }

    #[test]
    fn act_examples() {
        assert_eq!(act_m(Gen::S3p, MLabel::pos(2, 5)), MLabel::pos(2, 5));
        assert_eq!(act_m(Gen::S3p, MLabel::pos(0, 1)), MLabel::neg(2, 3));
        assert_eq!(act_m(Gen::S6, MLabel::pos(0, 1)), MLabel::pos(0, 2));
        assert_eq!(act_m(Gen::S1, MLabel::pos(0, 7)), MLabel::pos(0, 6));
        let n6: JLabel = "n6".parse().unwrap();
        assert_eq!(n6.signs(), "+-+-++");
        assert_eq!(act_j(Gen::A3, n6).to_string(), "p1");
        assert_eq!(act_j(Gen::A1p, JLabel(0)).signs(), "--++++");
        for t in JLabel::all() {
            assert_eq!(act_j(Gen::A1, act_j(Gen::A1, t)), t);
        }
        assert_eq!(act_l(Gen::A2, LLabel::new(2, false)), LLabel::new(3, false));
        assert_eq!(act_l(Gen::A1p, LLabel::new(1, false)), LLabel::new(2, true));
        assert_eq!(act_l(Gen::A4, LLabel::new(1, false)), LLabel::new(1, false));
    }

    #[test]
    fn gamma1_examples() {
        assert_eq!(gamma1(MLabel::pos(0, 7)), (OrbitColor::BlueL, TLabel::L(LLabel::new(6, false))));
        assert_eq!(gamma1(MLabel::pos(0, 1)).1.to_string(), "p0");
        let (c, t) = gamma1(MLabel::neg(4, 6));
        assert_eq!(c, OrbitColor::J);
        assert_eq!(t.to_string(), "n11");
        match t {
            TLabel::J(j) => assert_eq!(j.signs(), "++-+-+"),
            _ => unreachable!(),
        }
        for t in TLabel::all() {
            assert_eq!(gamma1(gamma1_preimage(t)).1, t);
        }
    }

    #[test]
    fn m_iso_examples() {
        assert_eq!(m_iso(Gen::S1).unwrap(), Gen::A5);
        assert_eq!(m_iso(Gen::S3p).unwrap(), Gen::A1p);
        assert_eq!(m_iso(Gen::S5).unwrap(), Gen::A1);
        assert!(m_iso(Gen::S6).is_err());
    }

    #[test]
    fn vectors_and_distance() {
        assert_eq!(vij_vector(MLabel::pos(0, 1)), [3, 3, -1, -1, -1, -1, -1, -1]);
        assert_eq!(vij_vector(MLabel::neg(4, 7)), [1, 1, 1, 1, -3, 1, 1, -3]);
        assert_eq!(dd(MLabel::pos(0, 1), MLabel::neg(0, 1)), 6);
        assert_eq!(dd(MLabel::pos(0, 7), MLabel::pos(0, 6)), 2);
        let p0 = TLabel::J(JLabel(0));
        assert_eq!(t_distance(p0, central_t(p0)), 6);
        let l4 = TLabel::L(LLabel::new(4, false));
        assert_eq!(t_distance(l4, central_t(l4)), 4);
    }

    #[test]
    fn classify_examples() {
        let id = SymVec::identity(Side::W);
        assert_eq!(coset_classify_m(&id).unwrap(), MLabel::pos(0, 7));
        let z = crate::exactalg::mat_z().apply(&id).unwrap();
        assert_eq!(coset_classify_m(&z).unwrap(), MLabel::neg(0, 7));
        let s1 = Gen::S1.matrix().apply(&id).unwrap();
        assert_eq!(coset_classify_m(&s1).unwrap(), MLabel::pos(0, 6));
        let v = |s| LinForm::parse(Side::V, s).unwrap();
        assert_eq!(classify_j_first(&v("A")).unwrap().to_string(), "p0");
        assert_eq!(classify_j_first(&v("1+D-F")).unwrap().to_string(), "p11");
        assert_eq!(classify_j_first(&v("G-B")).unwrap().to_string(), "n13");
        assert!(classify_j_first(&v("A+B")).is_err());
    }

    #[test]
    fn triple_tags() {
        let m = LabelSpace::new(Space::M);
        let idx = |s: &str| m.index_of(s).unwrap();
        assert_eq!(m.triple_tag([idx("+v(0,7)"), idx("+v(0,6)"), idx("+v(6,7)")]), "222");
        let l = LabelSpace::new(Space::L);
        let li = |s: &str| l.index_of(s).unwrap();
        assert_eq!(l.triple_tag([li("4"), li("5"), li("6")]), "coherent");
        assert_eq!(l.triple_tag([li("4"), li("4bar"), li("6")]), "incoherent");
        let j = LabelSpace::new(Space::J);
        let ji = |s: &str| j.index_of(s).unwrap();
        assert_eq!(j.triple_tag([ji("p0"), ji("p1"), ji("p2")]), "222");
    }

    #[test]
    fn full_e7_needs_force() {
        assert!(group_order(NamedGroup::H, false).is_err());
    }
}
