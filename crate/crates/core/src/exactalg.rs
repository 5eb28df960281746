//! Exact rationals, affine-linear forms over the symbols `a..h` / `A..G`,
//! and the small rational matrices that generate the groups.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced fraction with positive denominator. Arithmetic goes through
/// `i128` and panics if the reduced result does not fit in `i64`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rat {
    num: i64,
    den: i64,
}

impl Rat {
    pub const ZERO: Rat = Rat { num: 0, den: 1 };
    pub const ONE: Rat = Rat { num: 1, den: 1 };

    pub fn new(num: i64, den: i64) -> Rat {
        Self::from_wide(num as i128, den as i128).expect("Rat overflow")
    }

    pub const fn int(n: i64) -> Rat {
        Rat { num: n, den: 1 }
    }

    fn from_wide(num: i128, den: i128) -> Option<Rat> {
        if den == 0 {
            panic!("Rat with zero denominator");
        }
        let g = num.gcd(&den);
        let (mut n, mut d) = (num / g, den / g);
        if d < 0 {
            n = -n;
            d = -d;
        }
        Some(Rat {
            num: i64::try_from(n).ok()?,
            den: i64::try_from(d).ok()?,
        })
    }

    pub fn numer(self) -> i64 {
        self.num
    }

    pub fn denom(self) -> i64 {
        self.den
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    pub fn is_integer(self) -> bool {
        self.den == 1
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn checked_add(self, o: Rat) -> Option<Rat> {
        if self.den == 1 && o.den == 1 {
            return self.num.checked_add(o.num).map(Rat::int);
        }
        let n = self.num as i128 * o.den as i128 + o.num as i128 * self.den as i128;
        Self::from_wide(n, self.den as i128 * o.den as i128)
    }

    pub fn checked_mul(self, o: Rat) -> Option<Rat> {
        if self.den == 1 && o.den == 1 {
            return self.num.checked_mul(o.num).map(Rat::int);
        }
        Self::from_wide(self.num as i128 * o.num as i128, self.den as i128 * o.den as i128)
    }

    pub fn checked_div(self, o: Rat) -> Option<Rat> {
        if o.num == 0 {
            return None;
        }
        Self::from_wide(self.num as i128 * o.den as i128, self.den as i128 * o.num as i128)
    }
}

impl Add for Rat {
    type Output = Rat;
    fn add(self, o: Rat) -> Rat {
        self.checked_add(o).expect("Rat overflow")
    }
}

impl Sub for Rat {
    type Output = Rat;
    fn sub(self, o: Rat) -> Rat {
        self + (-o)
    }
}

impl Mul for Rat {
    type Output = Rat;
    fn mul(self, o: Rat) -> Rat {
        self.checked_mul(o).expect("Rat overflow")
    }
}

impl Div for Rat {
    type Output = Rat;
    fn div(self, o: Rat) -> Rat {
        if o.num == 0 {
            panic!("Rat division by zero");
        }
        self.checked_div(o).expect("Rat overflow")
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat {
            num: self.num.checked_neg().expect("Rat overflow"),
            den: self.den,
        }
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Rat {
        Rat::int(n)
    }
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, o: &Rat) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Rat {
    fn cmp(&self, o: &Rat) -> Ordering {
        (self.num as i128 * o.den as i128).cmp(&(o.num as i128 * self.den as i128))
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Rat> {
        let bad = || Error::Parse(format!("bad rational `{s}`"));
        match s.split_once('/') {
            Some((n, d)) => {
                let n: i64 = n.trim().parse().map_err(|_| bad())?;
                let d: i64 = d.trim().parse().map_err(|_| bad())?;
                if d == 0 {
                    return Err(bad());
                }
                Ok(Rat::new(n, d))
            }
            None => s.trim().parse::<i64>().map(Rat::int).map_err(|_| bad()),
        }
    }
}

/// Which parameter space a form, vector or generator lives on.
///
/// `W` is the 8-symbol space `(a,b,c,d,e,f,g,h)` cut out by `2+3a = b+...+h`;
/// `V` is the 7-symbol space `(A,...,G)` cut out by `E+F+G-A-B-C-D = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    W,
    V,
}

const W_SYMBOLS: [char; 8] = ['a', 'b', 'c', 'd', 'e', 'f', 'g', 'h'];
const V_SYMBOLS: [char; 7] = ['A', 'B', 'C', 'D', 'E', 'F', 'G'];

impl Side {
    pub fn dim(self) -> usize {
        match self {
            Side::W => 8,
            Side::V => 7,
        }
    }

    pub fn symbols(self) -> &'static [char] {
        match self {
            Side::W => &W_SYMBOLS,
            Side::V => &V_SYMBOLS,
        }
    }

    pub fn index_of(self, c: char) -> Option<usize> {
        self.symbols().iter().position(|&s| s == c)
    }

    /// The defining form of the hyperplane; it vanishes on admissible points.
    pub fn constraint(self) -> LinForm {
        match self {
            Side::W => {
                let mut k = [Rat::ONE; 8];
                k[0] = Rat::int(-3);
                LinForm::from_parts(Side::W, Rat::int(-2), &k)
            }
            Side::V => {
                let k = [-1, -1, -1, -1, 1, 1, 1].map(Rat::int);
                LinForm::from_parts(Side::V, Rat::int(-1), &k)
            }
        }
    }
}

/// `constant + sum coef[i] * symbol[i]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct LinForm {
    side: Side,
    constant: Rat,
    coef: [Rat; 8],
}

impl LinForm {
    pub fn zero(side: Side) -> LinForm {
        LinForm { side, constant: Rat::ZERO, coef: [Rat::ZERO; 8] }
    }

    pub fn constant_form(side: Side, c: Rat) -> LinForm {
        LinForm { constant: c, ..LinForm::zero(side) }
    }

    pub fn symbol(side: Side, i: usize) -> LinForm {
        assert!(i < side.dim(), "symbol index {i} out of range");
        let mut f = LinForm::zero(side);
        f.coef[i] = Rat::ONE;
        f
    }

    pub fn from_parts(side: Side, constant: Rat, coef: &[Rat]) -> LinForm {
        assert_eq!(coef.len(), side.dim(), "coefficient count");
        let mut f = LinForm::constant_form(side, constant);
        f.coef[..coef.len()].copy_from_slice(coef);
        f
    }

    pub fn parse(side: Side, s: &str) -> Result<LinForm> {
        parse_form(side, s)
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn constant(&self) -> Rat {
        self.constant
    }

    pub fn coef(&self, i: usize) -> Rat {
        self.coef[i]
    }

    pub fn coefs(&self) -> &[Rat] {
        &self.coef[..self.side.dim()]
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.coefs().iter().all(|c| c.is_zero())
    }

    pub fn is_constant(&self) -> bool {
        self.coefs().iter().all(|c| c.is_zero())
    }

    pub fn scale(&self, r: Rat) -> LinForm {
        let mut out = *self;
        out.constant = out.constant * r;
        for c in out.coef.iter_mut() {
            *c = *c * r;
        }
        out
    }

    pub fn add_const(&self, r: Rat) -> LinForm {
        let mut out = *self;
        out.constant = out.constant + r;
        out
    }

    pub fn eval(&self, point: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(self.constant.to_f64(), 0.0);
        for (c, z) in self.coefs().iter().zip(point) {
            if !c.is_zero() {
                acc += z * c.to_f64();
            }
        }
        acc
    }

    /// Replace symbol `i` by `images[i]`; the images may live on another side.
    pub fn substitute(&self, images: &[LinForm]) -> LinForm {
        assert_eq!(images.len(), self.side.dim(), "substitution arity");
        let target = images.first().map(|f| f.side).unwrap_or(self.side);
        let mut out = LinForm::constant_form(target, self.constant);
        for (c, img) in self.coefs().iter().zip(images) {
            if !c.is_zero() {
                out = out + img.scale(*c);
            }
        }
        out
    }

    /// Normal form modulo `c`: subtract the multiple of `c` that clears the
    /// last symbol. `c` must involve the last symbol.
    pub fn reduce_mod(&self, c: &LinForm) -> LinForm {
        let last = self.side.dim() - 1;
        let k = c.coef[last];
        assert!(!k.is_zero(), "constraint must involve the last symbol");
        *self - c.scale(self.coef[last] / k)
    }

    /// Normal form modulo this side's hyperplane.
    pub fn reduced(&self) -> LinForm {
        self.reduce_mod(&self.side.constraint())
    }

    pub fn eq_on_hyperplane(&self, other: &LinForm) -> bool {
        eq_mod_constraint(self, other, &self.side.constraint())
    }
}

/// True iff `f - g` is a rational multiple of `c`.
pub fn eq_mod_constraint(f: &LinForm, g: &LinForm, c: &LinForm) -> bool {
    let d = *f - *g;
    if d.is_zero() {
        return true;
    }
    let lambda = match c.coefs().iter().position(|k| !k.is_zero()) {
        Some(j) => d.coef[j] / c.coef[j],
        None if !c.constant.is_zero() => d.constant / c.constant,
        None => return false,
    };
    d == c.scale(lambda)
}

impl Add for LinForm {
    type Output = LinForm;
    fn add(self, o: LinForm) -> LinForm {
        assert_eq!(self.side, o.side, "mixed alphabets");
        let mut out = self;
        out.constant = out.constant + o.constant;
        for (a, b) in out.coef.iter_mut().zip(o.coef) {
            *a = *a + b;
        }
        out
    }
}

impl Sub for LinForm {
    type Output = LinForm;
    fn sub(self, o: LinForm) -> LinForm {
        self + (-o)
    }
}

impl Neg for LinForm {
    type Output = LinForm;
    fn neg(self) -> LinForm {
        self.scale(Rat::int(-1))
    }
}

impl fmt::Display for LinForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        if !self.constant.is_zero() {
            out.push_str(&self.constant.to_string());
        }
        for (c, s) in self.coefs().iter().zip(self.side.symbols()) {
            if c.is_zero() {
                continue;
            }
            let mag = if *c < Rat::ZERO { -*c } else { *c };
            if *c < Rat::ZERO {
                out.push('-');
            } else if !out.is_empty() {
                out.push('+');
            }
            if mag != Rat::ONE {
                out.push_str(&mag.to_string());
            }
            out.push(*s);
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}

impl fmt::Debug for LinForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LinForm({self})")
    }
}

fn parse_form(side: Side, s: &str) -> Result<LinForm> {
    let text: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
    let err = |msg: &str| Error::Parse(format!("{msg} in form `{s}`"));
    if text.is_empty() {
        return Err(err("empty"));
    }
    let mut out = LinForm::zero(side);
    let mut i = 0;
    while i < text.len() {
        let mut sign = Rat::ONE;
        match text[i] {
            '+' => i += 1,
            '-' | '\u{2212}' => {
                sign = Rat::int(-1);
                i += 1;
            }
            _ if i > 0 => return Err(err("missing operator")),
            _ => {}
        }
        let start = i;
        while i < text.len() && (text[i].is_ascii_digit() || text[i] == '/') {
            i += 1;
        }
        let coef = if i > start {
            let lit: String = text[start..i].iter().collect();
            lit.parse::<Rat>().map_err(|_| err("bad coefficient"))?
        } else {
            Rat::ONE
        };
        if i < text.len() && text[i] == '*' {
            i += 1;
        }
        match text.get(i).and_then(|&c| side.index_of(c)) {
            Some(k) => {
                out.coef[k] = out.coef[k] + sign * coef;
                i += 1;
            }
            None if i > start => out.constant = out.constant + sign * coef,
            None => return Err(err("expected a number or symbol")),
        }
    }
    Ok(out)
}

/// Ordered list of forms, e.g. the parameter vector of M, J or L.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SymVec {
    side: Side,
    entries: Vec<LinForm>,
}

impl SymVec {
    pub fn new(side: Side, entries: Vec<LinForm>) -> SymVec {
        assert!(entries.iter().all(|f| f.side == side), "mixed alphabets");
        SymVec { side, entries }
    }

    /// `(a,...,h)` or `(A,...,G)`.
    pub fn identity(side: Side) -> SymVec {
        SymVec::new(side, (0..side.dim()).map(|i| LinForm::symbol(side, i)).collect())
    }

    pub fn parse(side: Side, s: &str) -> Result<SymVec> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let entries = inner
            .split([',', ';'])
            .map(|t| LinForm::parse(side, t))
            .collect::<Result<Vec<_>>>()?;
        Ok(SymVec::new(side, entries))
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn constraint(&self) -> LinForm {
        self.side.constraint()
    }

    pub fn entries(&self) -> &[LinForm] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn reduced(&self) -> SymVec {
        SymVec::new(self.side, self.entries.iter().map(LinForm::reduced).collect())
    }

    pub fn eq_on_hyperplane(&self, other: &SymVec) -> bool {
        self.len() == other.len()
            && self.entries.iter().zip(&other.entries).all(|(f, g)| f.eq_on_hyperplane(g))
    }

    /// Substitute `images` for the symbols in every entry.
    pub fn substitute(&self, images: &[LinForm]) -> SymVec {
        let entries: Vec<LinForm> = self.entries.iter().map(|f| f.substitute(images)).collect();
        let side = entries.first().map(|f| f.side).unwrap_or(self.side);
        SymVec { side, entries }
    }

    pub fn eval(&self, point: &[Complex64]) -> Vec<Complex64> {
        self.entries.iter().map(|f| f.eval(point)).collect()
    }
}

impl std::ops::Index<usize> for SymVec {
    type Output = LinForm;
    fn index(&self, i: usize) -> &LinForm {
        &self.entries[i]
    }
}

impl fmt::Display for SymVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|e| e.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl fmt::Debug for SymVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SymVec{self}")
    }
}

/// Dense square rational matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    n: usize,
    e: Vec<Rat>,
}

impl RatMatrix {
    pub fn identity(n: usize) -> RatMatrix {
        let mut e = vec![Rat::ZERO; n * n];
        for i in 0..n {
            e[i * n + i] = Rat::ONE;
        }
        RatMatrix { n, e }
    }

    pub fn from_rows(rows: &[Vec<Rat>]) -> RatMatrix {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        RatMatrix { n, e: rows.concat() }
    }

    /// Entries given as numerators over 2.
    pub fn from_halves(n: usize, halves: &[i64]) -> RatMatrix {
        assert_eq!(halves.len(), n * n);
        RatMatrix { n, e: halves.iter().map(|&h| Rat::new(h, 2)).collect() }
    }

    /// Permutation matrix of a product of cycles on `1..=n`; the matrix
    /// sends basis vector `e_i` to `e_sigma(i)`.
    pub fn perm(n: usize, cycles: &[&[usize]]) -> RatMatrix {
        let mut sigma: Vec<usize> = (0..n).collect();
        for cyc in cycles.iter().rev() {
            let mut step: Vec<usize> = (0..n).collect();
            for (k, &x) in cyc.iter().enumerate() {
                let y = cyc[(k + 1) % cyc.len()];
                assert!((1..=n).contains(&x) && (1..=n).contains(&y), "cycle entry out of range");
                step[x - 1] = y - 1;
            }
            // cycles compose right to left
            sigma = (0..n).map(|i| step[sigma[i]]).collect();
        }
        let mut e = vec![Rat::ZERO; n * n];
        for (i, &s) in sigma.iter().enumerate() {
            e[s * n + i] = Rat::ONE;
        }
        RatMatrix { n, e }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Rat {
        self.e[i * self.n + j]
    }

    pub fn is_identity(&self) -> bool {
        *self == RatMatrix::identity(self.n)
    }

    pub fn mul(&self, o: &RatMatrix) -> RatMatrix {
        assert_eq!(self.n, o.n, "matrix order mismatch");
        let n = self.n;
        let mut e = vec![Rat::ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.e[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = o.e[k * n + j];
                    if !b.is_zero() {
                        e[i * n + j] = e[i * n + j] + a * b;
                    }
                }
            }
        }
        RatMatrix { n, e }
    }

    pub fn pow(&self, k: u32) -> RatMatrix {
        (0..k).fold(RatMatrix::identity(self.n), |acc, _| acc.mul(self))
    }

    /// Row-by-row dot product with the entries of `v`; no reduction.
    pub fn apply(&self, v: &SymVec) -> Result<SymVec> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: v.len() });
        }
        let entries = (0..self.n)
            .map(|i| {
                (0..self.n).fold(LinForm::zero(v.side), |acc, j| {
                    let m = self.get(i, j);
                    if m.is_zero() {
                        acc
                    } else {
                        acc + v.entries[j].scale(m)
                    }
                })
            })
            .collect();
        Ok(SymVec::new(v.side, entries))
    }

    pub fn apply_numeric(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| x[j] * self.get(i, j).to_f64()).sum())
            .collect()
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RatMatrix[")?;
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| format!("{:>5}", self.get(i, j))).collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

/// The 8x8 matrix `X` (the generator `s3'`).
pub fn mat_x() -> RatMatrix {
    #[rustfmt::skip]
    let h = [
         1,  1, -1, -1, -1,  1,  1,  1,
         0,  2,  0,  0,  0,  0,  0,  0,
        -1,  1,  1, -1, -1,  1,  1,  1,
        -1,  1, -1,  1, -1,  1,  1,  1,
        -1,  1, -1, -1,  1,  1,  1,  1,
         0,  0,  0,  0,  0,  2,  0,  0,
         0,  0,  0,  0,  0,  0,  2,  0,
         0,  0,  0,  0,  0,  0,  0,  2,
    ];
    RatMatrix::from_halves(8, &h)
}

/// The 8x8 matrix `Y`.
pub fn mat_y() -> RatMatrix {
    #[rustfmt::skip]
    let m: [i64; 64] = [
        -1, 2, 0, 0, 0, 0, 0, 0,
        -1, 1, 1, 0, 0, 0, 0, 0,
         0, 1, 0, 0, 0, 0, 0, 0,
        -1, 1, 0, 1, 0, 0, 0, 0,
        -1, 1, 0, 0, 1, 0, 0, 0,
        -1, 1, 0, 0, 0, 1, 0, 0,
        -1, 1, 0, 0, 0, 0, 1, 0,
        -1, 1, 0, 0, 0, 0, 0, 1,
    ];
    RatMatrix::from_halves(8, &m.map(|x| 2 * x))
}

/// The 7x7 matrix `X1` (the generator `a3`).
pub fn mat_x1() -> RatMatrix {
    #[rustfmt::skip]
    let m: [i64; 49] = [
        1,  0,  0, 0, 0, 0, 0,
        0,  0, -1, 0, 1, 0, 0,
        0, -1,  0, 0, 1, 0, 0,
        0,  0,  0, 1, 0, 0, 0,
        0,  0,  0, 0, 1, 0, 0,
        0, -1, -1, 0, 1, 1, 0,
        0, -1, -1, 0, 1, 0, 1,
    ];
    RatMatrix::from_halves(7, &m.map(|x| 2 * x))
}

/// Central involution of the W side: `w -> 1 - w` on the hyperplane.
pub fn mat_z() -> RatMatrix {
    let l = [-3, 1, 1, 1, 1, 1, 1, 1];
    let mut h = vec![0i64; 64];
    for i in 0..8 {
        for j in 0..8 {
            h[i * 8 + j] = l[j] - if i == j { 2 } else { 0 };
        }
    }
    RatMatrix::from_halves(8, &h)
}

/// Central involution of the V side, from its word
/// `(14)(23)[[(1234)(567)]^2 X1]^4`.
pub fn mat_z1() -> RatMatrix {
    let rot = RatMatrix::perm(7, &[&[1, 2, 3, 4], &[5, 6, 7]]);
    let inner = rot.mul(&rot).mul(&mat_x1());
    RatMatrix::perm(7, &[&[1, 4], &[2, 3]]).mul(&inner.pow(4))
}

/// Coxeter generators of both groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gen {
    S1,
    S2,
    S3,
    S4,
    S5,
    S6,
    S3p,
    A1,
    A2,
    A3,
    A4,
    A5,
    A1p,
}

pub const W_GENS: [Gen; 7] = [Gen::S1, Gen::S2, Gen::S3, Gen::S4, Gen::S5, Gen::S6, Gen::S3p];
pub const V_GENS: [Gen; 6] = [Gen::A1, Gen::A2, Gen::A3, Gen::A4, Gen::A5, Gen::A1p];

impl Gen {
    pub fn side(self) -> Side {
        match self {
            Gen::S1 | Gen::S2 | Gen::S3 | Gen::S4 | Gen::S5 | Gen::S6 | Gen::S3p => Side::W,
            _ => Side::V,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Gen::S1 => "s1",
            Gen::S2 => "s2",
            Gen::S3 => "s3",
            Gen::S4 => "s4",
            Gen::S5 => "s5",
            Gen::S6 => "s6",
            Gen::S3p => "s3'",
            Gen::A1 => "a1",
            Gen::A2 => "a2",
            Gen::A3 => "a3",
            Gen::A4 => "a4",
            Gen::A5 => "a5",
            Gen::A1p => "a1'",
        }
    }

    pub fn parse(s: &str) -> Result<Gen> {
        let t = s.trim().replace(['\u{2032}', '\u{2019}'], "'").replace('p', "'");
        W_GENS
            .iter()
            .chain(V_GENS.iter())
            .copied()
            .find(|g| g.name() == t)
            .ok_or_else(|| Error::UnknownGenerator(s.to_string()))
    }

    pub fn matrix(self) -> RatMatrix {
        let p8 = |i, j| RatMatrix::perm(8, &[&[i, j]]);
        let p7 = |i, j| RatMatrix::perm(7, &[&[i, j]]);
        match self {
            Gen::S1 => mat_y().mul(&p8(2, 3)),
            Gen::S2 => p8(3, 4),
            Gen::S3 => p8(4, 5),
            Gen::S4 => p8(5, 6),
            Gen::S5 => p8(6, 7),
            Gen::S6 => p8(7, 8),
            Gen::S3p => mat_x(),
            Gen::A1 => p7(2, 3),
            Gen::A2 => p7(3, 4),
            Gen::A3 => mat_x1(),
            Gen::A4 => p7(5, 6),
            Gen::A5 => p7(6, 7),
            Gen::A1p => p7(1, 4),
        }
    }
}

/// Coxeter exponent `m` with `(g h)^m = 1`: 1 on the diagonal, 3 for
/// Dynkin neighbours, 2 otherwise, `None` across sides.
pub fn coxeter_exponent(g: Gen, h: Gen) -> Option<u32> {
    if g.side() != h.side() {
        return None;
    }
    if g == h {
        return Some(1);
    }
    // E7: s1-s2-s3-s4-s5-s6 with s3' on s4; D6: a1-...-a5 with a1' on a2
    let node = |x: Gen| match x {
        Gen::S1 | Gen::A1 => 1,
        Gen::S2 | Gen::A2 => 2,
        Gen::S3 | Gen::A3 => 3,
        Gen::S4 | Gen::A4 => 4,
        Gen::S5 | Gen::A5 => 5,
        Gen::S6 => 6,
        Gen::S3p => 14,
        Gen::A1p => 12,
    };
    let (a, b) = (node(g).min(node(h)), node(g).max(node(h)));
    let edge = if b >= 10 { a == b - 10 } else { b - a == 1 };
    Some(if edge { 3 } else { 2 })
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Gen {
    type Err = Error;
    fn from_str(s: &str) -> Result<Gen> {
        Gen::parse(s)
    }
}

/// Product of generators, read left to right. Empty is the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GenWord(pub Vec<Gen>);

impl GenWord {
    pub fn parse(s: &str) -> Result<GenWord> {
        s.split(|c: char| c.is_whitespace() || c == ',' || c == '.' || c == '*')
            .filter(|t| !t.is_empty())
            .map(Gen::parse)
            .collect::<Result<Vec<_>>>()
            .map(GenWord)
    }

    pub fn gens(&self) -> &[Gen] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for GenWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.0.iter().map(|g| g.name()).collect();
        f.write_str(&names.join(" "))
    }
}

pub fn word_to_matrix(w: &GenWord, side: Side) -> Result<RatMatrix> {
    let mut m = RatMatrix::identity(side.dim());
    for g in &w.0 {
        if g.side() != side {
            return Err(Error::UnknownGenerator(format!("{} on the {:?} side", g.name(), side)));
        }
        m = m.mul(&g.matrix());
    }
    Ok(m)
}

pub fn mat_apply(m: &RatMatrix, v: &SymVec) -> Result<SymVec> {
    m.apply(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> LinForm {
        LinForm::parse(Side::W, s).unwrap()
    }

    #[test]
    fn rat_normalizes() {
        assert_eq!(Rat::new(2, -4), Rat::new(-1, 2));
        assert_eq!(Rat::new(3, 6).to_string(), "1/2");
        assert_eq!(Rat::new(1, 2) + Rat::new(1, 2), Rat::ONE);
    }

    #[test]
    #[should_panic(expected = "overflow")]
    fn rat_overflow_panics() {
        let _ = Rat::int(i64::MAX) * Rat::int(2);
    }

    #[test]
    fn form_round_trip() {
        for s in ["1+a-c-d", "-a+2c", "2+3a-b", "1/2a-1/2h", "0", "-1"] {
            assert_eq!(w(s).to_string(), s);
        }
        assert_eq!(w("c - a + 1").to_string(), "1-a+c");
        assert!(LinForm::parse(Side::W, "1+A").is_err());
        assert!(LinForm::parse(Side::W, "").is_err());
    }

    #[test]
    fn x_action() {
        let v = mat_x().apply(&SymVec::identity(Side::W)).unwrap();
        let want = SymVec::parse(Side::W, "1+2a-c-d-e, b, 1+a-d-e, 1+a-c-e, 1+a-c-d, f, g, h").unwrap();
        assert!(v.eq_on_hyperplane(&want));
    }

    #[test]
    fn y_action() {
        let v = mat_y().apply(&SymVec::identity(Side::W)).unwrap();
        let want = SymVec::parse(
            Side::W,
            "2b-a, b+c-a, b, b+d-a, b+e-a, b+f-a, b+g-a, b+h-a",
        )
        .unwrap();
        assert_eq!(v, want);
    }

    #[test]
    fn x1_action() {
        let v = mat_x1().apply(&SymVec::identity(Side::V)).unwrap();
        let want = SymVec::parse(Side::V, "A, E-C, E-B, D, E, 1+A+D-G, 1+A+D-F").unwrap();
        assert!(v.eq_on_hyperplane(&want));
        assert_eq!(v.reduced(), want.reduced());
    }

    #[test]
    fn central_involutions() {
        let zw = mat_z().apply(&SymVec::identity(Side::W)).unwrap();
        let want = SymVec::parse(Side::W, "1-a,1-b,1-c,1-d,1-e,1-f,1-g,1-h").unwrap();
        assert!(zw.eq_on_hyperplane(&want));
        let zv = mat_z1().apply(&SymVec::identity(Side::V)).unwrap();
        let want = SymVec::parse(Side::V, "1-A,1-B,1-C,1-D,2-E,2-F,2-G").unwrap();
        assert!(zv.eq_on_hyperplane(&want));
    }

    #[test]
    fn perm_convention() {
        let p = RatMatrix::perm(8, &[&[1, 2, 3]]);
        assert_eq!(p.get(1, 0), Rat::ONE);
        assert_eq!(p.get(2, 1), Rat::ONE);
        assert_eq!(p.get(0, 2), Rat::ONE);
    }

    #[test]
    fn eq_mod_examples() {
        let c = Side::W.constraint();
        assert!(eq_mod_constraint(&w("b+h"), &w("2+3a-c-d-e-f-g"), &c));
        assert!(eq_mod_constraint(&w("a"), &w("a"), &c));
        assert!(!eq_mod_constraint(&w("a"), &w("b"), &c));
        let v = |s| LinForm::parse(Side::V, s).unwrap();
        assert!(eq_mod_constraint(&v("E+F+G-A-B-C-D"), &v("1"), &Side::V.constraint()));
    }

    #[test]
    fn words() {
        assert!(word_to_matrix(&GenWord::default(), Side::W).unwrap().is_identity());
        let s3p = word_to_matrix(&GenWord::parse("s3'").unwrap(), Side::W).unwrap();
        assert_eq!(s3p, mat_x());
        assert_eq!(Gen::parse("s3\u{2032}").unwrap(), Gen::S3p);
        assert_eq!(Gen::parse("a1p").unwrap(), Gen::A1p);
        assert!(Gen::parse("s7").is_err());
        assert!(word_to_matrix(&GenWord::parse("a1").unwrap(), Side::W).is_err());
    }
}
