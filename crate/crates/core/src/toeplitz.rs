//! Toeplitz instances `T_n<S;T>` and their gcd invariants.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{BoolMatrix, Error, Result};

pub fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Extended Euclid on nonnegative inputs: `(g, x, y)` with `a x + b y = g`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut x0, mut x1) = (1i64, 0i64);
    let (mut y0, mut y1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (x0, x1) = (x1, x0 - q * x1);
        (y0, y1) = (y1, y0 - q * y1);
    }
    (r0, x0, y0)
}

/// A validated triple `(n, S, T)`.
///
/// `S` and `T` are sorted, deduplicated and lie in `[1, n-1]`. The two side
/// conditions are recorded rather than enforced.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SpecJson", into = "SpecJson")]
pub struct ToeplitzSpec {
    n: usize,
    s: Vec<usize>,
    t: Vec<usize>,
    cond1: bool,
    cond2: bool,
}

#[derive(Serialize, Deserialize)]
struct SpecJson {
    n: usize,
    #[serde(rename = "S")]
    s: Vec<i64>,
    #[serde(rename = "T")]
    t: Vec<i64>,
}

impl TryFrom<SpecJson> for ToeplitzSpec {
    type Error = Error;
    fn try_from(raw: SpecJson) -> Result<Self> {
        ToeplitzSpec::new(raw.n, &raw.s, &raw.t)
    }
}

impl From<ToeplitzSpec> for SpecJson {
    fn from(spec: ToeplitzSpec) -> Self {
        SpecJson {
            n: spec.n,
            s: spec.s.iter().map(|&x| x as i64).collect(),
            t: spec.t.iter().map(|&x| x as i64).collect(),
        }
    }
}

fn normalize(set: char, values: &[i64], n: usize) -> Result<Vec<usize>> {
    if values.is_empty() {
        return Err(if set == 'S' {
            Error::EmptyS
        } else {
            Error::EmptyT
        });
    }
    let mut out = Vec::with_capacity(values.len());
    for &v in values {
        if v < 1 || v as usize > n - 1 {
            return Err(Error::ElementOutOfRange {
                set,
                value: v,
                max: n - 1,
            });
        }
        out.push(v as usize);
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// gcd data attached to an instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GcdInvariants {
    /// gcd of the sumset `{s + t}`.
    pub d: u64,
    /// `gcd(d, min S)`.
    pub d_prime: u64,
    /// Positive differences within `S`, within `T`, and all sums.
    pub u_set: Vec<u64>,
    pub gcd_u: u64,
}

/// Signed `(a, b)` with `sum a_i s_i - sum b_j t_j = d` and
/// `sum a_i + sum b_j = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BezoutCertificate {
    pub a: Vec<i64>,
    pub b: Vec<i64>,
}

/// `k` nonnegative representations of `r + j d`, `j = 1..=k`, all using the
/// same number `steps` of terms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConsecutiveRepresentations {
    pub r: i64,
    /// `rows[j-1] = (a_{., j}, b_{., j})`.
    pub rows: Vec<(Vec<u64>, Vec<u64>)>,
    pub steps: u64,
}

impl ToeplitzSpec {
    /// Validates and normalizes an instance.
    pub fn new(n: usize, s: &[i64], t: &[i64]) -> Result<Self> {
        if n < 2 {
            return Err(Error::DimensionTooSmall(n));
        }
        let s = normalize('S', s, n)?;
        let t = normalize('T', t, n)?;
        let cond1 = s[s.len() - 1] + t[0] <= n;
        let cond2 = s[0] + t[t.len() - 1] <= n;
        Ok(ToeplitzSpec {
            n,
            s,
            t,
            cond1,
            cond2,
        })
    }

    /// Builds from bitmasks: bit `k-1` of `s_mask` set iff `k` in `S`.
    pub fn from_masks(n: usize, s_mask: u64, t_mask: u64) -> Result<Self> {
        let expand = |mask: u64| -> Vec<i64> {
            (1..n as i64).filter(|k| mask >> (k - 1) & 1 == 1).collect()
        };
        Self::new(n, &expand(s_mask), &expand(t_mask))
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn s(&self) -> &[usize] {
        &self.s
    }
    pub fn t(&self) -> &[usize] {
        &self.t
    }
    pub fn k1(&self) -> usize {
        self.s.len()
    }
    pub fn k2(&self) -> usize {
        self.t.len()
    }
    pub fn s_min(&self) -> usize {
        self.s[0]
    }
    pub fn s_max(&self) -> usize {
        self.s[self.s.len() - 1]
    }
    pub fn t_min(&self) -> usize {
        self.t[0]
    }
    pub fn t_max(&self) -> usize {
        self.t[self.t.len() - 1]
    }
    /// `max S + min T <= n`.
    pub fn cond1(&self) -> bool {
        self.cond1
    }
    /// `min S + max T <= n`.
    pub fn cond2(&self) -> bool {
        self.cond2
    }
    pub fn conditions_hold(&self) -> bool {
        self.cond1 && self.cond2
    }

    /// Entry rule: `(i, j) = 1` iff `j - i` in `S` or `i - j` in `T`.
    pub fn entry(&self, i: usize, j: usize) -> bool {
        if j > i {
            self.s.binary_search(&(j - i)).is_ok()
        } else if i > j {
            self.t.binary_search(&(i - j)).is_ok()
        } else {
            false
        }
    }

    /// Adjacency matrix of the digraph: arcs `i -> i+s` and `i -> i-t`.
    pub fn build_matrix(&self) -> BoolMatrix {
        let mut m = BoolMatrix::zeros(self.n).expect("n >= 2");
        for i in 1..=self.n {
            for &s in &self.s {
                if i + s <= self.n {
                    m.set(i, i + s, true);
                }
            }
            for &t in &self.t {
                if i > t {
                    m.set(i, i - t, true);
                }
            }
        }
        m
    }

    /// `d = gcd{s + t : s in S, t in T}`.
    pub fn gcd_sum(&self) -> u64 {
        let mut g = 0;
        for &s in &self.s {
            for &t in &self.t {
                g = gcd(g, (s + t) as u64);
            }
        }
        g
    }

    pub fn d_prime(&self) -> u64 {
        gcd(self.gcd_sum(), self.s_min() as u64)
    }

    /// Materializes `U_{S,T}` and its gcd.
    pub fn gcd_u(&self) -> (Vec<u64>, u64) {
        let mut u = BTreeSet::new();
        for (i, &a) in self.s.iter().enumerate() {
            for &b in &self.s[i + 1..] {
                u.insert((b - a) as u64);
            }
        }
        for (i, &a) in self.t.iter().enumerate() {
            for &b in &self.t[i + 1..] {
                u.insert((b - a) as u64);
            }
        }
        for &s in &self.s {
            for &t in &self.t {
                u.insert((s + t) as u64);
            }
        }
        let g = u.iter().fold(0, |g, &x| gcd(g, x));
        debug_assert_eq!(g, self.gcd_sum());
        (u.into_iter().collect(), g)
    }

    pub fn gcd_invariants(&self) -> GcdInvariants {
        let d = self.gcd_sum();
        let (u_set, gcd_u) = self.gcd_u();
        GcdInvariants {
            d,
            d_prime: gcd(d, self.s_min() as u64),
            u_set,
            gcd_u,
        }
    }

    /// `d / gcd(d, min S)`.
    pub fn predicted_period(&self) -> u64 {
        let d = self.gcd_sum();
        d / gcd(d, self.s_min() as u64)
    }

    /// Deterministic Bezout certificate for `d`.
    ///
    /// Extended Euclid runs over the pair generators in the order
    /// `s_j - s_i`, `t_j - t_i`, `s_i + t_j`; the pair coefficients are then
    /// telescoped onto the consecutive differences and `s_1 + t_1`, and
    /// finally expanded into per-element coefficients.
    pub fn bezout_certificate(&self) -> BezoutCertificate {
        let (k1, k2) = (self.k1(), self.k2());
        #[derive(Clone, Copy)]
        enum Gen {
            SDiff(usize, usize),
            TDiff(usize, usize),
            Sum(usize, usize),
        }
        let mut gens = Vec::new();
        for i in 0..k1 {
            for j in i + 1..k1 {
                gens.push((Gen::SDiff(i, j), (self.s[j] - self.s[i]) as i64));
            }
        }
        for i in 0..k2 {
            for j in i + 1..k2 {
                gens.push((Gen::TDiff(i, j), (self.t[j] - self.t[i]) as i64));
            }
        }
        for i in 0..k1 {
            for j in 0..k2 {
                gens.push((Gen::Sum(i, j), (self.s[i] + self.t[j]) as i64));
            }
        }

        let mut g = 0i64;
        let mut coeff = vec![0i64; gens.len()];
        for (idx, &(_, value)) in gens.iter().enumerate() {
            if g != 0 && value % g == 0 {
                continue;
            }
            let (ng, x, y) = ext_gcd(g, value);
            for c in coeff.iter_mut() {
                *c *= x;
            }
            coeff[idx] = y;
            g = ng;
        }
        debug_assert_eq!(g as u64, self.gcd_sum());

        // alpha[i]: coefficient of s_{i+1} - s_i (0-based i in 1..k1),
        // beta likewise for T, gamma for s_1 + t_1.
        let mut alpha = vec![0i64; k1];
        let mut beta = vec![0i64; k2];
        let mut gamma = 0i64;
        for (&(gen, _), &c) in gens.iter().zip(&coeff) {
            if c == 0 {
                continue;
            }
            match gen {
                Gen::SDiff(i, j) => (i + 1..=j).for_each(|k| alpha[k] += c),
                Gen::TDiff(i, j) => (i + 1..=j).for_each(|k| beta[k] += c),
                Gen::Sum(i, j) => {
                    (1..=i).for_each(|k| alpha[k] += c);
                    (1..=j).for_each(|k| beta[k] += c);
                    gamma += c;
                }
            }
        }

        let mut a = vec![0i64; k1];
        a[0] = gamma;
        for k in 1..k1 {
            a[k] += alpha[k];
            a[k - 1] -= alpha[k];
        }
        // sum_k beta_k (t_k - t_{k-1}) + gamma t_1 appears with a plus sign,
        // and the certificate subtracts b, so b is its negation.
        let mut b = vec![0i64; k2];
        b[0] = -gamma;
        for k in 1..k2 {
            b[k] -= beta[k];
            b[k - 1] += beta[k];
        }

        let cert = BezoutCertificate { a, b };
        assert!(self.certificate_holds(&cert), "certificate identities");
        cert
    }

    pub fn certificate_holds(&self, cert: &BezoutCertificate) -> bool {
        if cert.a.len() != self.k1() || cert.b.len() != self.k2() {
            return false;
        }
        let value: i64 = cert
            .a
            .iter()
            .zip(&self.s)
            .map(|(&a, &s)| a * s as i64)
            .sum::<i64>()
            - cert
                .b
                .iter()
                .zip(&self.t)
                .map(|(&b, &t)| b * t as i64)
                .sum::<i64>();
        let total: i64 = cert.a.iter().sum::<i64>() + cert.b.iter().sum::<i64>();
        value == self.gcd_sum() as i64 && total == 0
    }

    /// Nonnegative representations of `r + j d` for `j = 1..=k` with a
    /// constant term count.
    pub fn consecutive_representations(&self, k: u64) -> ConsecutiveRepresentations {
        assert!(k >= 1, "k must be positive");
        let cert = self.bezout_certificate();
        let k = k as i64;
        let r = cert
            .a
            .iter()
            .zip(&self.s)
            .map(|(&a, &s)| k * a.abs() * s as i64)
            .sum::<i64>()
            - cert
                .b
                .iter()
                .zip(&self.t)
                .map(|(&b, &t)| k * b.abs() * t as i64)
                .sum::<i64>();
        let steps = (k
            * (cert.a.iter().map(|a| a.abs()).sum::<i64>()
                + cert.b.iter().map(|b| b.abs()).sum::<i64>())) as u64;
        let rows = (1..=k)
            .map(|j| {
                let lift = |c: &i64| (j * c + k * c.abs()) as u64;
                (
                    cert.a.iter().map(lift).collect::<Vec<_>>(),
                    cert.b.iter().map(lift).collect::<Vec<_>>(),
                )
            })
            .collect::<Vec<_>>();
        let reps = ConsecutiveRepresentations { r, rows, steps };
        debug_assert!(self.representations_hold(&reps));
        reps
    }

    pub fn representations_hold(&self, reps: &ConsecutiveRepresentations) -> bool {
        let d = self.gcd_sum() as i64;
        reps.rows.iter().enumerate().all(|(idx, (a, b))| {
            let j = idx as i64 + 1;
            let value: i64 = a
                .iter()
                .zip(&self.s)
                .map(|(&x, &s)| (x * s as u64) as i64)
                .sum::<i64>()
                - b.iter()
                    .zip(&self.t)
                    .map(|(&x, &t)| (x * t as u64) as i64)
                    .sum::<i64>();
            let count: u64 = a.iter().sum::<u64>() + b.iter().sum::<u64>();
            value == reps.r + j * d && count == reps.steps
        })
    }
}

impl fmt::Display for ToeplitzSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[usize]| {
            v.iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "T{}<{};{}>", self.n, join(&self.s), join(&self.t))
    }
}

impl FromStr for ToeplitzSpec {
    type Err = Error;

    /// Parses `T<n><s1,...;t1,...>`, e.g. `T8<1,4;2,5>`.
    fn from_str(literal: &str) -> Result<Self> {
        let bad = |reason: &str| Error::InvalidLiteral {
            literal: literal.to_string(),
            reason: reason.to_string(),
        };
        let compact: String = literal.chars().filter(|c| !c.is_whitespace()).collect();
        let rest = compact
            .strip_prefix('T')
            .ok_or_else(|| bad("must start with 'T'"))?;
        let rest = rest.strip_prefix('_').unwrap_or(rest);
        let open = rest.find('<').ok_or_else(|| bad("missing '<'"))?;
        let body = rest[open + 1..]
            .strip_suffix('>')
            .ok_or_else(|| bad("missing closing '>'"))?;
        let n: usize = rest[..open].parse().map_err(|_| bad("bad dimension"))?;
        let (s_part, t_part) = body
            .split_once(';')
            .ok_or_else(|| bad("missing ';' between S and T"))?;
        let list = |part: &str| -> Result<Vec<i64>> {
            if part.is_empty() {
                return Ok(Vec::new());
            }
            part.split(',')
                .map(|x| x.parse::<i64>().map_err(|_| bad("bad set element")))
                .collect()
        };
        ToeplitzSpec::new(n, &list(s_part)?, &list(t_part)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec(lit: &str) -> ToeplitzSpec {
        lit.parse().unwrap()
    }

    fn all_specs(n_max: usize) -> impl Iterator<Item = ToeplitzSpec> {
        (2..=n_max).flat_map(|n| {
            let full = 1u64 << (n - 1);
            (1..full).flat_map(move |sm| {
                (1..full).map(move |tm| ToeplitzSpec::from_masks(n, sm, tm).unwrap())
            })
        })
    }

    #[test]
    fn validation() {
        let a = ToeplitzSpec::new(8, &[4, 1], &[5, 2, 2]).unwrap();
        assert_eq!(a.s(), &[1, 4]);
        assert_eq!(a.t(), &[2, 5]);
        assert!(a.cond1() && a.cond2());
        let b = ToeplitzSpec::new(5, &[2], &[4]).unwrap();
        assert!(!b.cond1());
        assert!(!b.cond2());
        assert_eq!(ToeplitzSpec::new(4, &[], &[1]), Err(Error::EmptyS));
        assert_eq!(ToeplitzSpec::new(4, &[1], &[]), Err(Error::EmptyT));
        assert_eq!(
            ToeplitzSpec::new(1, &[1], &[1]),
            Err(Error::DimensionTooSmall(1))
        );
        assert!(matches!(
            ToeplitzSpec::new(4, &[4], &[1]),
            Err(Error::ElementOutOfRange {
                set: 'S',
                value: 4,
                ..
            })
        ));
        assert!(matches!(
            ToeplitzSpec::new(4, &[1], &[0]),
            Err(Error::ElementOutOfRange {
                set: 'T',
                value: 0,
                ..
            })
        ));
    }

    #[test]
    fn literal_and_json() {
        let a = spec("T8<1,4;2,5>");
        assert_eq!(a.to_string(), "T8<1,4;2,5>");
        assert_eq!(spec(" T_8 < 4,1 ; 5,2 > "), a);
        for bad in ["8<1;2>", "T8<1;2", "T8<12>", "Tx<1;2>", "T8<1,;2>"] {
            assert!(
                matches!(
                    bad.parse::<ToeplitzSpec>(),
                    Err(Error::InvalidLiteral { .. })
                ),
                "{bad}"
            );
        }
        assert_eq!("T4<;1>".parse::<ToeplitzSpec>(), Err(Error::EmptyS));
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, r#"{"n":8,"S":[1,4],"T":[2,5]}"#);
        assert_eq!(serde_json::from_str::<ToeplitzSpec>(&json).unwrap(), a);
        assert!(serde_json::from_str::<ToeplitzSpec>(r#"{"n":3,"S":[3],"T":[1]}"#).is_err());
    }

    #[test]
    fn matrices_of_small_instances() {
        let a = spec("T8<1,4;2,5>").build_matrix();
        let fig1 = [
            "01001000", "00100100", "10010010", "01001001", "00100100", "10010010", "01001001",
            "00100100",
        ];
        assert_eq!(a, BoolMatrix::from_rows(&fig1).unwrap());
        let b = spec("T5<2;4>").build_matrix();
        assert_eq!(
            b.row_strings(),
            vec!["00100", "00010", "00001", "00000", "10000"]
        );
        assert_eq!(
            spec("T2<1;1>").build_matrix().row_strings(),
            vec!["01", "10"]
        );
        assert_eq!(a.transpose(), spec("T8<2,5;1,4>").build_matrix());
    }

    #[test]
    fn gcds() {
        let a = spec("T8<1,4;2,5>");
        assert_eq!(a.gcd_sum(), 3);
        assert_eq!(a.gcd_u(), (vec![3, 6, 9], 3));
        assert_eq!(a.predicted_period(), 3);
        assert_eq!(spec("T5<2;4>").gcd_sum(), 6);
        assert_eq!(spec("T6<2;2>").gcd_sum(), 4);
        assert_eq!(spec("T6<2;3>").gcd_u(), (vec![5], 5));
        assert_eq!(spec("T2<1;1>").predicted_period(), 2);
        assert_eq!(spec("T3<1;2>").predicted_period(), 3);
        let inv = a.gcd_invariants();
        assert_eq!((inv.d, inv.d_prime, inv.gcd_u), (3, 1, 3));
    }

    #[test]
    fn bezout_examples() {
        let a = spec("T8<1,4;2,5>");
        let cert = a.bezout_certificate();
        assert!(a.certificate_holds(&cert));
        assert_eq!(cert, a.bezout_certificate());
        let single = spec("T9<3;4>").bezout_certificate();
        assert_eq!(
            single,
            BezoutCertificate {
                a: vec![1],
                b: vec![-1]
            }
        );
    }

    #[test]
    fn consecutive_examples() {
        let a = spec("T8<1,4;2,5>");
        let one = a.consecutive_representations(1);
        assert_eq!(one.rows.len(), 1);
        assert!(a.representations_hold(&one));
        let five = a.consecutive_representations(5);
        assert_eq!(five.rows.len(), 5);
        assert!(a.representations_hold(&five));
    }

    #[test]
    fn sweep_identities() {
        for sp in all_specs(10) {
            let (_, gu) = sp.gcd_u();
            let d = sp.gcd_sum();
            assert_eq!(gu, d, "{sp}");
            let dp = sp.d_prime();
            assert_eq!(d % dp, 0);
            for &s in sp.s() {
                for &t in sp.t() {
                    assert_eq!((s + t) as u64 % d, 0);
                }
            }
            assert!(sp.certificate_holds(&sp.bezout_certificate()), "{sp}");
        }
    }

    #[test]
    fn sweep_representations_and_matrix_rule() {
        for sp in all_specs(9) {
            assert!(
                sp.representations_hold(&sp.consecutive_representations(3)),
                "{sp}"
            );
            let m = sp.build_matrix();
            assert!(m.is_toeplitz());
            let n = sp.n();
            for i in 1..=n {
                for j in 1..=n {
                    let naive = (j > i && sp.s().contains(&(j - i)))
                        || (i > j && sp.t().contains(&(i - j)));
                    assert_eq!(m.get(i, j), naive);
                }
            }
            if sp.cond1() {
                assert!((1..=n).all(|i| !m.row_is_zero(i)), "{sp}");
            }
        }
    }

    proptest! {
        #[test]
        fn literal_round_trip(n in 2usize..40, s_mask in 1u64.., t_mask in 1u64..) {
            let full = (1u64 << (n - 1)) - 1;
            prop_assume!(s_mask & full != 0 && t_mask & full != 0);
            let sp = ToeplitzSpec::from_masks(n, s_mask & full, t_mask & full).unwrap();
            prop_assert_eq!(sp.to_string().parse::<ToeplitzSpec>().unwrap(), sp.clone());
            let json = serde_json::to_string(&sp).unwrap();
            prop_assert_eq!(serde_json::from_str::<ToeplitzSpec>(&json).unwrap(), sp);
        }
    }
}
