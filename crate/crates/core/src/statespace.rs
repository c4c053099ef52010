//! Quantum numbers and their conversion to and from symbol counts.
//!
//! All half-integer quantum numbers are stored doubled (`two_j = 2j`, ...), and
//! the rotation angle is stored as `b_map`, the number of `B` symbols in a map
//! of length `n` (so `θ/π = b_map/n`). Every conversion below is integral.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Which sequence a set of base-4 counts (or a symbol sequence) belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    /// Alice's event.
    A1,
    /// Bob's event.
    B2,
    /// The A/B-only map relating the two events.
    Map,
}

/// The eight admissible experiment symbols, in canonical order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Base8Symbol {
    AA,
    AB,
    BA,
    BB,
    CC,
    CD,
    DC,
    DD,
}

impl Base8Symbol {
    pub const ALL: [Base8Symbol; 8] = [
        Base8Symbol::AA,
        Base8Symbol::AB,
        Base8Symbol::BA,
        Base8Symbol::BB,
        Base8Symbol::CC,
        Base8Symbol::CD,
        Base8Symbol::DC,
        Base8Symbol::DD,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Base8Symbol::AA => "AA",
            Base8Symbol::AB => "AB",
            Base8Symbol::BA => "BA",
            Base8Symbol::BB => "BB",
            Base8Symbol::CC => "CC",
            Base8Symbol::CD => "CD",
            Base8Symbol::DC => "DC",
            Base8Symbol::DD => "DD",
        }
    }
}

impl fmt::Display for Base8Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The seven quantum numbers shared by both halves of a paired experiment;
/// everything except the pair-only number `μ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LocalConfig {
    pub n: u32,
    pub two_j: u32,
    pub two_m_a1: i32,
    pub two_m_b2: i32,
    pub two_l_a1: i32,
    pub two_l_b2: i32,
    pub b_map: u32,
}

impl LocalConfig {
    pub fn with_mu(self, two_mu: i32) -> QuantumConfig {
        QuantumConfig {
            n: self.n,
            two_j: self.two_j,
            two_m_a1: self.two_m_a1,
            two_m_b2: self.two_m_b2,
            two_l_a1: self.two_l_a1,
            two_l_b2: self.two_l_b2,
            b_map: self.b_map,
            two_mu,
        }
    }

    /// Candidate `two_mu` values: the residue class that makes every Table-2
    /// count integral, clipped to the interval where all eight counts are
    /// non-negative and to `[-2n, 2n]`. Callers still filter each candidate
    /// through [`base8_from_quantum`].
    pub fn mu_candidates(&self) -> impl Iterator<Item = i32> {
        let base = table2_numerators(&self.with_mu(0));
        let mut lo = -2 * i64::from(self.n);
        let mut hi = 2 * i64::from(self.n);
        for (b, s) in base.iter().zip(MU_SIGN) {
            if s > 0 {
                lo = lo.max(-b);
            } else {
                hi = hi.min(*b);
            }
        }
        let start = lo + (-(base[0] + lo)).rem_euclid(4);
        (start..=hi).step_by(4).map(|m| m as i32)
    }
}

/// The full set of eight quantum numbers of a paired experiment, doubled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct QuantumConfig {
    pub n: u32,
    pub two_j: u32,
    pub two_m_a1: i32,
    pub two_m_b2: i32,
    pub two_l_a1: i32,
    pub two_l_b2: i32,
    pub b_map: u32,
    pub two_mu: i32,
}

impl QuantumConfig {
    pub fn local(&self) -> LocalConfig {
        LocalConfig {
            n: self.n,
            two_j: self.two_j,
            two_m_a1: self.two_m_a1,
            two_m_b2: self.two_m_b2,
            two_l_a1: self.two_l_a1,
            two_l_b2: self.two_l_b2,
            b_map: self.b_map,
        }
    }

    /// `2g = n - 2j`; identical for both events.
    pub fn two_g(&self) -> i64 {
        i64::from(self.n) - i64::from(self.two_j)
    }

    /// Whether every field sits inside its admissible range. Feasibility of
    /// the counts is a separate, stronger question.
    pub fn in_range(&self) -> bool {
        let two_j = self.two_j as i32;
        let two_g = self.two_g();
        self.n > 0
            && self.two_j <= self.n
            && self.b_map <= self.n
            && self.two_m_a1.abs() <= two_j
            && self.two_m_b2.abs() <= two_j
            && i64::from(self.two_l_a1.abs()) <= two_g
            && i64::from(self.two_l_b2.abs()) <= two_g
    }
}

impl fmt::Display for QuantumConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={} two_j={} two_m_a1={} two_m_b2={} two_l_a1={} two_l_b2={} b_map={} two_mu={}",
            self.n,
            self.two_j,
            self.two_m_a1,
            self.two_m_b2,
            self.two_l_a1,
            self.two_l_b2,
            self.b_map,
            self.two_mu
        )
    }
}

/// Occupation counts of the eight experiment symbols.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct Base8Counts {
    pub aa: u32,
    pub ab: u32,
    pub ba: u32,
    pub bb: u32,
    pub cc: u32,
    pub cd: u32,
    pub dc: u32,
    pub dd: u32,
}

impl Base8Counts {
    pub fn from_array(c: [u32; 8]) -> Self {
        Base8Counts {
            aa: c[0],
            ab: c[1],
            ba: c[2],
            bb: c[3],
            cc: c[4],
            cd: c[5],
            dc: c[6],
            dd: c[7],
        }
    }

    pub fn to_array(&self) -> [u32; 8] {
        [
            self.aa, self.ab, self.ba, self.bb, self.cc, self.cd, self.dc, self.dd,
        ]
    }

    pub fn get(&self, symbol: Base8Symbol) -> u32 {
        self.to_array()[symbol.index()]
    }

    pub fn n(&self) -> u32 {
        self.to_array().iter().sum()
    }
}

/// Per-sequence counts of `A`, `B`, `C`, `D`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Base4Counts {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub d: u32,
    pub role: Role,
}

impl Base4Counts {
    pub fn n(&self) -> u32 {
        self.a + self.b + self.c + self.d
    }

    pub fn to_array(&self) -> [u32; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// Counts implied by `(n, j, m, l)` for an event sequence, if they are
    /// non-negative integers.
    pub fn for_event(n: u32, two_j: u32, two_m: i32, two_l: i32, role: Role) -> Option<Self> {
        let n = i64::from(n);
        let two_j = i64::from(two_j);
        let (two_m, two_l) = (i64::from(two_m), i64::from(two_l));
        let halves = [
            n - two_j + two_l,
            n - two_j - two_l,
            two_j + two_m,
            two_j - two_m,
        ];
        let mut out = [0u32; 4];
        for (o, h) in out.iter_mut().zip(halves) {
            if h < 0 || h % 2 != 0 {
                return None;
            }
            *o = (h / 2) as u32;
        }
        Some(Base4Counts {
            a: out[0],
            b: out[1],
            c: out[2],
            d: out[3],
            role,
        })
    }
}

/// Base-4 marginals of an experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Marginals {
    pub a1: Base4Counts,
    pub b2: Base4Counts,
    pub map: Base4Counts,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Violation {
    Negative,
    NonIntegral,
}

/// A configuration whose Table-2 counts are not all non-negative integers.
/// This is ordinary data: an empty cell of the state space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Infeasible {
    /// First count (in canonical symbol order) that fails.
    pub symbol: Base8Symbol,
    pub violation: Violation,
    /// Four times the offending count.
    pub quadrupled: i64,
}

impl fmt::Display for Infeasible {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.violation {
            Violation::Negative => "negative",
            Violation::NonIntegral => "non-integral",
        };
        write!(
            f,
            "count {} is {} ({}/4)",
            self.symbol, what, self.quadrupled
        )
    }
}

// Sign of two_mu in each Table-2 row (AA, AB, BA, BB, CC, CD, DC, DD).
const MU_SIGN: [i64; 8] = [1, -1, -1, 1, -1, 1, 1, -1];

/// Four times each Table-2 count, in canonical symbol order.
fn table2_numerators(c: &QuantumConfig) -> [i64; 8] {
    let n = i64::from(c.n);
    let t = i64::from(c.b_map);
    let j = i64::from(c.two_j);
    let (ma, mb) = (i64::from(c.two_m_a1), i64::from(c.two_m_b2));
    let (la, lb) = (i64::from(c.two_l_a1), i64::from(c.two_l_b2));
    let mu = i64::from(c.two_mu);
    [
        (n - t) - j + la + lb + mu,
        (n + t) - j + la - lb - mu,
        (n + t) - j - la + lb - mu,
        (n - t) - j - la - lb + mu,
        (n - t) + j + ma + mb - mu,
        (t - n) + j + ma - mb + mu,
        (t - n) + j - ma + mb + mu,
        (n - t) + j - ma - mb - mu,
    ]
}

/// Evaluates the eight base-8 counts of a configuration.
pub fn base8_from_quantum(config: &QuantumConfig) -> Result<Base8Counts, Infeasible> {
    let quads = table2_numerators(config);
    let mut counts = [0u32; 8];
    for (i, &q) in quads.iter().enumerate() {
        let violation = if q % 4 != 0 {
            Some(Violation::NonIntegral)
        } else if q < 0 {
            Some(Violation::Negative)
        } else {
            None
        };
        if let Some(violation) = violation {
            return Err(Infeasible {
                symbol: Base8Symbol::ALL[i],
                violation,
                quadrupled: q,
            });
        }
        counts[i] = (q / 4) as u32;
    }
    Ok(Base8Counts::from_array(counts))
}

/// The unique configuration described by a set of counts.
pub fn quantum_from_base8(counts: &Base8Counts) -> QuantumConfig {
    let [aa, ab, ba, bb, cc, cd, dc, dd] = counts.to_array().map(|x| x as i32);
    QuantumConfig {
        n: counts.n(),
        two_j: (cc + cd + dc + dd) as u32,
        two_m_a1: cc + cd - dc - dd,
        two_m_b2: cc + dc - cd - dd,
        two_l_a1: aa + ab - ba - bb,
        two_l_b2: aa + ba - ab - bb,
        b_map: (ab + ba + cd + dc) as u32,
        two_mu: cd + dc + aa + bb,
    }
}

pub fn marginals(counts: &Base8Counts) -> Marginals {
    let c = counts;
    Marginals {
        a1: Base4Counts {
            a: c.aa + c.ab,
            b: c.ba + c.bb,
            c: c.cc + c.cd,
            d: c.dc + c.dd,
            role: Role::A1,
        },
        b2: Base4Counts {
            a: c.aa + c.ba,
            b: c.ab + c.bb,
            c: c.cc + c.dc,
            d: c.cd + c.dd,
            role: Role::B2,
        },
        map: Base4Counts {
            a: c.aa + c.bb + c.cc + c.dd,
            b: c.ab + c.ba + c.cd + c.dc,
            c: 0,
            d: 0,
            role: Role::Map,
        },
    }
}

/// `[-(n - 2j), n - 2j]` in steps of two: every admissible `two_l`.
pub fn l_range(n: u32, two_j: u32) -> impl Iterator<Item = i32> + Clone {
    let g = n as i32 - two_j as i32;
    let g = g.max(-1);
    (-g..=g).step_by(2)
}

/// A configuration with some of `{two_l_a1, two_l_b2, two_mu}` left open.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PartialConfig {
    pub n: u32,
    pub two_j: u32,
    pub two_m_a1: i32,
    pub two_m_b2: i32,
    pub b_map: u32,
    pub two_l_a1: Option<i32>,
    pub two_l_b2: Option<i32>,
    pub two_mu: Option<i32>,
}

impl PartialConfig {
    pub fn new(n: u32, two_j: u32, two_m_a1: i32, two_m_b2: i32, b_map: u32) -> Self {
        PartialConfig {
            n,
            two_j,
            two_m_a1,
            two_m_b2,
            b_map,
            two_l_a1: None,
            two_l_b2: None,
            two_mu: None,
        }
    }
}

/// Every completion of `partial` whose counts are feasible, ordered by
/// `(two_l_a1, two_l_b2, two_mu)`.
pub fn feasible_values(partial: PartialConfig) -> impl Iterator<Item = QuantumConfig> {
    let p = partial;
    let la_values: Vec<i32> = match p.two_l_a1 {
        Some(v) => vec![v],
        None => l_range(p.n, p.two_j).collect(),
    };
    let lb_values: Vec<i32> = match p.two_l_b2 {
        Some(v) => vec![v],
        None => l_range(p.n, p.two_j).collect(),
    };
    la_values.into_iter().flat_map(move |la| {
        let lb_values = lb_values.clone();
        lb_values.into_iter().flat_map(move |lb| {
            let local = LocalConfig {
                n: p.n,
                two_j: p.two_j,
                two_m_a1: p.two_m_a1,
                two_m_b2: p.two_m_b2,
                two_l_a1: la,
                two_l_b2: lb,
                b_map: p.b_map,
            };
            let mus: Vec<i32> = match p.two_mu {
                Some(mu) => vec![mu],
                None => local.mu_candidates().collect(),
            };
            mus.into_iter()
                .map(move |mu| local.with_mu(mu))
                .filter(|c| base8_from_quantum(c).is_ok())
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn worked_example() -> QuantumConfig {
        QuantumConfig {
            n: 4,
            two_j: 1,
            two_m_a1: 1,
            two_m_b2: 1,
            two_l_a1: 1,
            two_l_b2: 1,
            b_map: 2,
            two_mu: 1,
        }
    }

    /// All configurations realised by some length-`n` base-8 sequence,
    /// obtained by walking every sequence.
    fn brute_force_configs(n: u32) -> BTreeSet<QuantumConfig> {
        let mut out = BTreeSet::new();
        let total = 8u64.pow(n);
        for code in 0..total {
            let mut counts = [0u32; 8];
            let mut c = code;
            for _ in 0..n {
                counts[(c % 8) as usize] += 1;
                c /= 8;
            }
            out.insert(quantum_from_base8(&Base8Counts::from_array(counts)));
        }
        out
    }

    #[test]
    fn worked_example_counts() {
        let counts = base8_from_quantum(&worked_example()).unwrap();
        assert_eq!(
            counts,
            Base8Counts {
                aa: 1,
                ab: 1,
                ba: 1,
                cc: 1,
                ..Default::default()
            }
        );
        assert_eq!(quantum_from_base8(&counts), worked_example());
    }

    #[test]
    fn all_c_experiment() {
        for l in [-1, 0, 1] {
            let cfg = QuantumConfig {
                n: 2,
                two_j: 2,
                two_m_a1: 2,
                two_m_b2: 2,
                two_l_a1: l,
                two_l_b2: l,
                b_map: 0,
                two_mu: 0,
            };
            let res = base8_from_quantum(&cfg);
            if l == 0 {
                assert_eq!(
                    res.unwrap(),
                    Base8Counts {
                        cc: 2,
                        ..Default::default()
                    }
                );
            } else {
                // n - 2j = 0 leaves no room for l != 0.
                assert!(res.is_err());
            }
        }
        let back = quantum_from_base8(&Base8Counts {
            cc: 2,
            ..Default::default()
        });
        assert_eq!(
            back,
            QuantumConfig {
                n: 2,
                two_j: 2,
                two_m_a1: 2,
                two_m_b2: 2,
                two_l_a1: 0,
                two_l_b2: 0,
                b_map: 0,
                two_mu: 0
            }
        );
    }

    #[test]
    fn worked_example_with_wrong_mu_is_infeasible() {
        let cfg = QuantumConfig {
            two_mu: 3,
            ..worked_example()
        };
        let err = base8_from_quantum(&cfg).unwrap_err();
        assert_eq!(err.violation, Violation::NonIntegral);
        assert_eq!(err.symbol, Base8Symbol::AA);
        // Oracle: the only feasible two_mu at this local configuration.
        let feasible: Vec<i32> = (-8..=8)
            .filter(|&mu| base8_from_quantum(&worked_example().local().with_mu(mu)).is_ok())
            .collect();
        assert_eq!(feasible, vec![1]);
    }

    #[test]
    fn out_of_range_fields_are_infeasible() {
        let mut cfg = worked_example();
        cfg.two_m_a1 = 3;
        assert!(!cfg.in_range());
        assert!(base8_from_quantum(&cfg).is_err());
        let mut cfg = worked_example();
        cfg.b_map = 5;
        assert!(base8_from_quantum(&cfg).is_err());
    }

    #[test]
    fn marginals_of_worked_example() {
        let m = marginals(&base8_from_quantum(&worked_example()).unwrap());
        assert_eq!(m.a1.to_array(), [2, 1, 1, 0]);
        assert_eq!(m.b2.to_array(), [2, 1, 1, 0]);
        assert_eq!(m.map.to_array(), [2, 2, 0, 0]);
        assert_eq!(m.map.role, Role::Map);
    }

    #[test]
    fn marginals_all_dd() {
        let m = marginals(&Base8Counts {
            dd: 5,
            ..Default::default()
        });
        assert_eq!(m.a1.to_array(), [0, 0, 0, 5]);
        assert_eq!(m.b2.to_array(), [0, 0, 0, 5]);
        assert_eq!(m.map.to_array(), [5, 0, 0, 0]);
    }

    #[test]
    fn feasible_values_n2_spin_half() {
        let got: Vec<_> = feasible_values(PartialConfig::new(2, 1, 1, 1, 1)).collect();
        let oracle: Vec<_> = brute_force_configs(2)
            .into_iter()
            .filter(|c| c.two_j == 1 && c.two_m_a1 == 1 && c.two_m_b2 == 1 && c.b_map == 1)
            .collect();
        assert_eq!(oracle.len(), 2);
        assert_eq!(got, oracle);
        let lbs: BTreeSet<_> = got.iter().map(|c| c.two_l_b2).collect();
        assert_eq!(lbs, BTreeSet::from([-1, 1]));
    }

    #[test]
    fn feasible_values_granularity_gap_is_empty() {
        assert_eq!(
            feasible_values(PartialConfig::new(6, 2, 2, -2, 1)).count(),
            0
        );
    }

    #[test]
    fn feasible_values_matches_brute_force_for_small_n() {
        for n in 1..=5u32 {
            let all = brute_force_configs(n);
            for two_j in 0..=n {
                for ma in (-(two_j as i32)..=two_j as i32).step_by(2) {
                    for mb in (-(two_j as i32)..=two_j as i32).step_by(2) {
                        for t in 0..=n {
                            let got: BTreeSet<_> =
                                feasible_values(PartialConfig::new(n, two_j, ma, mb, t)).collect();
                            let expect: BTreeSet<_> = all
                                .iter()
                                .filter(|c| {
                                    c.two_j == two_j
                                        && c.two_m_a1 == ma
                                        && c.two_m_b2 == mb
                                        && c.b_map == t
                                })
                                .copied()
                                .collect();
                            assert_eq!(got, expect, "n={n} two_j={two_j} ma={ma} mb={mb} t={t}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn base4_for_event_matches_table() {
        let c = Base4Counts::for_event(2, 1, 1, 1, Role::A1).unwrap();
        assert_eq!(c.to_array(), [1, 0, 1, 0]);
        assert!(Base4Counts::for_event(2, 1, 1, 0, Role::A1).is_none());
    }

    fn counts_strategy(max_n: u32) -> impl Strategy<Value = Base8Counts> {
        // A random experiment sequence, reduced to its symbol counts.
        proptest::collection::vec(0usize..8, 1..=max_n as usize).prop_map(|symbols| {
            let mut c = [0u32; 8];
            for s in symbols {
                c[s] += 1;
            }
            Base8Counts::from_array(c)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn roundtrip_through_quantum_numbers(counts in counts_strategy(12)) {
            let cfg = quantum_from_base8(&counts);
            prop_assert!(cfg.in_range());
            prop_assert_eq!(base8_from_quantum(&cfg).unwrap(), counts);
            prop_assert_eq!(quantum_from_base8(&base8_from_quantum(&cfg).unwrap()), cfg);
            prop_assert_eq!(counts.n(), cfg.n);
        }

        #[test]
        fn marginals_each_sum_to_n(counts in counts_strategy(12)) {
            let m = marginals(&counts);
            let n = counts.n();
            prop_assert_eq!(m.a1.n(), n);
            prop_assert_eq!(m.b2.n(), n);
            prop_assert_eq!(m.map.n(), n);
            let cfg = quantum_from_base8(&counts);
            // Table-1 rows, doubled.
            prop_assert_eq!(2 * m.a1.c as i32, cfg.two_j as i32 + cfg.two_m_a1);
            prop_assert_eq!(2 * m.b2.d as i32, cfg.two_j as i32 - cfg.two_m_b2);
            prop_assert_eq!(2 * m.a1.a as i64, cfg.two_g() + cfg.two_l_a1 as i64);
            prop_assert_eq!(2 * m.b2.b as i64, cfg.two_g() - cfg.two_l_b2 as i64);
            prop_assert_eq!(m.map.b, cfg.b_map);
        }

        #[test]
        fn feasible_mu_values_share_residue_mod_4(counts in counts_strategy(10)) {
            let cfg = quantum_from_base8(&counts);
            let mus: Vec<i32> = (-40..=40)
                .filter(|&mu| base8_from_quantum(&cfg.local().with_mu(mu)).is_ok())
                .collect();
            prop_assert!(mus.contains(&cfg.two_mu));
            for mu in &mus {
                prop_assert_eq!((mu - cfg.two_mu).rem_euclid(4), 0);
            }
            // The bounded candidate scan finds exactly the same values.
            let scanned: Vec<i32> = cfg
                .local()
                .mu_candidates()
                .filter(|&mu| base8_from_quantum(&cfg.local().with_mu(mu)).is_ok())
                .collect();
            prop_assert_eq!(scanned, mus);
        }
    }
}
