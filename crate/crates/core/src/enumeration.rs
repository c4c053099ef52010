//! Brute-force oracle over explicit symbol sequences.
//!
//! Symbols are the four elements of the Klein four-group, stored as bit pairs
//! `(first << 1) | second`, so group addition is XOR. Everything here is
//! exponential in `n` and guarded by [`ENUMERATION_LIMIT`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactmath::binomial;
use crate::sgmodel::{epsilon_cardinality, Side};
use crate::statespace::feasible_values;
use crate::statespace::{
    base8_from_quantum, l_range, quantum_from_base8, Base4Counts, Base8Counts, PartialConfig,
    QuantumConfig, Role,
};

/// Largest `n` the exhaustive routines accept.
pub const ENUMERATION_LIMIT: u32 = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Symbol {
    A,
    B,
    C,
    D,
}

impl Symbol {
    pub const ALL: [Symbol; 4] = [Symbol::A, Symbol::B, Symbol::C, Symbol::D];

    /// The bit pair `(first, second)`: A=00, B=11, C=10, D=01.
    pub fn bits(self) -> (u8, u8) {
        let v = self.code();
        (v >> 1, v & 1)
    }

    fn code(self) -> u8 {
        match self {
            Symbol::A => 0b00,
            Symbol::B => 0b11,
            Symbol::C => 0b10,
            Symbol::D => 0b01,
        }
    }

    fn from_code(v: u8) -> Symbol {
        match v & 0b11 {
            0b00 => Symbol::A,
            0b11 => Symbol::B,
            0b10 => Symbol::C,
            _ => Symbol::D,
        }
    }

    pub fn is_map_symbol(self) -> bool {
        matches!(self, Symbol::A | Symbol::B)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl TryFrom<char> for Symbol {
    type Error = Error;
    fn try_from(c: char) -> Result<Symbol> {
        match c {
            'A' => Ok(Symbol::A),
            'B' => Ok(Symbol::B),
            'C' => Ok(Symbol::C),
            'D' => Ok(Symbol::D),
            other => Err(Error::InvalidSequence(format!("unknown symbol `{other}`"))),
        }
    }
}

/// Componentwise addition of bit pairs modulo 2.
pub fn klein_add(x: Symbol, y: Symbol) -> Symbol {
    Symbol::from_code(x.code() ^ y.code())
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SymbolSequence {
    role: Role,
    symbols: Vec<Symbol>,
}

impl SymbolSequence {
    pub fn new(role: Role, symbols: Vec<Symbol>) -> Result<Self> {
        if role == Role::Map {
            if let Some(bad) = symbols.iter().find(|s| !s.is_map_symbol()) {
                return Err(Error::InvalidSequence(format!(
                    "map sequences hold only A and B, found {bad}"
                )));
            }
        }
        Ok(SymbolSequence { role, symbols })
    }

    /// Parses a compact string such as `"CBAA"`.
    pub fn parse(role: Role, s: &str) -> Result<Self> {
        let symbols = s.chars().map(Symbol::try_from).collect::<Result<_>>()?;
        SymbolSequence::new(role, symbols)
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn with_role(self, role: Role) -> Result<Self> {
        SymbolSequence::new(role, self.symbols)
    }

    pub fn base4_counts(&self) -> Base4Counts {
        let mut c = [0u32; 4];
        for s in &self.symbols {
            c[*s as usize] += 1;
        }
        Base4Counts {
            a: c[0],
            b: c[1],
            c: c[2],
            d: c[3],
            role: self.role,
        }
    }
}

impl fmt::Display for SymbolSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.symbols {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl FromStr for SymbolSequence {
    type Err = Error;
    /// Parses an event sequence for `a1`.
    fn from_str(s: &str) -> Result<Self> {
        SymbolSequence::parse(Role::A1, s)
    }
}

/// Ordered `(a1, b2)` symbol pairs; each pair is one of the eight experiment
/// symbols.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ExperimentSequence {
    pairs: Vec<(Symbol, Symbol)>,
}

impl ExperimentSequence {
    pub fn new(pairs: Vec<(Symbol, Symbol)>) -> Result<Self> {
        for &(x, y) in &pairs {
            if !klein_add(x, y).is_map_symbol() {
                return Err(Error::InvalidSequence(format!(
                    "{x}{y} is not an experiment symbol"
                )));
            }
        }
        Ok(ExperimentSequence { pairs })
    }

    pub fn from_events(a1: &SymbolSequence, b2: &SymbolSequence) -> Result<Self> {
        if a1.len() != b2.len() {
            return Err(Error::LengthMismatch {
                left: a1.len(),
                right: b2.len(),
            });
        }
        ExperimentSequence::new(
            a1.symbols
                .iter()
                .copied()
                .zip(b2.symbols.iter().copied())
                .collect(),
        )
    }

    pub fn pairs(&self) -> &[(Symbol, Symbol)] {
        &self.pairs
    }

    pub fn counts(&self) -> Base8Counts {
        let mut c = [0u32; 8];
        for &(x, y) in &self.pairs {
            let idx = match (x, y) {
                (Symbol::A, Symbol::A) => 0,
                (Symbol::A, Symbol::B) => 1,
                (Symbol::B, Symbol::A) => 2,
                (Symbol::B, Symbol::B) => 3,
                (Symbol::C, Symbol::C) => 4,
                (Symbol::C, Symbol::D) => 5,
                (Symbol::D, Symbol::C) => 6,
                (Symbol::D, Symbol::D) => 7,
                _ => unreachable!("checked at construction"),
            };
            c[idx] += 1;
        }
        Base8Counts::from_array(c)
    }

    pub fn quantum_numbers(&self) -> QuantumConfig {
        quantum_from_base8(&self.counts())
    }
}

/// `event ⊕ map`, elementwise. The result is tagged `b2`.
pub fn apply_map(event: &SymbolSequence, map: &SymbolSequence) -> Result<SymbolSequence> {
    if event.len() != map.len() {
        return Err(Error::LengthMismatch {
            left: event.len(),
            right: map.len(),
        });
    }
    if map.role != Role::Map {
        return Err(Error::InvalidSequence(
            "second operand must be a map".into(),
        ));
    }
    let symbols = event
        .symbols
        .iter()
        .zip(&map.symbols)
        .map(|(&x, &y)| klein_add(x, y))
        .collect();
    SymbolSequence::new(Role::B2, symbols)
}

fn guard(n: u32) -> Result<()> {
    if n > ENUMERATION_LIMIT {
        return Err(Error::EnumerationLimit {
            n,
            limit: ENUMERATION_LIMIT,
        });
    }
    Ok(())
}

/// Every distinct ordering of the counts implied by `(n, j, m, l)`, in
/// lexicographic order, tagged `a1`. Infeasible counts give an empty set.
pub fn enumerate_event_sequences(
    n: u32,
    two_j: u32,
    two_m: i32,
    two_l: i32,
) -> Result<Vec<SymbolSequence>> {
    guard(n)?;
    let Some(counts) = Base4Counts::for_event(n, two_j, two_m, two_l, Role::A1) else {
        return Ok(Vec::new());
    };
    if counts.n() != n {
        return Ok(Vec::new());
    }
    let mut remaining = counts.to_array();
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(n as usize);
    permute(&mut remaining, &mut prefix, &mut out);
    Ok(out)
}

fn permute(remaining: &mut [u32; 4], prefix: &mut Vec<Symbol>, out: &mut Vec<SymbolSequence>) {
    if remaining.iter().all(|&r| r == 0) {
        out.push(SymbolSequence {
            role: Role::A1,
            symbols: prefix.clone(),
        });
        return;
    }
    for s in Symbol::ALL {
        let k = s as usize;
        if remaining[k] > 0 {
            remaining[k] -= 1;
            prefix.push(s);
            permute(remaining, prefix, out);
            prefix.pop();
            remaining[k] += 1;
        }
    }
}

/// Every map of length `n` with exactly `b_map` B's.
pub fn maps_with(n: u32, b_map: u32) -> Result<Vec<SymbolSequence>> {
    guard(n)?;
    Ok((0u32..1 << n)
        .filter(|mask| mask.count_ones() == b_map)
        .map(|mask| SymbolSequence {
            role: Role::Map,
            symbols: (0..n)
                .map(|i| {
                    if mask >> i & 1 == 1 {
                        Symbol::B
                    } else {
                        Symbol::A
                    }
                })
                .collect(),
        })
        .collect())
}

/// Pairs `fixed` with the partner generated by every map holding `b_map`
/// B's and counts the resulting experiments per eight-number cell.
///
/// `Side::A` fixes Alice's `a1` event and generates `b2 = a1 ⊕ map`;
/// `Side::B` fixes Bob's `b2` event and generates `a1 = b2 ⊕ map`.
pub fn brute_force_cells(
    n: u32,
    side: Side,
    fixed: &SymbolSequence,
    b_map: u32,
) -> Result<BTreeMap<QuantumConfig, u64>> {
    guard(n)?;
    if fixed.len() != n as usize {
        return Err(Error::LengthMismatch {
            left: fixed.len(),
            right: n as usize,
        });
    }
    let expected = match side {
        Side::A => Role::A1,
        Side::B => Role::B2,
    };
    if fixed.role != expected {
        return Err(Error::InvalidSequence(format!(
            "side {side:?} needs a {expected:?} sequence, got {:?}",
            fixed.role
        )));
    }
    let mut cells = BTreeMap::new();
    for map in maps_with(n, b_map)? {
        let partner: Vec<Symbol> = fixed
            .symbols
            .iter()
            .zip(&map.symbols)
            .map(|(&x, &y)| klein_add(x, y))
            .collect();
        let pairs = match side {
            Side::A => fixed.symbols.iter().copied().zip(partner).collect(),
            Side::B => partner
                .into_iter()
                .zip(fixed.symbols.iter().copied())
                .collect(),
        };
        let exp = ExperimentSequence::new(pairs)?;
        *cells.entry(exp.quantum_numbers()).or_insert(0) += 1;
    }
    Ok(cells)
}

/// Outcome of comparing the closed-form cardinalities with brute force.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub n: u32,
    pub cells_checked: u64,
    pub mismatches: Vec<OracleMismatch>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleMismatch {
    pub config: QuantumConfig,
    pub side: Side,
    pub brute_force: u64,
    pub closed_form: String,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Checks `epsilon_cardinality` against [`brute_force_cells`] for every
/// event class, map weight and feasible cell at length `n`, on both sides.
/// A cell reached by brute force but absent from the feasible set, or the
/// reverse, is also a mismatch.
pub fn verify_cardinalities(n: u32) -> Result<OracleReport> {
    guard(n)?;
    let mut report = OracleReport {
        n,
        ..OracleReport::default()
    };
    for two_j in 0..=n {
        let j = two_j as i32;
        for two_m in (-j..=j).step_by(2) {
            for two_l in l_range(n, two_j) {
                let Some(rep) = enumerate_event_sequences(n, two_j, two_m, two_l)?
                    .into_iter()
                    .next()
                else {
                    continue;
                };
                for side in [Side::A, Side::B] {
                    let fixed = match side {
                        Side::A => rep.clone(),
                        Side::B => rep.clone().with_role(Role::B2)?,
                    };
                    for b_map in 0..=n {
                        let mut cells = brute_force_cells(n, side, &fixed, b_map)?;
                        for other_m in (-j..=j).step_by(2) {
                            let mut partial = match side {
                                Side::A => PartialConfig::new(n, two_j, two_m, other_m, b_map),
                                Side::B => PartialConfig::new(n, two_j, other_m, two_m, b_map),
                            };
                            match side {
                                Side::A => partial.two_l_a1 = Some(two_l),
                                Side::B => partial.two_l_b2 = Some(two_l),
                            }
                            for cfg in feasible_values(partial) {
                                let counts = base8_from_quantum(&cfg)
                                    .expect("feasible_values yields feasible configs");
                                let closed = epsilon_cardinality(&counts, side)?;
                                let brute = cells.remove(&cfg).unwrap_or(0);
                                report.cells_checked += 1;
                                if closed != brute.into() {
                                    report.mismatches.push(OracleMismatch {
                                        config: cfg,
                                        side,
                                        brute_force: brute,
                                        closed_form: closed.to_string(),
                                    });
                                }
                            }
                        }
                        for (cfg, brute) in cells {
                            report.mismatches.push(OracleMismatch {
                                config: cfg,
                                side,
                                brute_force: brute,
                                closed_form: "infeasible".into(),
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}

/// Size of the event space at fixed `(n, j, m, l)` as a cross-check value.
pub fn event_space_size(n: u32, two_j: u32, two_m: i32, two_l: i32) -> Result<u64> {
    let Some(c) = Base4Counts::for_event(n, two_j, two_m, two_l, Role::A1) else {
        return Ok(0);
    };
    let [a, b, cc, _d] = c.to_array().map(|x| x as usize);
    let n = n as usize;
    let v = binomial(n, a)? * binomial(n - a, b)? * binomial(n - a - b, cc)?;
    Ok(u64::try_from(v).unwrap_or(u64::MAX))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::multinomial;
    use std::collections::BTreeSet;

    fn seq(role: Role, s: &str) -> SymbolSequence {
        SymbolSequence::parse(role, s).unwrap()
    }

    #[test]
    fn klein_group_axioms() {
        for x in Symbol::ALL {
            assert_eq!(klein_add(Symbol::A, x), x);
            assert_eq!(klein_add(x, x), Symbol::A);
            for y in Symbol::ALL {
                assert_eq!(klein_add(x, y), klein_add(y, x));
                for z in Symbol::ALL {
                    assert_eq!(klein_add(klein_add(x, y), z), klein_add(x, klein_add(y, z)));
                }
            }
        }
    }

    #[test]
    fn addition_table_entries() {
        assert_eq!(klein_add(Symbol::A, Symbol::C), Symbol::C);
        assert_eq!(klein_add(Symbol::C, Symbol::D), Symbol::B);
        assert_eq!(klein_add(Symbol::D, Symbol::C), Symbol::B);
        assert_eq!(klein_add(Symbol::B, Symbol::C), Symbol::D);
        assert_eq!(Symbol::C.bits(), (1, 0));
        assert_eq!(Symbol::D.bits(), (0, 1));
        assert_eq!(Symbol::B.bits(), (1, 1));
    }

    #[test]
    fn map_examples() {
        let b2 = apply_map(&seq(Role::A1, "C"), &seq(Role::Map, "B")).unwrap();
        assert_eq!(b2.to_string(), "D");

        let event = seq(Role::A1, "CA");
        let outs: BTreeSet<String> = ["AB", "BA"]
            .iter()
            .map(|m| apply_map(&event, &seq(Role::Map, m)).unwrap().to_string())
            .collect();
        assert_eq!(outs, BTreeSet::from(["CB".to_string(), "DA".to_string()]));

        let b2 = apply_map(&seq(Role::A1, "ACBCBA"), &seq(Role::Map, "AAABAA")).unwrap();
        assert_eq!(b2.to_string(), "ACBDBA");
        assert_eq!(b2.role(), Role::B2);
    }

    #[test]
    fn map_errors() {
        assert!(SymbolSequence::parse(Role::Map, "AC").is_err());
        assert!(SymbolSequence::parse(Role::A1, "AX").is_err());
        assert!(matches!(
            apply_map(&seq(Role::A1, "AC"), &seq(Role::Map, "A")),
            Err(Error::LengthMismatch { left: 2, right: 1 })
        ));
    }

    #[test]
    fn maps_preserve_spin() {
        for n in 1..=6u32 {
            for two_j in 0..=n {
                for two_l in l_range(n, two_j) {
                    for ev in enumerate_event_sequences(n, two_j, two_j as i32, two_l).unwrap() {
                        let c0 = ev.base4_counts();
                        for t in 0..=n {
                            for m in maps_with(n, t).unwrap() {
                                let c1 = apply_map(&ev, &m).unwrap().base4_counts();
                                assert_eq!(c0.c + c0.d, c1.c + c1.d);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn small_event_spaces() {
        let up = enumerate_event_sequences(1, 1, 1, 0).unwrap();
        assert_eq!(up.iter().map(|s| s.to_string()).collect::<Vec<_>>(), ["C"]);
        let down = enumerate_event_sequences(1, 1, -1, 0).unwrap();
        assert_eq!(
            down.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            ["D"]
        );

        let mut all = BTreeSet::new();
        for m in [-1, 1] {
            for l in l_range(2, 1) {
                all.extend(enumerate_event_sequences(2, 1, m, l).unwrap());
            }
        }
        assert_eq!(all.len(), 8);
        assert!(enumerate_event_sequences(2, 1, 1, 0).unwrap().is_empty());
    }

    #[test]
    fn event_spaces_match_multinomials() {
        for n in 0..=6u32 {
            let mut total = 0u64;
            for two_j in 0..=n {
                let j = two_j as i32;
                for m in (-j..=j).step_by(2) {
                    for l in l_range(n, two_j) {
                        let seqs = enumerate_event_sequences(n, two_j, m, l).unwrap();
                        let c = Base4Counts::for_event(n, two_j, m, l, Role::A1).unwrap();
                        let parts = c.to_array().map(|x| x as usize);
                        assert_eq!(multinomial(&parts).unwrap(), (seqs.len() as u64).into());
                        assert_eq!(event_space_size(n, two_j, m, l).unwrap(), seqs.len() as u64);
                        total += seqs.len() as u64;
                    }
                }
            }
            assert_eq!(total, 4u64.pow(n));
        }
    }

    #[test]
    fn worked_cell_has_two_partners() {
        let fixed = seq(Role::A1, "CBAA");
        let cells = brute_force_cells(4, Side::A, &fixed, 2).unwrap();
        let target = quantum_from_base8(&Base8Counts::from_array([1, 1, 1, 0, 1, 0, 0, 0]));
        assert_eq!(target.two_mu, 1);
        assert_eq!(target.two_l_b2, 1);
        assert_eq!(target.two_m_b2, 1);
        assert_eq!(cells[&target], 2);
        assert_eq!(cells.values().sum::<u64>(), 6);
    }

    #[test]
    fn trivial_cell() {
        let cells = brute_force_cells(1, Side::A, &seq(Role::A1, "C"), 0).unwrap();
        assert_eq!(cells.len(), 1);
        assert_eq!(cells.values().next(), Some(&1));
    }

    #[test]
    fn representative_independence() {
        for n in 1..=5u32 {
            for two_j in 0..=n {
                let j = two_j as i32;
                for m in (-j..=j).step_by(2) {
                    for l in l_range(n, two_j) {
                        let reps = enumerate_event_sequences(n, two_j, m, l).unwrap();
                        for t in 0..=n {
                            let mut reference: Option<BTreeMap<QuantumConfig, u64>> = None;
                            for rep in &reps {
                                let cells = brute_force_cells(n, Side::A, rep, t).unwrap();
                                match &reference {
                                    None => reference = Some(cells),
                                    Some(r) => assert_eq!(r, &cells),
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn closed_form_matches_brute_force_up_to_six() {
        for n in 1..=6 {
            let report = verify_cardinalities(n).unwrap();
            assert!(report.passed(), "{:?}", report.mismatches.first());
            assert!(report.cells_checked > 0);
        }
    }

    #[test]
    fn guard_rejects_large_n() {
        assert!(matches!(
            enumerate_event_sequences(11, 1, 1, 0),
            Err(Error::EnumerationLimit { n: 11, limit: 10 })
        ));
        assert!(maps_with(11, 0).is_err());
    }

    #[test]
    fn side_must_match_role() {
        let s = seq(Role::A1, "CA");
        assert!(brute_force_cells(2, Side::B, &s, 1).is_err());
        assert!(brute_force_cells(3, Side::A, &s, 1).is_err());
    }

    #[test]
    fn experiment_symbols_only() {
        assert!(ExperimentSequence::new(vec![(Symbol::A, Symbol::C)]).is_err());
        let e = ExperimentSequence::from_events(&seq(Role::A1, "CBAA"), &seq(Role::B2, "CAAB"))
            .unwrap();
        assert_eq!(e.counts().to_array(), [1, 1, 1, 0, 1, 0, 0, 0]);
    }
}
