//! One-dimensional cellular automata on finite windows.
//!
//! A window materializes the central `[-w, w]` stretch of a configuration.
//! With a periodic boundary the window is a genuine finite phase space and
//! every cell stays trustworthy forever. With a constant-fill boundary the
//! window approximates an infinite configuration: each step contaminates a
//! rim of width `radius`, so the trusted core shrinks and all queries are
//! restricted to it. Distances computed on the core agree exactly with the
//! distances of the infinite configurations the window stands for, as long
//! as the core covers the scan range.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Local update rule for a one-dimensional automaton.
///
/// `table[k]` is the output for the neighborhood whose symbols, read left
/// to right, form the base-`states` numeral `k`. For the classical 2-state
/// radius-1 numbering this matches the usual convention: rule bit `k` of
/// the rule number is the output for neighborhood value `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaRule {
    pub states: u8,
    pub radius: u8,
    table: Vec<u8>,
    pub wolfram: Option<u8>,
}

/// Structural classification of a rule by table inspection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaClass {
    /// Output always equals the center cell.
    Identity,
    /// Output always equals the right neighbor (the left shift).
    ShiftLeft,
    /// Output always equals the left neighbor (the right shift).
    ShiftRight,
    /// Output is the same symbol regardless of neighborhood.
    Constant(u8),
}

impl CaRule {
    /// Builds a 2-state radius-1 rule from its classical number.
    pub fn from_wolfram(number: u8) -> CaRule {
        let table = (0..8).map(|k| (number >> k) & 1).collect();
        CaRule { states: 2, radius: 1, table, wolfram: Some(number) }
    }

    /// Builds a rule from an explicit table given as base-`states` digits.
    ///
    /// The k-th character (left to right, 0-based) is the output for the
    /// neighborhood numeral k. The string must have exactly
    /// `states^(2*radius+1)` characters, all valid digits.
    pub fn from_table(states: u8, radius: u8, digits: &str) -> Result<CaRule> {
        if states < 2 {
            return Err(Error::Config("automaton needs at least 2 states".into()));
        }
        if states > 6 {
            return Err(Error::Config("automaton state count above 6 is unsupported".into()));
        }
        if radius < 1 || radius > 3 {
            return Err(Error::Config("automaton radius must be between 1 and 3".into()));
        }
        let width = 2 * radius as u32 + 1;
        let expected = (states as usize).pow(width);
        let mut table = Vec::with_capacity(expected);
        for ch in digits.chars() {
            let d = ch
                .to_digit(10)
                .ok_or_else(|| Error::Config(format!("table digit {ch:?} is not numeric")))?;
            if d >= states as u32 {
                return Err(Error::Config(format!(
                    "table digit {d} is not a valid state (states = {states})"
                )));
            }
            table.push(d as u8);
        }
        if table.len() != expected {
            return Err(Error::Config(format!(
                "table has {} digits, expected {expected} for {states} states radius {radius}",
                table.len()
            )));
        }
        Ok(CaRule { states, radius, table, wolfram: None })
    }

    /// Neighborhood width `2*radius + 1`.
    pub fn width(&self) -> usize {
        2 * self.radius as usize + 1
    }

    /// Applies the rule to one neighborhood slice of length `width()`.
    pub fn apply(&self, neighborhood: &[u8]) -> u8 {
        debug_assert_eq!(neighborhood.len(), self.width());
        let mut index = 0usize;
        for &s in neighborhood {
            index = index * self.states as usize + s as usize;
        }
        self.table[index]
    }

    /// Table lookup by precomputed neighborhood numeral.
    #[inline]
    pub fn lookup(&self, index: usize) -> u8 {
        self.table[index]
    }

    /// Recognizes identity, pure shifts, and constant rules exactly.
    pub fn classify(&self) -> Option<CaClass> {
        let q = self.states as usize;
        let w = self.width();
        let center = self.radius as usize;
        let mut identity = true;
        let mut shift_left = true;
        let mut shift_right = true;
        let mut constant = true;
        let first = self.table[0];
        let mut hood = vec![0u8; w];
        for (k, &out) in self.table.iter().enumerate() {
            let mut rem = k;
            for i in (0..w).rev() {
                hood[i] = (rem % q) as u8;
                rem /= q;
            }
            identity &= out == hood[center];
            shift_left &= out == hood[center + 1];
            shift_right &= out == hood[center - 1];
            constant &= out == first;
        }
        if identity {
            Some(CaClass::Identity)
        } else if shift_left {
            Some(CaClass::ShiftLeft)
        } else if shift_right {
            Some(CaClass::ShiftRight)
        } else if constant {
            Some(CaClass::Constant(first))
        } else {
            None
        }
    }
}

/// Boundary handling for window evolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaBoundary {
    /// Indices wrap; the window is a circular configuration.
    Periodic,
    /// Cells beyond the window read as the given symbol.
    Constant(u8),
}

/// Finite stretch `[-half, half]` of a configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaWindow {
    cells: Vec<u8>,
    half: i64,
    /// Trusted core is `[-valid, valid]`. Always `half` under a periodic
    /// boundary; shrinks by the rule radius per step under constant fill.
    valid: i64,
    pub boundary: CaBoundary,
}

impl CaWindow {
    /// Wraps a cell vector of odd length centered at coordinate 0.
    pub fn from_cells(cells: Vec<u8>, boundary: CaBoundary) -> Result<CaWindow> {
        if cells.is_empty() || cells.len() % 2 == 0 {
            return Err(Error::Input(format!(
                "window needs an odd positive cell count, got {}",
                cells.len()
            )));
        }
        let half = (cells.len() / 2) as i64;
        Ok(CaWindow { cells, half, valid: half, boundary })
    }

    pub fn half(&self) -> i64 {
        self.half
    }

    pub fn valid(&self) -> i64 {
        self.valid
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    /// Symbol at signed coordinate `i`. Wraps when periodic; `None` when a
    /// constant-fill window is read outside its materialized range.
    pub fn get(&self, i: i64) -> Option<u8> {
        let len = self.cells.len() as i64;
        match self.boundary {
            CaBoundary::Periodic => {
                let idx = (i + self.half).rem_euclid(len);
                Some(self.cells[idx as usize])
            }
            CaBoundary::Constant(_) => {
                if i < -self.half || i > self.half {
                    None
                } else {
                    Some(self.cells[(i + self.half) as usize])
                }
            }
        }
    }

    /// Rotates a periodic window so that new coordinate `i` reads what old
    /// coordinate `i + k` read. This is the shift map, exactly.
    pub fn rotated(&self, k: i64) -> Result<CaWindow> {
        if self.boundary != CaBoundary::Periodic {
            return Err(Error::Unsupported(
                "rotation is only exact on periodic windows".into(),
            ));
        }
        let len = self.cells.len() as i64;
        let mut cells = vec![0u8; self.cells.len()];
        for (idx, slot) in cells.iter_mut().enumerate() {
            let src = (idx as i64 + k).rem_euclid(len);
            *slot = self.cells[src as usize];
        }
        Ok(CaWindow { cells, half: self.half, valid: self.valid, boundary: self.boundary })
    }
}

/// One synchronous update of the whole window.
///
/// Periodic windows keep their full trusted core. Constant-fill windows
/// compute edge cells against the fill symbol and lose `radius` cells of
/// core; when the remaining core cannot absorb the loss the step reports a
/// budget error so callers start from a wider window instead of silently
/// reading contaminated cells.
pub fn ca_step(rule: &CaRule, w: &CaWindow) -> Result<CaWindow> {
    let r = rule.radius as i64;
    let len = w.cells.len();
    let mut next = vec![0u8; len];
    match w.boundary {
        CaBoundary::Periodic => {
            let n = len as i64;
            let mut hood = vec![0u8; rule.width()];
            for i in 0..n {
                for (j, slot) in hood.iter_mut().enumerate() {
                    let src = (i + j as i64 - r).rem_euclid(n);
                    *slot = w.cells[src as usize];
                }
                next[i as usize] = rule.apply(&hood);
            }
            Ok(CaWindow { cells: next, half: w.half, valid: w.valid, boundary: w.boundary })
        }
        CaBoundary::Constant(fill) => {
            if w.valid < r {
                return Err(Error::Budget(format!(
                    "window core exhausted (core radius {}, rule radius {r}); rebuild with a wider window",
                    w.valid
                )));
            }
            let n = len as i64;
            let mut hood = vec![0u8; rule.width()];
            for i in 0..n {
                for (j, slot) in hood.iter_mut().enumerate() {
                    let src = i + j as i64 - r;
                    *slot = if (0..n).contains(&src) { w.cells[src as usize] } else { fill };
                }
                next[i as usize] = rule.apply(&hood);
            }
            Ok(CaWindow {
                cells: next,
                half: w.half,
                valid: w.valid - r,
                boundary: w.boundary,
            })
        }
    }
}

/// Distance `2^(-min |i|)` over the common trusted core, `0` when the
/// windows agree on the whole common core.
pub fn cantor_distance(x: &CaWindow, y: &CaWindow) -> Result<f64> {
    let core = x.valid.min(y.valid);
    if core < 0 {
        return Err(Error::Input("windows have no common trusted core".into()));
    }
    for k in 0..=core {
        let hit = x.get(k) != y.get(k) || (k > 0 && x.get(-k) != y.get(-k));
        if hit {
            return Ok(2f64.powi(-(k.min(1074) as i32)));
        }
    }
    Ok(0.0)
}

/// Fraction of disagreeing cells over `[-n, n]`.
///
/// This is the finite-window stand-in for the upper-density pseudo-metric;
/// both windows must trust the whole range.
pub fn besicovitch_estimate(x: &CaWindow, y: &CaWindow, n: i64) -> Result<f64> {
    if n < 0 {
        return Err(Error::Input("besicovitch span must be nonnegative".into()));
    }
    if n > x.valid || n > y.valid {
        return Err(Error::Input(format!(
            "besicovitch span {n} exceeds a trusted core ({}, {})",
            x.valid, y.valid
        )));
    }
    let mut diff = 0u64;
    for i in -n..=n {
        if x.get(i) != y.get(i) {
            diff += 1;
        }
    }
    Ok(diff as f64 / (2 * n + 1) as f64)
}

/// Occurrence of a word that freezes one of its columns forever.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockingWitness {
    pub word: Vec<u8>,
    /// Offset of the frozen column inside the word.
    pub column: usize,
    /// Horizon up to which freezing was checked before the possibility
    /// sets reached a fixed point; `u64::MAX` when the fixed point proves
    /// the column frozen for all time.
    pub verified_horizon: u64,
}

/// Searches for a blocking word of length at most `max_len`.
///
/// Soundness comes from a possibility-set simulation: each cell holds the
/// set of symbols it could contain given that only the word is pinned and
/// everything outside it is arbitrary. If the set at the watched column
/// stays a singleton until the set array repeats, no environment can ever
/// move that column, which is exactly the blocking property. Words are
/// tried in (length, lexicographic) order so the returned witness is the
/// canonical smallest one. `None` means no word of the admitted lengths
/// blocks; it is not a proof that none exists at greater lengths.
pub fn blocking_word_search(
    rule: &CaRule,
    max_len: usize,
    horizon: u64,
) -> Result<Option<BlockingWitness>> {
    if max_len == 0 || max_len > 12 {
        return Err(Error::Input(format!(
            "blocking word length bound must be in 1..=12, got {max_len}"
        )));
    }
    if horizon == 0 || horizon > 1 << 10 {
        return Err(Error::Input(format!(
            "blocking horizon must be in 1..=1024, got {horizon}"
        )));
    }
    let q = rule.states as usize;
    let mut evals: u64 = 0;
    const EVAL_CAP: u64 = 100_000_000;
    for len in 1..=max_len {
        let total = (q as u64).pow(len as u32);
        let mut word = vec![0u8; len];
        for code in 0..total {
            let mut rem = code;
            for i in (0..len).rev() {
                word[i] = (rem % q as u64) as u8;
                rem /= q as u64;
            }
            if let Some(wit) = verify_blocking(rule, &word, horizon, &mut evals)? {
                return Ok(Some(wit));
            }
            if evals > EVAL_CAP {
                return Err(Error::Budget(format!(
                    "blocking word search exceeded {EVAL_CAP} table evaluations"
                )));
            }
        }
    }
    Ok(None)
}

/// Checks whether `word` freezes its center column, by possibility sets.
///
/// The state assigns each cell the set of symbols it could hold given only
/// the word constraint; unmaterialized cells are implicitly the full set.
/// Each step over-approximates the true reachable sets, so a singleton at
/// the watched column is trustworthy. Once the state satisfies
/// `step(S) subset-of S` cellwise it can only shrink afterwards, hence the
/// column stays a singleton for all time, not just the simulated horizon.
fn verify_blocking(
    rule: &CaRule,
    word: &[u8],
    horizon: u64,
    evals: &mut u64,
) -> Result<Option<BlockingWitness>> {
    let q = rule.states as usize;
    let r = rule.radius as usize;
    let full: u32 = (1u32 << q) - 1;
    // The word occupies the middle; influence spreads r cells per step, so
    // model enough slack for the whole horizon plus one detection step.
    let slack = r * (horizon as usize + 2);
    let width = word.len() + 2 * slack;
    let mut state = vec![full; width];
    for (i, &s) in word.iter().enumerate() {
        state[slack + i] = 1u32 << s;
    }
    let column = slack + word.len() / 2;
    let target = state[column];
    // Cells outside [lo, hi] are exactly the full set.
    let mut lo = slack;
    let mut hi = slack + word.len() - 1;
    let mut next = state.clone();
    for _t in 1..=horizon {
        let a = lo - r;
        let b = hi + r;
        if a < r || b + r >= width {
            // Influence reached the edge of the model before stabilizing;
            // report unverified rather than guessing.
            return Ok(None);
        }
        for i in a..=b {
            next[i] = cell_outputs(rule, &state, i, evals);
        }
        state[a..=b].copy_from_slice(&next[a..=b]);
        if state[column] != target {
            return Ok(None);
        }
        lo = match (a..=b).find(|&i| state[i] != full) {
            Some(i) => i,
            None => return Ok(None),
        };
        hi = (a..=b).rev().find(|&i| state[i] != full).unwrap();
        if *evals > 100_000_000 {
            return Err(Error::Budget(
                "blocking word verification exceeded its evaluation cap".into(),
            ));
        }
        // Contractivity test: full cells absorb any output set, so only
        // the constrained stretch needs checking.
        let contracting =
            (lo..=hi).all(|i| cell_outputs(rule, &state, i, evals) & !state[i] == 0);
        if contracting {
            return Ok(Some(BlockingWitness {
                word: word.to_vec(),
                column: word.len() / 2,
                verified_horizon: u64::MAX,
            }));
        }
    }
    Ok(None)
}

/// Output set of the cell at `i` given the per-cell possibility sets.
///
/// Enumerates the product of the neighborhood sets with a mixed-radix
/// counter; neighborhood width is at most 7 and state count at most 6, so
/// the product never exceeds a few hundred table lookups and usually exits
/// early once every output has appeared.
fn cell_outputs(rule: &CaRule, state: &[u32], i: usize, evals: &mut u64) -> u32 {
    let q = rule.states as usize;
    let r = rule.radius as usize;
    let w = 2 * r + 1;
    let full: u32 = (1u32 << q) - 1;
    let mut symbols = [[0u8; 6]; 7];
    let mut counts = [0usize; 7];
    for j in 0..w {
        let set = state[i + j - r];
        let mut c = 0;
        for s in 0..q {
            if set & (1u32 << s) != 0 {
                symbols[j][c] = s as u8;
                c += 1;
            }
        }
        debug_assert!(c > 0);
        counts[j] = c;
    }
    let mut idx = [0usize; 7];
    let mut out = 0u32;
    loop {
        let mut numeral = 0usize;
        for j in 0..w {
            numeral = numeral * q + symbols[j][idx[j]] as usize;
        }
        out |= 1u32 << rule.lookup(numeral);
        *evals += 1;
        if out == full {
            return out;
        }
        let mut j = w;
        loop {
            if j == 0 {
                return out;
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < counts[j] {
                break;
            }
            idx[j] = 0;
        }
    }
}

/// Temporally periodic circular configurations of a given spatial period.
///
/// Enumerates all `states^p` circular words of length `p`, iterates each
/// under the rule (with wraparound), and returns those that come back to
/// themselves within `t_max` steps, paired with their least period. The
/// result is sorted by the word's numeral value, so it is deterministic.
pub fn ca_periodic_points(
    rule: &CaRule,
    p: usize,
    t_max: u64,
) -> Result<Vec<(Vec<u8>, u64)>> {
    if p == 0 {
        return Err(Error::Input("spatial period must be positive".into()));
    }
    let q = rule.states as u64;
    let total = q
        .checked_pow(p as u32)
        .filter(|&t| t <= 1 << 20)
        .ok_or_else(|| Error::Budget(format!("state count {q}^{p} exceeds the enumeration cap")))?;
    let mut found = Vec::new();
    let mut word = vec![0u8; p];
    for code in 0..total {
        let mut rem = code;
        for i in (0..p).rev() {
            word[i] = (rem % q) as u8;
            rem /= q;
        }
        let mut current = word.clone();
        for t in 1..=t_max {
            current = cyclic_step(rule, &current);
            if current == word {
                found.push((word.clone(), t));
                break;
            }
        }
    }
    Ok(found)
}

/// One update of a circular word of arbitrary length.
pub fn cyclic_step(rule: &CaRule, word: &[u8]) -> Vec<u8> {
    let n = word.len() as i64;
    let r = rule.radius as i64;
    let mut hood = vec![0u8; rule.width()];
    let mut next = vec![0u8; word.len()];
    for i in 0..n {
        for (j, slot) in hood.iter_mut().enumerate() {
            let src = (i + j as i64 - r).rem_euclid(n);
            *slot = word[src as usize];
        }
        next[i as usize] = rule.apply(&hood);
    }
    next
}

#[cfg(test)]
mod tests {
    use super::*;

    fn window(bits: &str, boundary: CaBoundary) -> CaWindow {
        let cells = bits.bytes().map(|b| b - b'0').collect();
        CaWindow::from_cells(cells, boundary).unwrap()
    }

    #[test]
    fn wolfram_table_follows_classical_numbering() {
        let rule = CaRule::from_wolfram(110);
        // Neighborhood 110 (numeral 6) maps to bit 6 of 110 = 1.
        assert_eq!(rule.apply(&[1, 1, 0]), 1);
        assert_eq!(rule.apply(&[1, 1, 1]), 0);
        assert_eq!(rule.apply(&[0, 0, 0]), 0);
        assert_eq!(rule.apply(&[0, 0, 1]), 1);
    }

    #[test]
    fn classification_spots_shift_identity_and_constant() {
        assert_eq!(CaRule::from_wolfram(204).classify(), Some(CaClass::Identity));
        assert_eq!(CaRule::from_wolfram(170).classify(), Some(CaClass::ShiftLeft));
        assert_eq!(CaRule::from_wolfram(240).classify(), Some(CaClass::ShiftRight));
        assert_eq!(CaRule::from_wolfram(0).classify(), Some(CaClass::Constant(0)));
        assert_eq!(CaRule::from_wolfram(110).classify(), None);
        assert_eq!(CaRule::from_wolfram(90).classify(), None);
    }

    #[test]
    fn shift_rule_moves_content_left() {
        let rule = CaRule::from_wolfram(170);
        let w = window("00100", CaBoundary::Periodic);
        let next = ca_step(&rule, &w).unwrap();
        assert_eq!(next.cells(), &[0, 1, 0, 0, 0]);
    }

    #[test]
    fn constant_fill_step_shrinks_the_core() {
        let rule = CaRule::from_wolfram(128);
        let w = window("11111", CaBoundary::Constant(0));
        assert_eq!(w.valid(), 2);
        let next = ca_step(&rule, &w).unwrap();
        assert_eq!(next.valid(), 1);
        // The core [-1, 1] survives as all ones; the rim saw the fill.
        assert_eq!(next.cells(), &[0, 1, 1, 1, 0]);
        let again = ca_step(&rule, &next).unwrap();
        assert_eq!(again.valid(), 0);
        assert!(ca_step(&rule, &again).is_err());
    }

    #[test]
    fn periodic_step_keeps_the_core() {
        let rule = CaRule::from_wolfram(90);
        let w = window("0010110", CaBoundary::Periodic);
        let next = ca_step(&rule, &w).unwrap();
        assert_eq!(next.valid(), w.valid());
    }

    #[test]
    fn cantor_distance_reads_the_innermost_disagreement() {
        let x = window("0000000", CaBoundary::Periodic);
        // Cells cover coordinates -3..=3, so "0001001" differs from zero
        // at coordinates 0 and 3: the innermost ring is 0.
        let y = window("0001001", CaBoundary::Periodic);
        assert_eq!(cantor_distance(&x, &y).unwrap(), 1.0);
        // "0000101" differs at coordinates 1 and 3: innermost ring is 1.
        let z = window("0000101", CaBoundary::Periodic);
        assert_eq!(cantor_distance(&x, &z).unwrap(), 0.5);
        assert_eq!(cantor_distance(&x, &x).unwrap(), 0.0);
    }

    #[test]
    fn rotation_is_the_shift_map() {
        let rule = CaRule::from_wolfram(110);
        let w = window("010110101", CaBoundary::Periodic);
        let a = ca_step(&rule, &w.rotated(3).unwrap()).unwrap();
        let b = ca_step(&rule, &w).unwrap().rotated(3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn besicovitch_counts_disagreement_density() {
        let x = window("0000000", CaBoundary::Periodic);
        let y = window("0101010", CaBoundary::Periodic);
        let d = besicovitch_estimate(&x, &y, 3).unwrap();
        assert!((d - 3.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn alternating_pair_has_density_fifty_out_of_101() {
        // 0^infinity against (01)^infinity over [-50, 50].
        let zeros = CaWindow::from_cells(vec![0; 101], CaBoundary::Periodic).unwrap();
        let mut alt = vec![0u8; 101];
        for (i, slot) in alt.iter_mut().enumerate() {
            // Coordinate i - 50; symbol 1 at odd coordinates.
            let coord = i as i64 - 50;
            *slot = (coord.rem_euclid(2)) as u8;
        }
        let alt = CaWindow::from_cells(alt, CaBoundary::Periodic).unwrap();
        let d = besicovitch_estimate(&zeros, &alt, 50).unwrap();
        assert!((d - 50.0 / 101.0).abs() < 1e-12);
    }

    #[test]
    fn identity_rule_blocks_on_a_single_cell() {
        let rule = CaRule::from_wolfram(204);
        let wit = blocking_word_search(&rule, 4, 64).unwrap().unwrap();
        assert_eq!(wit.word, vec![0]);
        assert_eq!(wit.column, 0);
        assert_eq!(wit.verified_horizon, u64::MAX);
    }

    #[test]
    fn and_rule_blocks_on_a_zero() {
        let rule = CaRule::from_wolfram(128);
        let wit = blocking_word_search(&rule, 4, 1024).unwrap().unwrap();
        assert_eq!(wit.word, vec![0]);
    }

    #[test]
    fn shift_rule_has_no_short_blocking_word() {
        let rule = CaRule::from_wolfram(170);
        assert_eq!(blocking_word_search(&rule, 6, 256).unwrap(), None);
    }

    #[test]
    fn xor_rule_has_no_short_blocking_word() {
        let rule = CaRule::from_wolfram(90);
        assert_eq!(blocking_word_search(&rule, 4, 256).unwrap(), None);
    }

    #[test]
    fn shift_periodic_points_of_period_four() {
        let rule = CaRule::from_wolfram(170);
        let pts = ca_periodic_points(&rule, 4, 16).unwrap();
        assert_eq!(pts.len(), 16);
        let by_word: std::collections::HashMap<Vec<u8>, u64> = pts.into_iter().collect();
        assert_eq!(by_word[&vec![0, 0, 0, 0]], 1);
        assert_eq!(by_word[&vec![1, 1, 1, 1]], 1);
        assert_eq!(by_word[&vec![0, 1, 0, 1]], 2);
        assert_eq!(by_word[&vec![0, 0, 0, 1]], 4);
    }

    #[test]
    fn and_rule_periodic_points_are_the_uniform_ones() {
        let rule = CaRule::from_wolfram(128);
        let pts = ca_periodic_points(&rule, 2, 16).unwrap();
        assert_eq!(pts, vec![(vec![0, 0], 1), (vec![1, 1], 1)]);
    }
}
