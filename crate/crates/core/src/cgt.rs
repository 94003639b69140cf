//! Combinatorial group testing: find a small hidden set of items from
//! "does this pool contain a hidden item" tests.
//!
//! The classical backend is a real adaptive algorithm. The quantum backends
//! find the answer with uncharged (audited) tests and book their proven query
//! complexity instead of simulating a circuit.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::f2core::BitVector;
use crate::oracles::{GraphOracle, JuntaOracle};

/// Largest subset enumeration attempted by the nonadaptive decoder.
pub const MAX_DECODE_ENUMERATION: u64 = 1_000_000;
/// Constructions tried before a design is reported as failed.
pub const DESIGN_RETRY_CAP: usize = 1000;
/// Default multiplier in the `ceil(c d^2 ln(n+1))` test count.
pub const DEFAULT_DESIGN_CONSTANT: f64 = 2.0;
/// Random supports checked per design when exhaustive checking is too large.
pub const SPOT_CHECKS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CgtError {
    #[error("hidden set has more than {bound} items (found {found})")]
    PromiseViolated { bound: usize, found: usize },
    #[error("cost constant must be positive, got {0}")]
    InvalidConstant(f64),
    #[error("expected {expected} outcomes, got {found}")]
    OutcomeLength { expected: usize, found: usize },
    #[error("no support of size <= {0} explains the outcomes")]
    Inconsistent(usize),
    #[error("{0} supports explain the outcomes")]
    Ambiguous(usize),
    #[error("design verification failed after {0} attempts")]
    DesignFailed(usize),
}

/// A set of `items()` items tested by pools of item indices.
pub trait GroupTest {
    fn items(&self) -> usize;
    /// Charged test: true iff the pool contains a hidden item.
    fn test(&mut self, pool: &[usize]) -> bool;
    /// The same answer without a query charge; audited by the oracle.
    fn test_uncharged(&mut self, pool: &[usize]) -> bool;
    fn charge_quantum(&mut self, amount: u64);
}

/// Items are vertices; a pool is tested by an OR query on `base` plus the
/// pool's vertices.
pub struct OrGroupTest<'a> {
    oracle: &'a mut GraphOracle,
    vertices: &'a [usize],
    base: BitVector,
}

impl<'a> OrGroupTest<'a> {
    pub fn new(oracle: &'a mut GraphOracle, vertices: &'a [usize], base: BitVector) -> Self {
        Self {
            oracle,
            vertices,
            base,
        }
    }

    fn query_set(&self, pool: &[usize]) -> BitVector {
        let mut s = self.base.clone();
        for &i in pool {
            s.set(self.vertices[i], true);
        }
        s
    }
}

impl GroupTest for OrGroupTest<'_> {
    fn items(&self) -> usize {
        self.vertices.len()
    }

    fn test(&mut self, pool: &[usize]) -> bool {
        let s = self.query_set(pool);
        self.oracle.or_query(&s)
    }

    fn test_uncharged(&mut self, pool: &[usize]) -> bool {
        let s = self.query_set(pool);
        self.oracle.or_query_uncharged(&s)
    }

    fn charge_quantum(&mut self, amount: u64) {
        self.oracle.charge_quantum(amount);
    }
}

/// Items are the input bits of a monotone junta; a pool is tested by
/// evaluating the junta on its indicator vector.
pub struct JuntaGroupTest<'a> {
    oracle: &'a mut JuntaOracle,
}

impl<'a> JuntaGroupTest<'a> {
    pub fn new(oracle: &'a mut JuntaOracle) -> Self {
        Self { oracle }
    }
}

impl GroupTest for JuntaGroupTest<'_> {
    fn items(&self) -> usize {
        self.oracle.n()
    }

    fn test(&mut self, pool: &[usize]) -> bool {
        let x = BitVector::from_indices(self.oracle.n(), pool.iter().copied());
        self.oracle.junta_query(&x)
    }

    fn test_uncharged(&mut self, pool: &[usize]) -> bool {
        let x = BitVector::from_indices(self.oracle.n(), pool.iter().copied());
        self.oracle.junta_query_uncharged(&x)
    }

    fn charge_quantum(&mut self, amount: u64) {
        self.oracle.charge_quantum(amount);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CgtKind {
    ClassicalAdaptive,
    QuantumIdeal,
    QuantumTimeEfficient,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CgtBackend {
    pub kind: CgtKind,
    /// Multiplier of the charged quantum cost.
    #[serde(default = "default_constant")]
    pub c: f64,
    /// After a bounded search has found `k` items, spend one more test
    /// checking that the rest is empty.
    #[serde(default)]
    pub verify: bool,
}

fn default_constant() -> f64 {
    1.0
}

impl CgtBackend {
    pub fn new(kind: CgtKind) -> Self {
        Self {
            kind,
            c: 1.0,
            verify: false,
        }
    }

    pub fn classical() -> Self {
        Self::new(CgtKind::ClassicalAdaptive)
    }

    pub fn quantum_ideal() -> Self {
        Self::new(CgtKind::QuantumIdeal)
    }

    pub fn quantum_time_efficient() -> Self {
        Self::new(CgtKind::QuantumTimeEfficient)
    }

    pub fn with_constant(mut self, c: f64) -> Self {
        self.c = c;
        self
    }

    pub fn with_verify(mut self, verify: bool) -> Self {
        self.verify = verify;
        self
    }

    /// Charge of one quantum call for weight bound `k`: `ceil(c sqrt k)`, or
    /// `ceil(c sqrt(k) log2(k+1) log2(log2(k+3)))` for the time-efficient model.
    /// Zero for the classical backend.
    pub fn quantum_charge(&self, k: usize) -> u64 {
        let k = k as f64;
        let cost = match self.kind {
            CgtKind::ClassicalAdaptive => 0.0,
            CgtKind::QuantumIdeal => self.c * k.sqrt(),
            CgtKind::QuantumTimeEfficient => self.c * k.sqrt() * (k + 1.0).log2() * (k + 3.0).log2().log2(),
        };
        cost.ceil() as u64
    }
}

/// Finds the hidden items. `bound` is the promised maximum weight, if known.
pub fn cgt_solve<G: GroupTest + ?Sized>(
    backend: &CgtBackend,
    oracle: &mut G,
    bound: Option<usize>,
) -> Result<Vec<usize>, CgtError> {
    cgt_solve_with(backend, oracle, bound, false)
}

/// As [`cgt_solve`]; `known_nonempty` skips the test of the full item set
/// when the caller already knows it is positive.
pub fn cgt_solve_with<G: GroupTest + ?Sized>(
    backend: &CgtBackend,
    oracle: &mut G,
    bound: Option<usize>,
    known_nonempty: bool,
) -> Result<Vec<usize>, CgtError> {
    if backend.c.is_nan() || backend.c <= 0.0 {
        return Err(CgtError::InvalidConstant(backend.c));
    }
    let items: Vec<usize> = (0..oracle.items()).collect();
    if items.is_empty() {
        return Ok(Vec::new());
    }
    let mut found = match backend.kind {
        CgtKind::ClassicalAdaptive => match bound {
            Some(k) => binary_splitting(oracle, items, k, known_nonempty, backend.verify)?,
            None => {
                let mut out = Vec::new();
                halving(&mut |p| oracle.test(p), &items, known_nonempty, &mut out);
                out
            }
        },
        CgtKind::QuantumIdeal | CgtKind::QuantumTimeEfficient => {
            let mut out = Vec::new();
            halving(&mut |p| oracle.test_uncharged(p), &items, false, &mut out);
            if let Some(k) = bound {
                if out.len() > k {
                    return Err(CgtError::PromiseViolated {
                        bound: k,
                        found: out.len(),
                    });
                }
            }
            if out.is_empty() {
                if !known_nonempty {
                    oracle.test(&items);
                }
            } else {
                oracle.charge_quantum(backend.quantum_charge(bound.unwrap_or(out.len())));
            }
            out
        }
    };
    found.sort_unstable();
    Ok(found)
}

/// Splits `items` in halves, descending only into positive halves. A half
/// is skipped without a test when its sibling was negative.
fn halving(
    test: &mut dyn FnMut(&[usize]) -> bool,
    items: &[usize],
    known_positive: bool,
    out: &mut Vec<usize>,
) {
    if items.is_empty() || (!known_positive && !test(items)) {
        return;
    }
    if items.len() == 1 {
        out.push(items[0]);
        return;
    }
    let (left, right) = items.split_at(items.len() / 2);
    if test(left) {
        halving(test, left, true, out);
        halving(test, right, false, out);
    } else {
        halving(test, right, true, out);
    }
}

/// Generalized binary splitting for at most `k` hidden items: test a group of
/// size `2^floor(log2((n-k+1)/k))`; a negative group is discarded, a positive
/// one yields an item by binary search.
fn binary_splitting<G: GroupTest + ?Sized>(
    oracle: &mut G,
    mut rest: Vec<usize>,
    k: usize,
    known_nonempty: bool,
    verify: bool,
) -> Result<Vec<usize>, CgtError> {
    let mut found = Vec::new();
    let mut d = k;
    let mut rest_positive = known_nonempty;
    while d > 0 && !rest.is_empty() {
        let n = rest.len();
        if n + 2 <= 2 * d {
            for &i in &rest {
                if oracle.test(&[i]) {
                    found.push(i);
                }
            }
            rest.clear();
            break;
        }
        let ratio = (n - d + 1) as f64 / d as f64;
        let size = 1usize << (ratio.log2().floor().max(0.0) as u32);
        let size = size.min(n);
        let skip_test = rest_positive && size == n;
        if !skip_test && !oracle.test(&rest[..size]) {
            rest.drain(..size);
            continue;
        }
        let mut group: Vec<usize> = rest.drain(..size).collect();
        let mut returned = Vec::new();
        while group.len() > 1 {
            let upper = group.split_off(group.len() / 2);
            if oracle.test(&group) {
                returned.extend(upper);
            } else {
                group = upper;
            }
        }
        found.push(group[0]);
        d -= 1;
        rest.extend(returned);
        rest_positive = false;
    }
    if !rest.is_empty() && (k == 0 || verify) && oracle.test(&rest) {
        return Err(CgtError::PromiseViolated {
            bound: k,
            found: found.len() + 1,
        });
    }
    Ok(found)
}

/// A fixed family of tests over `n` items meant to identify any support of
/// size at most `d` from its OR outcomes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DesignRepr", into = "DesignRepr")]
pub struct NonadaptiveDesign {
    n: usize,
    d: usize,
    tests: Vec<Vec<usize>>,
    incidence: Vec<BitVector>,
}

#[derive(Serialize, Deserialize)]
struct DesignRepr {
    n: usize,
    d: usize,
    tests: Vec<Vec<usize>>,
}

impl TryFrom<DesignRepr> for NonadaptiveDesign {
    type Error = String;

    fn try_from(r: DesignRepr) -> Result<Self, String> {
        if r.tests.iter().flatten().any(|&i| i >= r.n) {
            return Err(format!("test item out of range for n = {}", r.n));
        }
        Ok(Self::from_tests(r.n, r.d, r.tests))
    }
}

impl From<NonadaptiveDesign> for DesignRepr {
    fn from(d: NonadaptiveDesign) -> Self {
        Self {
            n: d.n,
            d: d.d,
            tests: d.tests,
        }
    }
}

/// `ceil(c d^2 ln(n+1))`.
pub fn design_test_count(n: usize, d: usize, c: f64) -> usize {
    (c * (d * d) as f64 * ((n + 1) as f64).ln()).ceil() as usize
}

impl NonadaptiveDesign {
    /// # Panics
    /// If a test names an item `>= n`.
    pub fn from_tests(n: usize, d: usize, tests: Vec<Vec<usize>>) -> Self {
        let mut incidence = vec![BitVector::zeros(tests.len()); n];
        for (j, t) in tests.iter().enumerate() {
            for &i in t {
                incidence[i].set(j, true);
            }
        }
        Self {
            n,
            d,
            tests,
            incidence,
        }
    }

    /// The `d = 1` family: test `j` holds the items whose index plus one has
    /// bit `j` set.
    pub fn binary_indexing(n: usize) -> Self {
        let bits = usize::BITS - n.leading_zeros();
        let tests = (0..bits)
            .map(|j| (0..n).filter(|&i| (i + 1) >> j & 1 == 1).collect())
            .collect();
        Self::from_tests(n, 1, tests)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn tests(&self) -> &[Vec<usize>] {
        &self.tests
    }

    /// Outcome vector of a support.
    pub fn outcomes(&self, support: &[usize]) -> BitVector {
        let mut out = BitVector::zeros(self.tests.len());
        for &i in support {
            out.or_assign(&self.incidence[i]);
        }
        out
    }

    /// Cover decoding followed by a consistency filter: the candidates are
    /// the items all of whose tests are positive, and the answer is the
    /// unique candidate subset of size at most `d` reproducing the outcomes.
    pub fn decode(&self, outcomes: &BitVector) -> Result<Vec<usize>, CgtError> {
        if outcomes.len() != self.tests.len() {
            return Err(CgtError::OutcomeLength {
                expected: self.tests.len(),
                found: outcomes.len(),
            });
        }
        let candidates: Vec<usize> = (0..self.n)
            .filter(|&i| self.incidence[i].is_subset_of(outcomes))
            .collect();
        if candidates.len() <= self.d && self.outcomes(&candidates) == *outcomes {
            return Ok(candidates);
        }
        if subset_count(candidates.len(), self.d) > MAX_DECODE_ENUMERATION {
            return Err(CgtError::Ambiguous(candidates.len()));
        }
        let mut hits = Vec::new();
        let mut chosen = Vec::new();
        self.search(&candidates, 0, outcomes, &mut chosen, &mut hits);
        match hits.len() {
            0 => Err(CgtError::Inconsistent(self.d)),
            1 => Ok(hits.pop().expect("one hit")),
            h => Err(CgtError::Ambiguous(h)),
        }
    }

    fn search(
        &self,
        candidates: &[usize],
        from: usize,
        outcomes: &BitVector,
        chosen: &mut Vec<usize>,
        hits: &mut Vec<Vec<usize>>,
    ) {
        if self.outcomes(chosen) == *outcomes {
            hits.push(chosen.clone());
        }
        if chosen.len() == self.d || hits.len() > 1 {
            return;
        }
        for i in from..candidates.len() {
            chosen.push(candidates[i]);
            self.search(candidates, i + 1, outcomes, chosen, hits);
            chosen.pop();
        }
    }

    /// Checks that every support of size at most `d` decodes to itself:
    /// exhaustively for `n <= 20`, otherwise on [`SPOT_CHECKS`] random supports.
    pub fn verify<R: Rng + ?Sized>(&self, rng: &mut R) -> bool {
        let roundtrip = |s: &[usize]| self.decode(&self.outcomes(s)).is_ok_and(|got| got == s);
        if self.n <= 20 {
            let mut ok = true;
            for_each_support(self.n, self.d, &mut |s| {
                ok = ok && roundtrip(s);
                ok
            });
            ok
        } else {
            (0..SPOT_CHECKS).all(|_| {
                let size = rng.gen_range(0..=self.d.min(self.n));
                let mut s = rand::seq::index::sample(rng, self.n, size).into_vec();
                s.sort_unstable();
                roundtrip(&s)
            })
        }
    }
}

fn subset_count(n: usize, d: usize) -> u64 {
    let mut total = 0u64;
    let mut c = 1u64;
    for l in 0..=d.min(n) {
        total = total.saturating_add(c);
        c = c.saturating_mul((n - l) as u64) / (l as u64 + 1);
    }
    total
}

/// Calls `f` on every sorted subset of `0..n` of size at most `d` until it
/// returns false.
fn for_each_support(n: usize, d: usize, f: &mut dyn FnMut(&[usize]) -> bool) {
    fn rec(
        n: usize,
        d: usize,
        from: usize,
        cur: &mut Vec<usize>,
        f: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if !f(cur) {
            return false;
        }
        if cur.len() == d {
            return true;
        }
        for i in from..n {
            cur.push(i);
            let go = rec(n, d, i + 1, cur, f);
            cur.pop();
            if !go {
                return false;
            }
        }
        true
    }
    rec(n, d, 0, &mut Vec::new(), f);
}

/// Random design with `ceil(c d^2 ln(n+1))` tests, each item joining each test
/// with probability `1/(d+1)`, redrawn until [`NonadaptiveDesign::verify`]
/// passes.
pub fn build_nonadaptive_design<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    c: f64,
    rng: &mut R,
) -> Result<NonadaptiveDesign, CgtError> {
    if c.is_nan() || c <= 0.0 {
        return Err(CgtError::InvalidConstant(c));
    }
    let t = design_test_count(n, d, c);
    let p = 1.0 / (d as f64 + 1.0);
    for _ in 0..DESIGN_RETRY_CAP {
        let tests = (0..t)
            .map(|_| (0..n).filter(|_| rng.gen_bool(p)).collect())
            .collect();
        let design = NonadaptiveDesign::from_tests(n, d, tests);
        if design.verify(rng) {
            return Ok(design);
        }
    }
    Err(CgtError::DesignFailed(DESIGN_RETRY_CAP))
}

/// [`NonadaptiveDesign::decode`] as a free function.
pub fn decode_nonadaptive(design: &NonadaptiveDesign, outcomes: &BitVector) -> Result<Vec<usize>, CgtError> {
    design.decode(outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Hidden set with exact test counting.
    struct Planted {
        n: usize,
        hidden: Vec<usize>,
        charged: u64,
        uncharged: u64,
        quantum: u64,
    }

    impl Planted {
        fn new(n: usize, hidden: &[usize]) -> Self {
            Self {
                n,
                hidden: hidden.to_vec(),
                charged: 0,
                uncharged: 0,
                quantum: 0,
            }
        }

        fn hit(&self, pool: &[usize]) -> bool {
            pool.iter().any(|i| self.hidden.contains(i))
        }
    }

    impl GroupTest for Planted {
        fn items(&self) -> usize {
            self.n
        }
        fn test(&mut self, pool: &[usize]) -> bool {
            self.charged += 1;
            self.hit(pool)
        }
        fn test_uncharged(&mut self, pool: &[usize]) -> bool {
            self.uncharged += 1;
            self.hit(pool)
        }
        fn charge_quantum(&mut self, amount: u64) {
            self.quantum += amount;
        }
    }

    fn all_backends() -> [CgtBackend; 3] {
        [
            CgtBackend::classical(),
            CgtBackend::quantum_ideal(),
            CgtBackend::quantum_time_efficient(),
        ]
    }

    #[test]
    fn empty_hidden_set_costs_one_query() {
        for b in all_backends() {
            let mut o = Planted::new(10, &[]);
            assert_eq!(cgt_solve(&b, &mut o, Some(0)).unwrap(), Vec::<usize>::new());
            assert_eq!((o.charged, o.quantum), (1, 0), "{b:?}");
        }
    }

    #[test]
    fn single_item_in_eight_takes_four_tests() {
        let mut o = Planted::new(8, &[3]);
        assert_eq!(
            cgt_solve(&CgtBackend::classical(), &mut o, Some(1)).unwrap(),
            vec![3]
        );
        assert!(o.charged <= 4, "{}", o.charged);
    }

    #[test]
    fn bounded_search_budget_n1024_k16() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let mut hidden = rand::seq::index::sample(&mut rng, 1024, 16).into_vec();
            hidden.sort_unstable();
            let mut o = Planted::new(1024, &hidden);
            assert_eq!(
                cgt_solve(&CgtBackend::classical(), &mut o, Some(16)).unwrap(),
                hidden
            );
            assert!(o.charged <= 208, "{}", o.charged);
        }
    }

    #[test]
    fn exact_for_all_backends_and_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..300 {
            let n = rng.gen_range(1..80);
            let k = rng.gen_range(0..=n.min(12));
            let mut hidden = rand::seq::index::sample(&mut rng, n, k).into_vec();
            hidden.sort_unstable();
            for b in all_backends() {
                for bound in [None, Some(k), Some(k + 3)] {
                    let mut o = Planted::new(n, &hidden);
                    assert_eq!(cgt_solve(&b, &mut o, bound).unwrap(), hidden, "{b:?} {bound:?}");
                }
            }
        }
    }

    #[test]
    fn quantum_charges_are_exact() {
        let mut o = Planted::new(50, &[1, 4, 9, 16]);
        let b = CgtBackend::quantum_ideal().with_constant(1.5);
        cgt_solve(&b, &mut o, Some(9)).unwrap();
        assert_eq!((o.charged, o.quantum), (0, 5));
        assert!(o.uncharged > 0);
        let mut o = Planted::new(50, &[1, 4, 9, 16]);
        cgt_solve(&CgtBackend::quantum_time_efficient(), &mut o, None).unwrap();
        // sqrt(4) log2(5) log2(log2(7)) = 2 * 2.32 * 1.49 = 6.91...
        assert_eq!(o.quantum, 7);
        assert_eq!(CgtBackend::quantum_ideal().quantum_charge(16), 4);
        assert_eq!(CgtBackend::classical().quantum_charge(16), 0);
    }

    #[test]
    fn promise_violations() {
        let mut o = Planted::new(20, &[2, 5, 7]);
        assert_eq!(
            cgt_solve(&CgtBackend::quantum_ideal(), &mut o, Some(2)),
            Err(CgtError::PromiseViolated { bound: 2, found: 3 })
        );
        let mut o = Planted::new(20, &[2, 5, 7]);
        let b = CgtBackend::classical().with_verify(true);
        assert!(matches!(
            cgt_solve(&b, &mut o, Some(2)),
            Err(CgtError::PromiseViolated { bound: 2, .. })
        ));
        let mut o = Planted::new(20, &[2]);
        assert!(cgt_solve(&CgtBackend::classical(), &mut o, Some(0)).is_err());
        assert!(cgt_solve(&CgtBackend::classical().with_constant(0.0), &mut o, None).is_err());
    }

    #[test]
    fn known_nonempty_saves_the_first_test() {
        let mut a = Planted::new(8, &[6]);
        let mut b = Planted::new(8, &[6]);
        cgt_solve_with(&CgtBackend::classical(), &mut a, Some(1), false).unwrap();
        cgt_solve_with(&CgtBackend::classical(), &mut b, Some(1), true).unwrap();
        assert_eq!(a.charged, b.charged + 1);
    }

    #[test]
    fn design_sizes_and_small_cases() {
        assert_eq!(design_test_count(12, 2, 1.0), (4.0 * 13f64.ln()).ceil() as usize);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d = build_nonadaptive_design(2, 1, DEFAULT_DESIGN_CONSTANT, &mut rng).unwrap();
        assert_eq!(d.tests().len(), design_test_count(2, 1, DEFAULT_DESIGN_CONSTANT));
        for s in [vec![], vec![0], vec![1]] {
            assert_eq!(d.decode(&d.outcomes(&s)).unwrap(), s);
        }
        let d = build_nonadaptive_design(12, 2, DEFAULT_DESIGN_CONSTANT, &mut rng).unwrap();
        let mut count = 0;
        for_each_support(12, 2, &mut |s| {
            assert_eq!(d.decode(&d.outcomes(s)).unwrap(), s);
            count += 1;
            true
        });
        assert_eq!(count, 79);
        assert_eq!(
            d.decode(&BitVector::zeros(d.tests().len())).unwrap(),
            Vec::<usize>::new()
        );
    }

    #[test]
    fn binary_indexing_decodes_singletons() {
        for n in 1..40 {
            let d = NonadaptiveDesign::binary_indexing(n);
            for i in 0..n {
                assert_eq!(d.decode(&d.outcomes(&[i])).unwrap(), vec![i]);
            }
            assert!(d.decode(&BitVector::zeros(d.tests().len())).unwrap().is_empty());
        }
    }

    #[test]
    fn flipped_outcome_is_caught() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let d = build_nonadaptive_design(15, 2, DEFAULT_DESIGN_CONSTANT, &mut rng).unwrap();
        for _ in 0..200 {
            let mut s = rand::seq::index::sample(&mut rng, 15, 2).into_vec();
            s.sort_unstable();
            let mut out = d.outcomes(&s);
            out.flip(rng.gen_range(0..out.len()));
            match d.decode(&out) {
                Err(_) => {}
                Ok(got) => assert_ne!(d.outcomes(&got), d.outcomes(&s)),
            }
        }
    }

    #[test]
    fn large_design_spot_checked() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let d = build_nonadaptive_design(64, 3, DEFAULT_DESIGN_CONSTANT, &mut rng).unwrap();
        let s = vec![3, 40, 63];
        assert_eq!(d.decode(&d.outcomes(&s)).unwrap(), s);
        assert!(d.decode(&BitVector::zeros(3)).is_err());
    }

    #[test]
    fn design_json_round_trip() {
        let d = NonadaptiveDesign::binary_indexing(5);
        let json = serde_json::to_string(&d).unwrap();
        assert!(json.starts_with(r#"{"n":5,"d":1,"tests":[["#));
        let back: NonadaptiveDesign = serde_json::from_str(&json).unwrap();
        assert_eq!(back, d);
        assert!(serde_json::from_str::<NonadaptiveDesign>(r#"{"n":2,"d":1,"tests":[[5]]}"#).is_err());
    }

    #[test]
    fn graph_and_junta_adapters() {
        use crate::graphs::Graph;
        use crate::oracles::{Junta, JuntaOracle};
        use crate::truth_table::TruthTable;
        // neighbours of vertex 0 through OR queries that always contain 0
        let g = Graph::star(10, 0, &[2, 5, 9]).unwrap();
        let mut h = GraphOracle::new(g, 0);
        let others: Vec<usize> = (1..10).collect();
        let base = BitVector::from_indices(10, [0]);
        let found = cgt_solve(
            &CgtBackend::classical(),
            &mut OrGroupTest::new(&mut h, &others, base),
            None,
        )
        .unwrap();
        let found: Vec<usize> = found.iter().map(|&i| others[i]).collect();
        assert_eq!(found, vec![2, 5, 9]);
        assert_eq!(h.ledger().reveal_used(), 0);

        let junta = Junta::new(30, vec![4, 17, 22], TruthTable::or(3)).unwrap();
        let mut h = JuntaOracle::new(junta, 0).unwrap();
        let b = CgtBackend::quantum_ideal();
        let found = cgt_solve(&b, &mut JuntaGroupTest::new(&mut h), Some(3)).unwrap();
        assert_eq!(found, vec![4, 17, 22]);
        assert_eq!(h.ledger().charged_quantum(), 2);
        assert!(h.ledger().reveal_used() > 0);
    }
}
