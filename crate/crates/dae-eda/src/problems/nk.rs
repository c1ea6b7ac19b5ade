//! NK fitness landscapes with exact optima at small `n`.
//!
//! Each bit contributes through a lookup table indexed by its own value and
//! the values of `k` fixed neighbor bits; fitness is the mean contribution.
//! `k` tunes ruggedness from additively separable (`k = 0`) to fully random
//! (`k = n - 1`). Instances round-trip through a plain-text file format so
//! runs on a given landscape are repeatable across machines.

use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;

use crate::bits::Bitstring;
use crate::error::{Error, Result};
use crate::problems::Problem;
use crate::rng::{RngState, Stream};

/// Largest `n` for which exhaustive solving is allowed (2^26 evaluations).
pub const MAX_EXACT_N: usize = 26;

/// A certified maximizer of an instance.
#[derive(Debug, Clone, PartialEq)]
pub struct NkSolution {
    pub genome: Bitstring,
    pub fitness: f64,
}

/// An NK landscape instance: neighbor structure plus contribution tables.
///
/// `optimum` is present only when the instance has been solved exactly;
/// without it the instance still evaluates fine but can never report
/// success, since no target fitness is known.
#[derive(Debug, Clone)]
pub struct NkLandscape {
    n: usize,
    k: usize,
    seed: u64,
    /// `neighbors[i]` holds `k` distinct indices, none equal to `i`.
    neighbors: Vec<Vec<usize>>,
    /// `tables[i]` holds `2^(k+1)` contributions, indexed with bit `i` as
    /// the most significant bit followed by its neighbors in list order.
    tables: Vec<Vec<f64>>,
    optimum: Option<NkSolution>,
}

impl NkLandscape {
    /// Random instance: neighbors drawn without replacement from the other
    /// indices, table entries i.i.d. uniform in `[0, 1)`. Deterministic in
    /// `(n, k, seed)`.
    pub fn generate(n: usize, k: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        if k >= n {
            return Err(Error::InvalidArgument(format!(
                "epistasis degree k={k} needs k+1 <= n={n}"
            )));
        }
        let mut rng = RngState::for_stream(seed, Stream::InstanceGen, &[n as u64, k as u64]);
        let mut neighbors = Vec::with_capacity(n);
        for i in 0..n {
            // Sample from {0..n-1} \ {i} by sampling n-1 slots and skipping i.
            let mut list: Vec<usize> = rand::seq::index::sample(&mut rng, n - 1, k)
                .into_iter()
                .map(|j| if j < i { j } else { j + 1 })
                .collect();
            list.sort_unstable();
            neighbors.push(list);
        }
        let table_len = 1usize << (k + 1);
        let tables = (0..n)
            .map(|_| (0..table_len).map(|_| rng.gen::<f64>()).collect())
            .collect();
        Self::from_parts(neighbors, tables, seed)
    }

    /// Build from explicit structure, validating every invariant. `seed` is
    /// provenance metadata carried through the file format; use 0 for
    /// hand-built instances.
    pub fn from_parts(
        neighbors: Vec<Vec<usize>>,
        tables: Vec<Vec<f64>>,
        seed: u64,
    ) -> Result<Self> {
        let n = neighbors.len();
        if n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        if tables.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "{n} neighbor lists but {} tables",
                tables.len()
            )));
        }
        let k = neighbors[0].len();
        if k >= n {
            return Err(Error::InvalidArgument(format!(
                "epistasis degree k={k} needs k+1 <= n={n}"
            )));
        }
        let table_len = 1usize << (k + 1);
        for (i, list) in neighbors.iter().enumerate() {
            if list.len() != k {
                return Err(Error::ShapeMismatch(format!(
                    "neighbor list {i} has {} entries, expected {k}",
                    list.len()
                )));
            }
            let mut seen = vec![false; n];
            for &j in list {
                if j >= n {
                    return Err(Error::ShapeMismatch(format!(
                        "neighbor list {i} references index {j} >= n"
                    )));
                }
                if j == i {
                    return Err(Error::ShapeMismatch(format!(
                        "neighbor list {i} references itself"
                    )));
                }
                if seen[j] {
                    return Err(Error::ShapeMismatch(format!(
                        "neighbor list {i} repeats index {j}"
                    )));
                }
                seen[j] = true;
            }
        }
        for (i, table) in tables.iter().enumerate() {
            if table.len() != table_len {
                return Err(Error::ShapeMismatch(format!(
                    "table {i} has {} entries, expected {table_len}",
                    table.len()
                )));
            }
            for &v in table {
                if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                    return Err(Error::Domain(format!(
                        "table {i} entry {v} outside [0, 1]"
                    )));
                }
            }
        }
        Ok(Self {
            n,
            k,
            seed,
            neighbors,
            tables,
            optimum: None,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Seed recorded at generation time (0 for hand-built instances).
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The certified optimum, if this instance has been solved.
    pub fn known_optimum(&self) -> Option<&NkSolution> {
        self.optimum.as_ref()
    }

    /// Attach a solution after verifying it against re-evaluation. The
    /// stored fitness is the re-evaluated value, so later equality tests
    /// against `evaluate` are exact rather than tolerance-based.
    pub fn with_optimum(mut self, solution: NkSolution) -> Result<Self> {
        let refit = self.evaluate(&solution.genome)?;
        if (refit - solution.fitness).abs() > 1e-12 {
            return Err(Error::Domain(format!(
                "claimed optimum fitness {} disagrees with re-evaluation {}",
                solution.fitness, refit
            )));
        }
        self.optimum = Some(NkSolution {
            genome: solution.genome,
            fitness: refit,
        });
        Ok(self)
    }

    /// Exhaustively find the maximizer, ties broken toward the
    /// lexicographically smallest bitstring. Refuses `n > 26`.
    ///
    /// Deliberately evaluates through integer bit arithmetic rather than
    /// [`Problem::evaluate`], so the two paths cross-check each other.
    pub fn solve_exact(&self) -> Result<NkSolution> {
        if self.n > MAX_EXACT_N {
            return Err(Error::TooLarge(format!(
                "exhaustive solve supports n <= {MAX_EXACT_N}, got {}",
                self.n
            )));
        }
        // `v` enumerates genomes with bit i of the string at integer bit
        // n-1-i, so ascending v is lexicographic order and strict `>`
        // keeps the lexicographically smallest maximizer.
        let mut best_v = 0u32;
        let mut best_f = f64::NEG_INFINITY;
        for v in 0..(1u32 << self.n) {
            let mut sum = 0.0;
            for i in 0..self.n {
                let mut idx = ((v >> (self.n - 1 - i)) & 1) as usize;
                for &j in &self.neighbors[i] {
                    idx = (idx << 1) | ((v >> (self.n - 1 - j)) & 1) as usize;
                }
                sum += self.tables[i][idx];
            }
            let f = sum / self.n as f64;
            if f > best_f {
                best_f = f;
                best_v = v;
            }
        }
        let genome = Bitstring::new(
            (0..self.n)
                .map(|i| (best_v >> (self.n - 1 - i)) & 1 == 1)
                .collect(),
        )?;
        Ok(NkSolution {
            genome,
            fitness: best_f,
        })
    }

    /// Solve and attach the optimum in one step.
    pub fn solved(self) -> Result<Self> {
        let solution = self.solve_exact()?;
        self.with_optimum(solution)
    }

    /// Serialize to the plain-text instance format:
    ///
    /// ```text
    /// NK <n> <k> <seed>
    /// <i> <neighbor indices>     (n lines)
    /// <2^(k+1) table entries>    (n lines, 17 significant digits)
    /// OPT <bitstring> <fitness>  (only if solved)
    /// ```
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "NK {} {} {}", self.n, self.k, self.seed).unwrap();
        for (i, list) in self.neighbors.iter().enumerate() {
            write!(out, "{i}").unwrap();
            for &j in list {
                write!(out, " {j}").unwrap();
            }
            out.push('\n');
        }
        for table in &self.tables {
            let mut first = true;
            for &v in table {
                if !first {
                    out.push(' ');
                }
                // 17 significant digits round-trip f64 exactly.
                write!(out, "{v:.16e}").unwrap();
                first = false;
            }
            out.push('\n');
        }
        if let Some(opt) = &self.optimum {
            writeln!(out, "OPT {} {:.16e}", opt.genome, opt.fitness).unwrap();
        }
        out
    }

    /// Parse the format written by [`NkLandscape::to_text`]. Malformed
    /// counts, indices, and values are rejected with the offending line.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let parse_err = |line: usize, msg: String| Error::Parse { line, msg };

        let (line_no, header) = lines
            .next()
            .ok_or_else(|| parse_err(1, "empty instance file".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 || fields[0] != "NK" {
            return Err(parse_err(
                line_no,
                format!("expected `NK <n> <k> <seed>`, got `{header}`"),
            ));
        }
        let n: usize = fields[1]
            .parse()
            .map_err(|e| parse_err(line_no, format!("bad n: {e}")))?;
        let k: usize = fields[2]
            .parse()
            .map_err(|e| parse_err(line_no, format!("bad k: {e}")))?;
        let seed: u64 = fields[3]
            .parse()
            .map_err(|e| parse_err(line_no, format!("bad seed: {e}")))?;

        let mut neighbors = Vec::with_capacity(n);
        for i in 0..n {
            let (line_no, line) = lines
                .next()
                .ok_or_else(|| parse_err(0, format!("missing neighbor line for bit {i}")))?;
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != k + 1 {
                return Err(parse_err(
                    line_no,
                    format!("expected index plus {k} neighbors, got {} fields", fields.len()),
                ));
            }
            let idx: usize = fields[0]
                .parse()
                .map_err(|e| parse_err(line_no, format!("bad index: {e}")))?;
            if idx != i {
                return Err(parse_err(
                    line_no,
                    format!("neighbor lines out of order: expected {i}, got {idx}"),
                ));
            }
            let list = fields[1..]
                .iter()
                .map(|f| {
                    f.parse::<usize>()
                        .map_err(|e| parse_err(line_no, format!("bad neighbor: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            neighbors.push(list);
        }

        let table_len = 1usize << (k + 1);
        let mut tables = Vec::with_capacity(n);
        for i in 0..n {
            let (line_no, line) = lines
                .next()
                .ok_or_else(|| parse_err(0, format!("missing table line for bit {i}")))?;
            let entries = line
                .split_whitespace()
                .map(|f| {
                    f.parse::<f64>()
                        .map_err(|e| parse_err(line_no, format!("bad table entry: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            if entries.len() != table_len {
                return Err(parse_err(
                    line_no,
                    format!("expected {table_len} table entries, got {}", entries.len()),
                ));
            }
            tables.push(entries);
        }

        let instance = Self::from_parts(neighbors, tables, seed)?;

        match lines.next() {
            None => Ok(instance),
            Some((line_no, line)) => {
                let fields: Vec<&str> = line.split_whitespace().collect();
                if fields.len() != 3 || fields[0] != "OPT" {
                    return Err(parse_err(
                        line_no,
                        format!("expected `OPT <bitstring> <fitness>` or end of file, got `{line}`"),
                    ));
                }
                let genome = Bitstring::parse01(fields[1])
                    .map_err(|e| parse_err(line_no, format!("bad optimum bitstring: {e}")))?;
                let fitness: f64 = fields[2]
                    .parse()
                    .map_err(|e| parse_err(line_no, format!("bad optimum fitness: {e}")))?;
                if let Some((line_no, _)) = lines.next() {
                    return Err(parse_err(line_no, "trailing content after OPT line".into()));
                }
                instance.with_optimum(NkSolution { genome, fitness })
            }
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|source| Error::File {
            context: format!("writing NK instance to {}", path.display()),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::File {
            context: format!("reading NK instance from {}", path.display()),
            source,
        })?;
        Self::from_text(&text)
    }
}

impl Problem for NkLandscape {
    fn name(&self) -> &str {
        "nk"
    }

    fn size(&self) -> usize {
        self.n
    }

    fn evaluate(&self, x: &Bitstring) -> Result<f64> {
        if x.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        let mut sum = 0.0;
        for i in 0..self.n {
            let mut idx = x.bit(i) as usize;
            for &j in &self.neighbors[i] {
                idx = (idx << 1) | x.bit(j) as usize;
            }
            sum += self.tables[i][idx];
        }
        Ok(sum / self.n as f64)
    }

    /// Fitness of the certified optimum; +inf when unsolved, so success is
    /// never reported for an instance whose optimum is unknown.
    fn optimum(&self) -> f64 {
        self.optimum
            .as_ref()
            .map(|s| s.fitness)
            .unwrap_or(f64::INFINITY)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// k=0 with tables [0, 1]: each bit contributes its own value, so
    /// fitness is count_ones / n.
    fn identity_instance(n: usize) -> NkLandscape {
        let neighbors = vec![Vec::new(); n];
        let tables = vec![vec![0.0, 1.0]; n];
        NkLandscape::from_parts(neighbors, tables, 0).unwrap()
    }

    fn all_genomes(n: usize) -> impl Iterator<Item = Bitstring> {
        (0u32..(1 << n))
            .map(move |v| Bitstring::new((0..n).map(|i| (v >> (n - 1 - i)) & 1 == 1).collect()).unwrap())
    }

    #[test]
    fn identity_tables_reduce_to_counting_ones() {
        let inst = identity_instance(3);
        assert_eq!(inst.evaluate(&Bitstring::parse01("111").unwrap()).unwrap(), 1.0);
        assert_eq!(inst.evaluate(&Bitstring::parse01("000").unwrap()).unwrap(), 0.0);
        let f = inst.evaluate(&Bitstring::parse01("101").unwrap()).unwrap();
        assert!((f - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn generation_is_deterministic_and_well_shaped() {
        let a = NkLandscape::generate(10, 2, 1).unwrap();
        let b = NkLandscape::generate(10, 2, 1).unwrap();
        assert_eq!(a.to_text(), b.to_text());
        let c = NkLandscape::generate(10, 2, 2).unwrap();
        assert_ne!(a.to_text(), c.to_text());

        for table in &a.tables {
            assert_eq!(table.len(), 8); // 2^(k+1)
            assert!(table.iter().all(|v| (0.0..1.0).contains(v)));
        }
        let d = NkLandscape::generate(8, 3, 5).unwrap();
        for (i, list) in d.neighbors.iter().enumerate() {
            assert_eq!(list.len(), 3);
            let mut sorted = list.clone();
            sorted.dedup();
            assert_eq!(sorted.len(), 3, "duplicates in neighbor list {i}");
            assert!(list.iter().all(|&j| j != i && j < 8));
        }
    }

    #[test]
    fn solver_matches_brute_force_through_evaluate() {
        let inst = NkLandscape::generate(3, 1, 1).unwrap();
        let solved = inst.solve_exact().unwrap();
        let brute = all_genomes(3)
            .map(|x| {
                let f = inst.evaluate(&x).unwrap();
                (x, f)
            })
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        assert_eq!(solved.genome, brute.0);
        assert_eq!(solved.fitness, brute.1);
    }

    #[test]
    fn solver_breaks_ties_lexicographically() {
        // Constant tables make every genome optimal; the solver must
        // return all-zeros.
        let neighbors = vec![Vec::new(); 4];
        let tables = vec![vec![0.5, 0.5]; 4];
        let inst = NkLandscape::from_parts(neighbors, tables, 0).unwrap();
        let solved = inst.solve_exact().unwrap();
        assert_eq!(solved.genome.to_string(), "0000");
        assert_eq!(solved.fitness, 0.5);
    }

    #[test]
    fn solver_dominates_random_samples() {
        let inst = NkLandscape::generate(14, 3, 42).unwrap();
        let solved = inst.solve_exact().unwrap();
        let mut rng = RngState::new(7);
        for _ in 0..1000 {
            let x = Bitstring::random(14, &mut rng).unwrap();
            assert!(solved.fitness >= inst.evaluate(&x).unwrap());
        }
    }

    #[test]
    fn solver_refuses_large_instances() {
        let inst = NkLandscape::generate(27, 2, 1).unwrap();
        assert!(matches!(inst.solve_exact(), Err(Error::TooLarge(_))));
    }

    #[test]
    fn identity_solution_is_all_ones() {
        let solved = identity_instance(6).solved().unwrap();
        let opt = solved.known_optimum().unwrap();
        assert_eq!(opt.genome.to_string(), "111111");
        assert_eq!(opt.fitness, 1.0);
        assert_eq!(solved.optimum(), 1.0);
    }

    #[test]
    fn text_round_trip_is_exact() {
        let inst = NkLandscape::generate(9, 2, 123).unwrap().solved().unwrap();
        let text = inst.to_text();
        let back = NkLandscape::from_text(&text).unwrap();
        assert_eq!(back.to_text(), text);
        // Evaluation agrees bit-for-bit after the round trip.
        let mut rng = RngState::new(5);
        for _ in 0..100 {
            let x = Bitstring::random(9, &mut rng).unwrap();
            assert_eq!(inst.evaluate(&x).unwrap(), back.evaluate(&x).unwrap());
        }
        assert_eq!(
            back.known_optimum().unwrap().fitness,
            inst.known_optimum().unwrap().fitness,
        );
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("inst.nk");
        let inst = NkLandscape::generate(7, 1, 9).unwrap();
        inst.save(&path).unwrap();
        let back = NkLandscape::load(&path).unwrap();
        assert_eq!(back.to_text(), inst.to_text());
    }

    #[test]
    fn parser_rejects_malformed_input() {
        // Truncated: promises n=3 but provides two neighbor lines.
        let bad = "NK 3 0 0\n0\n1\n";
        assert!(matches!(
            NkLandscape::from_text(bad),
            Err(Error::Parse { .. })
        ));
        // Wrong table width.
        let bad = "NK 2 0 0\n0\n1\n1.0e0\n0.0e0 1.0e0\n";
        assert!(NkLandscape::from_text(bad).is_err());
        // Optimum fitness that contradicts the tables.
        let bad = "NK 2 0 0\n0\n1\n0.0e0 1.0e0\n0.0e0 1.0e0\nOPT 11 0.25\n";
        assert!(matches!(NkLandscape::from_text(bad), Err(Error::Domain(_))));
        // Self-referencing neighbor list.
        let bad = "NK 2 1 0\n0 0\n1 0\n0.0e0 0.1e0 0.2e0 0.3e0\n0.0e0 0.1e0 0.2e0 0.3e0\n";
        assert!(matches!(
            NkLandscape::from_text(bad),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn unsolved_instances_never_report_success() {
        let inst = NkLandscape::generate(6, 2, 3).unwrap();
        assert_eq!(inst.optimum(), f64::INFINITY);
        for x in all_genomes(6) {
            assert!(!inst.is_optimal(&x).unwrap());
        }
    }

    #[test]
    fn generation_rejects_bad_parameters() {
        assert!(NkLandscape::generate(0, 0, 1).is_err());
        assert!(NkLandscape::generate(5, 5, 1).is_err());
    }
}
