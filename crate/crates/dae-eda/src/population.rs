//! Individuals and populations.

use crate::bits::Bitstring;
use crate::error::{Error, Result};
use crate::rng::RngState;

/// A genome with an optional cached fitness. Fitness is only readable after
/// evaluation and is always finite once set.
#[derive(Debug, Clone)]
pub struct Individual {
    genome: Bitstring,
    fitness: Option<f64>,
}

impl Individual {
    pub fn unevaluated(genome: Bitstring) -> Self {
        Individual { genome, fitness: None }
    }

    pub fn evaluated(genome: Bitstring, fitness: f64) -> Result<Self> {
        let mut ind = Individual::unevaluated(genome);
        ind.set_fitness(fitness)?;
        Ok(ind)
    }

    pub fn genome(&self) -> &Bitstring {
        &self.genome
    }

    pub fn fitness(&self) -> Option<f64> {
        self.fitness
    }

    pub fn is_evaluated(&self) -> bool {
        self.fitness.is_some()
    }

    pub fn set_fitness(&mut self, fitness: f64) -> Result<()> {
        if !fitness.is_finite() {
            return Err(Error::NonFinite(format!(
                "fitness {fitness} for genome {}",
                self.genome
            )));
        }
        self.fitness = Some(fitness);
        Ok(())
    }
}

/// A non-empty set of individuals sharing one genome length.
#[derive(Debug, Clone)]
pub struct Population {
    members: Vec<Individual>,
    n: usize,
}

impl Population {
    pub fn new(members: Vec<Individual>) -> Result<Self> {
        let n = match members.first() {
            Some(first) => first.genome().len(),
            None => return Err(Error::InvalidArgument("population must be non-empty".into())),
        };
        for m in &members {
            if m.genome().len() != n {
                return Err(Error::LengthMismatch { expected: n, got: m.genome().len() });
            }
        }
        Ok(Population { members, n })
    }

    /// `size` unevaluated individuals with uniformly random bits.
    pub fn random(n: usize, size: usize, rng: &mut RngState) -> Result<Self> {
        if n == 0 || size == 0 {
            return Err(Error::InvalidArgument(format!(
                "population needs n >= 1 and size >= 1, got n={n}, size={size}"
            )));
        }
        let members = (0..size)
            .map(|_| Ok(Individual::unevaluated(Bitstring::random(n, rng)?)))
            .collect::<Result<Vec<_>>>()?;
        Population::new(members)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        false // invariant: never empty
    }

    pub fn members(&self) -> &[Individual] {
        &self.members
    }

    pub fn members_mut(&mut self) -> &mut [Individual] {
        &mut self.members
    }

    pub fn push(&mut self, individual: Individual) -> Result<()> {
        if individual.genome().len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: individual.genome().len() });
        }
        self.members.push(individual);
        Ok(())
    }

    pub fn fully_evaluated(&self) -> bool {
        self.members.iter().all(Individual::is_evaluated)
    }

    /// Index and member with the highest fitness; ties resolve to the lowest
    /// index. Errors if any member is unevaluated.
    pub fn best(&self) -> Result<(usize, &Individual)> {
        let mut best: Option<(usize, f64)> = None;
        for (i, m) in self.members.iter().enumerate() {
            let f = m.fitness().ok_or(Error::Unevaluated)?;
            if best.map_or(true, |(_, bf)| f > bf) {
                best = Some((i, f));
            }
        }
        let (i, _) = best.expect("population is non-empty");
        Ok((i, &self.members[i]))
    }

    /// Indices of the `count` fittest members, fitness descending, ties by
    /// lowest index.
    pub fn fittest_indices(&self, count: usize) -> Result<Vec<usize>> {
        if !self.fully_evaluated() {
            return Err(Error::Unevaluated);
        }
        let mut idx: Vec<usize> = (0..self.members.len()).collect();
        idx.sort_by(|&a, &b| {
            let fa = self.members[a].fitness().unwrap();
            let fb = self.members[b].fitness().unwrap();
            fb.partial_cmp(&fa).unwrap().then(a.cmp(&b))
        });
        idx.truncate(count);
        Ok(idx)
    }

    pub fn mean_fitness(&self) -> Result<f64> {
        let mut sum = 0.0;
        for m in &self.members {
            sum += m.fitness().ok_or(Error::Unevaluated)?;
        }
        Ok(sum / self.members.len() as f64)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Individual> {
        self.members.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_population_shape_contract() {
        let mut rng = RngState::new(7);
        let pop = Population::random(4, 3, &mut rng).unwrap();
        assert_eq!(pop.len(), 3);
        assert_eq!(pop.n(), 4);
        assert!(pop.iter().all(|m| !m.is_evaluated() && m.genome().len() == 4));
    }

    #[test]
    fn random_population_deterministic() {
        let a = Population::random(10, 5, &mut RngState::new(99)).unwrap();
        let b = Population::random(10, 5, &mut RngState::new(99)).unwrap();
        let bits_a: Vec<String> = a.iter().map(|m| m.genome().to_string()).collect();
        let bits_b: Vec<String> = b.iter().map(|m| m.genome().to_string()).collect();
        assert_eq!(bits_a, bits_b);
    }

    #[test]
    fn random_population_rejects_zero_sizes() {
        let mut rng = RngState::new(1);
        assert!(Population::random(0, 3, &mut rng).is_err());
        assert!(Population::random(3, 0, &mut rng).is_err());
    }

    #[test]
    fn random_population_per_bit_mean() {
        // 10^4 individuals: per-bit mean concentrates within 10 sigma of 0.5.
        let mut rng = RngState::new(123);
        let pop = Population::random(50, 10_000, &mut rng).unwrap();
        for bit in 0..50 {
            let ones: usize = pop.iter().filter(|m| m.genome().bit(bit)).count();
            let mean = ones as f64 / pop.len() as f64;
            assert!((0.45..=0.55).contains(&mean), "bit {bit} mean {mean}");
        }
    }

    #[test]
    fn fitness_gating() {
        let mut ind = Individual::unevaluated(Bitstring::parse01("010").unwrap());
        assert_eq!(ind.fitness(), None);
        assert!(ind.set_fitness(f64::INFINITY).is_err());
        ind.set_fitness(1.5).unwrap();
        assert_eq!(ind.fitness(), Some(1.5));
    }

    #[test]
    fn best_and_fittest() {
        let mk = |s: &str, f: f64| Individual::evaluated(Bitstring::parse01(s).unwrap(), f).unwrap();
        let pop = Population::new(vec![mk("00", 1.0), mk("01", 3.0), mk("10", 3.0), mk("11", 2.0)])
            .unwrap();
        let (i, b) = pop.best().unwrap();
        assert_eq!(i, 1); // tie broken toward the lowest index
        assert_eq!(b.fitness(), Some(3.0));
        assert_eq!(pop.fittest_indices(3).unwrap(), vec![1, 2, 3]);
    }

    #[test]
    fn mixed_lengths_rejected() {
        let a = Individual::unevaluated(Bitstring::parse01("00").unwrap());
        let b = Individual::unevaluated(Bitstring::parse01("000").unwrap());
        assert!(Population::new(vec![a, b]).is_err());
    }
}
