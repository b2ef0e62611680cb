use std::fmt;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::covers::{CoverFamily, MEMBERSHIP_TOL};
use crate::error::Result;
use crate::quatcore::QMatrix;
use crate::stiefel::{sample_sp, sample_stiefel, StiefelFrame};

/// Samples per independent RNG stream. Chunk `c` draws from the ChaCha8
/// stream `c` under the run seed, so results do not depend on how chunks
/// are scheduled.
pub const CHUNK_SIZE: usize = 512;

/// A sample below the membership threshold is re-tested at
/// `tol * RETEST_FACTOR`; passing there marks it near-boundary rather than
/// uncovered.
pub const RETEST_FACTOR: f64 = 1e-3;

/// Uncovered frames kept in a report, lowest indices first.
pub const MAX_WITNESSES: usize = 16;

/// Where sample frames come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sampler {
    /// Haar `P in Sp(k)` embedded as `[0; P]`.
    SpEmbedded,
    /// Haar frames on the whole `X_{n,k}`.
    FullStiefel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Chunks on the rayon pool; sequential when built without the
    /// `parallel` feature.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// Configuration of a Monte Carlo cover check.
#[derive(Clone, Debug, PartialEq)]
pub struct CoverCheck {
    pub sampler: Sampler,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub execution: Execution,
    /// Also test the `2^k` sign-diagonal frames `[0; diag(+-1)]` (for
    /// `k <= 12`), the points where the explicit covers are tight.
    pub sign_probes: bool,
}

impl CoverCheck {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self {
            sampler: Sampler::SpEmbedded,
            samples,
            seed,
            tol: MEMBERSHIP_TOL,
            execution: Execution::default(),
            sign_probes: false,
        }
    }

    pub fn sampler(mut self, sampler: Sampler) -> Self {
        self.sampler = sampler;
        self
    }

    pub fn tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn sign_probes(mut self, on: bool) -> Self {
        self.sign_probes = on;
        self
    }

    pub fn run(&self, family: &CoverFamily) -> CoverReport {
        let mut tally = Tally::empty(family.len());
        let mut probes = 0;
        if self.sign_probes && family.k() <= 12 {
            let frames = sign_probe_frames(family.n(), family.k());
            probes = frames.len();
            for (i, f) in frames.into_iter().enumerate() {
                tally.record(family, i, true, f.p(), || f.clone(), self.tol);
            }
        }
        let chunks = self.samples.div_ceil(CHUNK_SIZE);
        let run_chunk = |c: usize| self.chunk(family, c, probes);
        let sampled = match self.execution {
            Execution::Sequential => (0..chunks)
                .map(run_chunk)
                .fold(Tally::empty(family.len()), Tally::merge),
            Execution::Parallel => parallel_chunks(chunks, family.len(), run_chunk),
        };
        tally = tally.merge(sampled);
        CoverReport {
            family: family.clone(),
            samples: self.samples,
            probes,
            seed: self.seed,
            tol: self.tol,
            uncovered: tally.uncovered,
            near_boundary: tally.near_boundary,
            min_best_margin: tally.min_best_margin,
            hits: tally.hits,
            witnesses: tally.witnesses,
        }
    }

    fn chunk(&self, family: &CoverFamily, c: usize, offset: usize) -> Tally {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(c as u64);
        let (n, k) = (family.n(), family.k());
        let start = c * CHUNK_SIZE;
        let end = (start + CHUNK_SIZE).min(self.samples);
        let mut tally = Tally::empty(family.len());
        for idx in start..end {
            let index = offset + idx;
            match self.sampler {
                Sampler::SpEmbedded => {
                    let p = sample_sp(k, &mut rng);
                    let frame = || {
                        StiefelFrame::from_blocks_unchecked(QMatrix::zeros(n - k, k), p.clone())
                            .expect("square block")
                    };
                    tally.record(family, index, false, &p, frame, self.tol);
                }
                Sampler::FullStiefel => {
                    let f = sample_stiefel(n, k, &mut rng).expect("k <= n");
                    tally.record(family, index, false, f.p(), || f.clone(), self.tol);
                }
            }
        }
        tally
    }
}

#[cfg(feature = "parallel")]
fn parallel_chunks(
    chunks: usize,
    sets: usize,
    run: impl Fn(usize) -> Tally + Sync + Send,
) -> Tally {
    use rayon::prelude::*;
    (0..chunks)
        .into_par_iter()
        .map(run)
        .reduce(|| Tally::empty(sets), Tally::merge)
}

#[cfg(not(feature = "parallel"))]
fn parallel_chunks(chunks: usize, sets: usize, run: impl Fn(usize) -> Tally) -> Tally {
    (0..chunks).map(run).fold(Tally::empty(sets), Tally::merge)
}

/// Haar check with the default execution and no probes.
pub fn verify_cover(
    family: &CoverFamily,
    sampler: Sampler,
    samples: usize,
    seed: u64,
    tol: f64,
) -> CoverReport {
    CoverCheck::new(samples, seed)
        .sampler(sampler)
        .tol(tol)
        .run(family)
}

/// Membership check on explicit frames.
pub fn verify_frames(
    family: &CoverFamily,
    frames: &[StiefelFrame],
    tol: f64,
) -> Result<CoverReport> {
    let mut tally = Tally::empty(family.len());
    for (i, f) in frames.iter().enumerate() {
        if f.n() != family.n() || f.k() != family.k() {
            return Err(crate::Error::DimensionMismatch(format!(
                "frame {i} lives in X_{{{},{}}}, family in X_{{{},{}}}",
                f.n(),
                f.k(),
                family.n(),
                family.k()
            )));
        }
        tally.record(family, i, true, f.p(), || f.clone(), tol);
    }
    Ok(CoverReport {
        family: family.clone(),
        samples: 0,
        probes: frames.len(),
        seed: 0,
        tol,
        uncovered: tally.uncovered,
        near_boundary: tally.near_boundary,
        min_best_margin: tally.min_best_margin,
        hits: tally.hits,
        witnesses: tally.witnesses,
    })
}

fn sign_probe_frames(n: usize, k: usize) -> Vec<StiefelFrame> {
    (0..1usize << k)
        .map(|bits| {
            let d: Vec<f64> = (0..k)
                .map(|t| {
                    if (bits >> (k - 1 - t)) & 1 == 0 {
                        1.0
                    } else {
                        -1.0
                    }
                })
                .collect();
            StiefelFrame::from_blocks_unchecked(QMatrix::zeros(n - k, k), QMatrix::diag_real(&d))
                .expect("square block")
        })
        .collect()
}

/// A frame outside every set of the family.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    /// Probes are numbered first, then random samples.
    pub index: usize,
    pub probe: bool,
    pub frame: StiefelFrame,
    /// Membership margin against each set, in family order.
    pub margins: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoverReport {
    pub family: CoverFamily,
    /// Random samples drawn.
    pub samples: usize,
    /// Deterministic frames checked in addition to the samples.
    pub probes: usize,
    pub seed: u64,
    pub tol: f64,
    /// Frames in no set of the family.
    pub uncovered: usize,
    /// Frames that passed only at the re-test tolerance.
    pub near_boundary: usize,
    /// Minimum over frames of the best margin across the family.
    pub min_best_margin: f64,
    /// Frames found in each set.
    pub hits: Vec<usize>,
    /// Uncovered frames with the lowest indices, at most [`MAX_WITNESSES`].
    pub witnesses: Vec<Witness>,
}

impl CoverReport {
    /// First uncovered frame.
    pub fn witness(&self) -> Option<&Witness> {
        self.witnesses.first()
    }

    pub fn covered(&self) -> bool {
        self.uncovered == 0
    }

    pub fn checked(&self) -> usize {
        self.samples + self.probes
    }
}

impl fmt::Display for CoverReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (n, k) = (self.family.n(), self.family.k());
        writeln!(
            f,
            "family on X_{{{n},{k}}} with {} set(s):",
            self.family.len()
        )?;
        for (s, hits) in self.family.sets().iter().zip(&self.hits) {
            writeln!(f, "  {:<24} contains {hits} frame(s)", s.label())?;
        }
        writeln!(
            f,
            "checked {} frame(s): {} Haar sample(s) (seed {}), {} probe(s); tol {:e}",
            self.checked(),
            self.samples,
            self.seed,
            self.probes,
            self.tol
        )?;
        writeln!(f, "min best margin: {:e}", self.min_best_margin)?;
        if self.near_boundary > 0 {
            writeln!(
                f,
                "near-boundary frames (passed re-test): {}",
                self.near_boundary
            )?;
        }
        if self.covered() {
            write!(
                f,
                "result: no counterexample in {} frame(s) (sampling cannot prove a cover)",
                self.checked()
            )
        } else {
            write!(f, "result: {} uncovered frame(s)", self.uncovered)?;
            if let Some(w) = self.witness() {
                let kind = if w.probe { "probe" } else { "sample" };
                write!(
                    f,
                    "; first witness is {kind} #{}, P block:\n{}",
                    w.index,
                    w.frame.p()
                )?;
            }
            Ok(())
        }
    }
}

#[derive(Clone, Debug)]
struct Tally {
    uncovered: usize,
    near_boundary: usize,
    min_best_margin: f64,
    hits: Vec<usize>,
    witnesses: Vec<Witness>,
}

impl Tally {
    fn empty(sets: usize) -> Self {
        Self {
            uncovered: 0,
            near_boundary: 0,
            min_best_margin: f64::INFINITY,
            hits: vec![0; sets],
            witnesses: Vec::new(),
        }
    }

    fn record(
        &mut self,
        family: &CoverFamily,
        index: usize,
        probe: bool,
        pi: &QMatrix,
        frame: impl FnOnce() -> StiefelFrame,
        tol: f64,
    ) {
        let margins: Vec<f64> = family
            .sets()
            .iter()
            .map(|s| s.margin_of_block(pi, tol).margin)
            .collect();
        let mut best = 0.0f64;
        for (h, &m) in self.hits.iter_mut().zip(&margins) {
            if m > tol {
                *h += 1;
            }
            best = best.max(m);
        }
        self.min_best_margin = self.min_best_margin.min(best);
        if best > tol {
            return;
        }
        if best > tol * RETEST_FACTOR {
            self.near_boundary += 1;
            return;
        }
        self.uncovered += 1;
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(Witness {
                index,
                probe,
                frame: frame(),
                margins,
            });
        }
    }

    /// Associative; witnesses with the smallest indices survive.
    fn merge(mut self, other: Tally) -> Tally {
        self.uncovered += other.uncovered;
        self.near_boundary += other.near_boundary;
        self.min_best_margin = self.min_best_margin.min(other.min_best_margin);
        for (a, b) in self.hits.iter_mut().zip(&other.hits) {
            *a += b;
        }
        self.witnesses.extend(other.witnesses);
        self.witnesses.sort_by_key(|w| w.index);
        self.witnesses.truncate(MAX_WITNESSES);
        self
    }
}
