//! Randomized cross-validation: closed form against the LP oracle, and
//! reconstruction against membership.
//!
//! Sampling covers three regimes per patch: ambient wrenches drawn from
//! a box around the cone (members and non-members), corner forces drawn
//! from the friction pyramids (guaranteed members), and sparse conic
//! combinations of span rays (members on or near low-dimensional
//! faces). Samples whose normalized margin falls inside the boundary
//! band are skipped in comparisons; the two routes legitimately round
//! differently at facets.
//!
//! Sample generation is sequential from a seeded generator and the
//! per-sample work is embarrassingly parallel, so reports are
//! bit-identical for a fixed config with and without the `parallel`
//! feature.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::cone::{check_wrench, FaceForm};
use crate::contact::{compose_wrench, ContactForceSet, ContactPatch, Wrench};
use crate::error::Error;
use crate::polytope::{cwc_span, membership_lp, SpanForm};
use crate::reconstruct::reconstruct_forces;

/// Patch grid and sampling controls for [`run`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationConfig {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub mus: Vec<f64>,
    /// Membership samples per patch.
    pub samples_per_patch: usize,
    /// Member and non-member wrenches fed to the reconstruction
    /// round-trip per patch.
    pub reconstruction_samples: usize,
    pub seed: u64,
    /// Normalized boundary band; samples with `|margin|` at or below it
    /// are not compared.
    pub boundary_epsilon: f64,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        Self {
            xs: vec![0.05, 0.1, 0.3],
            ys: vec![0.05, 0.1, 0.3],
            mus: vec![0.1, 0.5, 1.0],
            samples_per_patch: 10_000,
            reconstruction_samples: 1_000,
            seed: 0,
            boundary_epsilon: 1e-7,
        }
    }
}

/// The band inside which the closed form and the LP oracle are allowed
/// to round a facet verdict differently.
pub const DEFAULT_BOUNDARY_EPSILON: f64 = 1e-7;

impl ValidationConfig {
    pub fn patches(&self) -> Result<Vec<ContactPatch>, Error> {
        let mut out = Vec::new();
        for &x in &self.xs {
            for &y in &self.ys {
                for &mu in &self.mus {
                    out.push(ContactPatch::new(x, y, mu)?);
                }
            }
        }
        Ok(out)
    }
}

/// Per-patch outcome of the validation suites.
#[derive(Debug, Clone, PartialEq)]
pub struct PatchReport {
    pub x: f64,
    pub y: f64,
    pub mu: f64,
    pub samples: usize,
    pub boundary_skipped: usize,
    /// Closed-form members among the compared samples.
    pub members: usize,
    /// Closed-form vs LP verdict mismatches among compared samples.
    pub disagreements: usize,
    /// Subset of the disagreements lying within
    /// [`DEFAULT_BOUNDARY_EPSILON`] of the boundary; only relevant when
    /// the configured band is smaller than the default.
    pub near_boundary_disagreements: usize,
    pub reconstruction_members: usize,
    pub reconstruction_rejections: usize,
    /// Reconstruction outcomes contradicting the membership verdict.
    pub reconstruction_contradictions: usize,
    pub elapsed: Duration,
}

impl PatchReport {
    pub fn pass(&self) -> bool {
        self.disagreements == 0 && self.reconstruction_contradictions == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub patches: Vec<PatchReport>,
    pub elapsed: Duration,
}

impl ValidationReport {
    pub fn total_disagreements(&self) -> usize {
        self.patches.iter().map(|p| p.disagreements).sum()
    }

    pub fn total_contradictions(&self) -> usize {
        self.patches
            .iter()
            .map(|p| p.reconstruction_contradictions)
            .sum()
    }

    pub fn pass(&self) -> bool {
        self.patches.iter().all(PatchReport::pass)
    }
}

fn range_or_zero(rng: &mut ChaCha8Rng, bound: f64) -> f64 {
    if bound > 0.0 {
        rng.random_range(-bound..bound)
    } else {
        0.0
    }
}

/// Draws `n` wrenches: even indices ambient, the rest alternating
/// between pyramid corner forces and sparse ray combinations.
pub fn sample_wrenches(
    patch: &ContactPatch,
    span: &SpanForm,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Wrench> {
    let (x, y, mu) = (patch.x(), patch.y(), patch.mu());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let w = if i % 2 == 0 {
            Wrench::new(
                range_or_zero(rng, 1.5 * mu.max(0.1)),
                range_or_zero(rng, 1.5 * mu.max(0.1)),
                rng.random_range(-0.25..1.0),
                range_or_zero(rng, 1.5 * y),
                range_or_zero(rng, 1.5 * x),
                range_or_zero(rng, (1.5 * mu * (x + y)).max(0.1)),
            )
            .expect("finite sample")
        } else if i % 4 == 1 {
            let mut forces = ContactForceSet::zero();
            for f in forces.forces.iter_mut() {
                let fz = rng.random_range(0.0..1.0);
                *f = nalgebra::Vector3::new(
                    range_or_zero(rng, mu * fz),
                    range_or_zero(rng, mu * fz),
                    fz,
                );
            }
            compose_wrench(patch, &forces)
        } else {
            let count = rng.random_range(1..=span.len().min(6));
            let mut v = nalgebra::Vector6::zeros();
            for _ in 0..count {
                let ray = span.rays()[rng.random_range(0..span.len())];
                v += ray * rng.random_range(0.1..1.0);
            }
            Wrench::from_vector(&v).expect("finite sample")
        };
        out.push(w);
    }
    out
}

fn map_samples<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Closed-form membership over a batch (parallel when the feature is
/// enabled).
pub fn batch_closed_form(face: &FaceForm, wrenches: &[Wrench]) -> Vec<bool> {
    map_samples(wrenches, |w| face.contains(w))
}

/// Sequential twin of [`batch_closed_form`], kept available for
/// benchmarking the parallel speedup.
pub fn batch_closed_form_seq(face: &FaceForm, wrenches: &[Wrench]) -> Vec<bool> {
    wrenches.iter().map(|w| face.contains(w)).collect()
}

/// LP membership over a batch (parallel when the feature is enabled).
pub fn batch_lp(span: &SpanForm, wrenches: &[Wrench]) -> Result<Vec<bool>, Error> {
    map_samples(wrenches, |w| membership_lp(span, w))
        .into_iter()
        .collect()
}

/// Sequential twin of [`batch_lp`].
pub fn batch_lp_seq(span: &SpanForm, wrenches: &[Wrench]) -> Result<Vec<bool>, Error> {
    wrenches.iter().map(|w| membership_lp(span, w)).collect()
}

struct SampleVerdict {
    margin: f64,
    closed_form: bool,
    lp: bool,
}

fn patch_rng(seed: u64, index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add((index as u64 + 1).wrapping_mul(0x9E3779B97F4A7C15)))
}

/// Runs the oracle-agreement and reconstruction suites for one patch.
pub fn validate_patch(
    patch: &ContactPatch,
    samples_per_patch: usize,
    reconstruction_samples: usize,
    boundary_epsilon: f64,
    rng: &mut ChaCha8Rng,
) -> Result<PatchReport, Error> {
    let start = Instant::now();
    let span = cwc_span(patch);
    let samples = sample_wrenches(patch, &span, samples_per_patch, rng);

    let verdicts: Vec<Result<SampleVerdict, Error>> = map_samples(&samples, |w| {
        let report = check_wrench(patch, w);
        let lp = membership_lp(&span, w)?;
        Ok(SampleVerdict {
            margin: report.max_margin(),
            closed_form: report.member,
            lp,
        })
    });

    let mut boundary_skipped = 0;
    let mut members = 0;
    let mut disagreements = 0;
    let mut near_boundary_disagreements = 0;
    let mut member_candidates = Vec::new();
    let mut rejected_candidates = Vec::new();
    for (verdict, w) in verdicts.into_iter().zip(&samples) {
        let v = verdict?;
        if v.margin.abs() <= boundary_epsilon {
            boundary_skipped += 1;
            continue;
        }
        if v.closed_form {
            members += 1;
            if member_candidates.len() < reconstruction_samples {
                member_candidates.push(*w);
            }
        } else if rejected_candidates.len() < reconstruction_samples {
            rejected_candidates.push(*w);
        }
        if v.closed_form != v.lp {
            disagreements += 1;
            if v.margin.abs() <= DEFAULT_BOUNDARY_EPSILON {
                near_boundary_disagreements += 1;
            }
        }
    }

    let member_ok: Vec<Result<bool, Error>> = map_samples(&member_candidates, |w| {
        match reconstruct_forces(patch, w) {
            Ok(forces) => {
                let residual = (compose_wrench(patch, &forces).as_vector() - w.as_vector()).amax()
                    / w.amplitude().max(1.0);
                let tol = 1e-9 * w.amplitude().max(1.0);
                Ok(residual <= 1e-9 && forces.friction_feasible(patch.mu(), tol))
            }
            Err(Error::Infeasible) => Ok(false),
            Err(e) => Err(e),
        }
    });
    let rejected_ok: Vec<Result<bool, Error>> =
        map_samples(&rejected_candidates, |w| match reconstruct_forces(patch, w) {
            Ok(_) => Ok(false),
            Err(Error::Infeasible) => Ok(true),
            Err(e) => Err(e),
        });

    let mut contradictions = 0;
    for ok in member_ok.into_iter().chain(rejected_ok) {
        if !ok? {
            contradictions += 1;
        }
    }

    Ok(PatchReport {
        x: patch.x(),
        y: patch.y(),
        mu: patch.mu(),
        samples: samples_per_patch,
        boundary_skipped,
        members,
        disagreements,
        near_boundary_disagreements,
        reconstruction_members: member_candidates.len(),
        reconstruction_rejections: rejected_candidates.len(),
        reconstruction_contradictions: contradictions,
        elapsed: start.elapsed(),
    })
}

/// Runs the full validation grid.
pub fn run(config: &ValidationConfig) -> Result<ValidationReport, Error> {
    let start = Instant::now();
    let mut patches = Vec::new();
    for (index, patch) in config.patches()?.iter().enumerate() {
        let mut rng = patch_rng(config.seed, index);
        patches.push(validate_patch(
            patch,
            config.samples_per_patch,
            config.reconstruction_samples,
            config.boundary_epsilon,
            &mut rng,
        )?);
    }
    Ok(ValidationReport {
        patches,
        elapsed: start.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> ValidationConfig {
        ValidationConfig {
            xs: vec![0.1, 0.3],
            ys: vec![0.1],
            mus: vec![0.5, 1.0],
            samples_per_patch: 400,
            reconstruction_samples: 40,
            seed: 42,
            boundary_epsilon: 1e-7,
        }
    }

    #[test]
    fn small_grid_passes_clean() {
        let report = run(&small_config()).unwrap();
        assert_eq!(report.patches.len(), 4);
        assert_eq!(report.total_disagreements(), 0);
        assert_eq!(report.total_contradictions(), 0);
        assert!(report.pass());
        for p in &report.patches {
            assert!(p.members > 0, "sampling produced no members");
            assert!(p.members < p.samples, "sampling produced no outsiders");
        }
    }

    #[test]
    fn fixed_seed_is_deterministic() {
        let a = run(&small_config()).unwrap();
        let b = run(&small_config()).unwrap();
        for (pa, pb) in a.patches.iter().zip(&b.patches) {
            assert_eq!(pa.members, pb.members);
            assert_eq!(pa.boundary_skipped, pb.boundary_skipped);
            assert_eq!(pa.disagreements, pb.disagreements);
            assert_eq!(
                pa.reconstruction_contradictions,
                pb.reconstruction_contradictions
            );
        }
    }

    #[test]
    fn sampling_is_deterministic_and_mixed() {
        let patch = ContactPatch::new(0.1, 0.2, 0.5).unwrap();
        let span = cwc_span(&patch);
        let mut rng_a = patch_rng(7, 0);
        let mut rng_b = patch_rng(7, 0);
        let a = sample_wrenches(&patch, &span, 200, &mut rng_a);
        let b = sample_wrenches(&patch, &span, 200, &mut rng_b);
        assert_eq!(a, b);
        let members = a
            .iter()
            .filter(|w| check_wrench(&patch, w).member)
            .count();
        assert!(members > 50 && members < 200);
    }

    #[test]
    fn batch_helpers_agree_with_scalar_calls() {
        let patch = ContactPatch::new(0.1, 0.2, 0.5).unwrap();
        let face = crate::cone::face_form(&patch).unwrap();
        let span = cwc_span(&patch);
        let mut rng = patch_rng(3, 1);
        let samples = sample_wrenches(&patch, &span, 100, &mut rng);
        let cf = batch_closed_form(&face, &samples);
        let cf_seq = batch_closed_form_seq(&face, &samples);
        assert_eq!(cf, cf_seq);
        let lp = batch_lp(&span, &samples).unwrap();
        let lp_seq = batch_lp_seq(&span, &samples).unwrap();
        assert_eq!(lp, lp_seq);
    }
}
