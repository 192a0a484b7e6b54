//! Seeded Erdős–Rényi and Vietoris–Rips edge orders.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::flagfilt::{lex_edges, Edge, EdgeOrder};

/// Filtration model of an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Er,
    Vr { dim: usize },
    Worst,
}

impl Model {
    pub fn tag(&self) -> String {
        match self {
            Model::Er => "er".into(),
            Model::Vr { dim } => format!("vr{dim}"),
            Model::Worst => "worst".into(),
        }
    }

    /// Parses `er`, `vr` (with `dim`), `worst`, or a tag such as `vr2`.
    pub fn parse(name: &str, dim: Option<usize>) -> Result<Self> {
        match name {
            "er" => Ok(Model::Er),
            "worst" => Ok(Model::Worst),
            "vr" => match dim {
                Some(d) if d >= 1 => Ok(Model::Vr { dim: d }),
                _ => Err(Error::Config("vr needs --dim >= 1".into())),
            },
            _ => match name.strip_prefix("vr").and_then(|d| d.parse().ok()) {
                Some(d) if d >= 1 => Ok(Model::Vr { dim: d }),
                _ => Err(Error::Config(format!("unknown model {name:?}"))),
            },
        }
    }
}

/// Draws the edge order of trial `trial` for a random model.
pub fn sample_order(model: Model, n: usize, seed: Seed, purpose: &str, trial: u64) -> Result<EdgeOrder> {
    if n < 2 {
        return Err(Error::Config(format!("need at least two vertices, got {n}")));
    }
    match model {
        Model::Er => Ok(er_order(n, &mut seed.rng(&format!("{purpose}/er/{n}"), trial))),
        Model::Vr { dim } => Ok(sample_vr(n, dim, seed, purpose, trial)?.order),
        Model::Worst => Err(Error::Config("the worst-case model is not sampled".into())),
    }
}

/// Same stream as [`sample_order`] for `Model::Vr`, keeping the points and
/// edge lengths.
pub fn sample_vr(n: usize, dim: usize, seed: Seed, purpose: &str, trial: u64) -> Result<VrSample> {
    if n < 2 || dim == 0 {
        return Err(Error::Config(format!("vr needs n >= 2 and dim >= 1, got n={n} dim={dim}")));
    }
    let mut rng = seed.rng(&format!("{purpose}/vr{dim}/{n}"), trial);
    Ok(vr_order(n, dim, &mut rng))
}

/// Root seed of an experiment. Streams are derived from the root together
/// with a purpose tag and a trial index, so the stream a trial sees does not
/// depend on which thread runs it or in what order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Seed {
    pub root: u64,
}

impl Seed {
    pub fn new(root: u64) -> Self {
        Seed { root }
    }

    pub fn rng(&self, purpose: &str, trial: u64) -> ChaCha8Rng {
        let mut state = self.root ^ 0x6a09_e667_f3bc_c908;
        let mut absorb = |x: u64| {
            state = splitmix64(state ^ x);
        };
        for chunk in purpose.as_bytes().chunks(8) {
            let mut buf = [0u8; 8];
            buf[..chunk.len()].copy_from_slice(chunk);
            absorb(u64::from_le_bytes(buf));
        }
        absorb(purpose.len() as u64);
        absorb(trial);
        let mut key = [0u8; 32];
        for word in key.chunks_mut(8) {
            state = splitmix64(state);
            word.copy_from_slice(&state.to_le_bytes());
        }
        ChaCha8Rng::from_seed(key)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniformly random order of all edges (Fisher–Yates).
pub fn er_order<R: Rng + ?Sized>(n: usize, rng: &mut R) -> EdgeOrder {
    assert!(n >= 2, "need at least two vertices");
    let mut edges = lex_edges(n);
    edges.shuffle(rng);
    EdgeOrder::new(n, edges).expect("shuffled edges form a permutation")
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    /// Points given row-wise; every coordinate must lie in `[0,1]`.
    pub fn new(dim: usize, points: Vec<Vec<f64>>) -> Option<Self> {
        if dim == 0 || points.is_empty() {
            return None;
        }
        let mut coords = Vec::with_capacity(dim * points.len());
        for p in points {
            if p.len() != dim || p.iter().any(|x| !(0.0..=1.0).contains(x)) {
                return None;
            }
            coords.extend(p);
        }
        Some(PointCloud { dim, coords })
    }

    pub fn uniform<R: Rng + ?Sized>(n: usize, dim: usize, rng: &mut R) -> Self {
        let coords = (0..n * dim).map(|_| rng.gen::<f64>()).collect();
        PointCloud { dim, coords }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn sq_dist(&self, i: usize, j: usize) -> f64 {
        self.point(i)
            .iter()
            .zip(self.point(j))
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VrSample {
    pub points: PointCloud,
    pub order: EdgeOrder,
    /// Euclidean length of the edge at each rank.
    pub lengths: Vec<f64>,
}

/// Edges of `n` uniform points in `[0,1]^dim`, sorted by length.
pub fn vr_order<R: Rng + ?Sized>(n: usize, dim: usize, rng: &mut R) -> VrSample {
    assert!(n >= 2 && dim >= 1, "need n >= 2 and dim >= 1");
    vr_order_from_points(PointCloud::uniform(n, dim, rng))
}

/// Orders the edges of a given point cloud by increasing length, breaking
/// exact ties lexicographically on `(u, v)`.
pub fn vr_order_from_points(points: PointCloud) -> VrSample {
    let n = points.len();
    let mut keyed: Vec<(f64, Edge)> = lex_edges(n)
        .into_iter()
        .map(|(u, v)| (points.sq_dist(u as usize, v as usize), (u, v)))
        .collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let lengths = keyed.iter().map(|(d, _)| d.sqrt()).collect();
    let edges = keyed.into_iter().map(|(_, e)| e).collect();
    VrSample {
        order: EdgeOrder::new(n, edges).expect("sorted edges form a permutation"),
        points,
        lengths,
    }
}
