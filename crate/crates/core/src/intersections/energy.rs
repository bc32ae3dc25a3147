//! Discrete curvature and minimal-bending pairing of generated ends.

use serde::Serialize;

use crate::raster::Px;

/// Unit direction vector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tangent {
    x: f64,
    y: f64,
}

impl Tangent {
    /// Normalizes `(x, y)`; `None` for a zero vector.
    pub fn new(x: f64, y: f64) -> Option<Self> {
        let n = x.hypot(y);
        (n > 0.0 && n.is_finite()).then(|| Self { x: x / n, y: y / n })
    }

    /// Direction from `a` to `b`.
    pub fn between(a: Px, b: Px) -> Option<Self> {
        Self::new(f64::from(b.x - a.x), f64::from(b.y - a.y))
    }

    pub fn x(self) -> f64 {
        self.x
    }

    pub fn y(self) -> f64 {
        self.y
    }

    pub fn reversed(self) -> Self {
        Self { x: -self.x, y: -self.y }
    }

    pub fn dot(self, o: Self) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Self) -> f64 {
        self.x * o.y - self.y * o.x
    }
}

/// Below this, tangents count as antiparallel.
pub const ANTIPARALLEL_GUARD: f64 = 1e-9;

/// `|2 (t × t') / (1 + t · t')|`, or `+inf` for antiparallel tangents.
pub fn discrete_curvature(t_in: Tangent, t_out: Tangent) -> f64 {
    let denom = 1.0 + t_in.dot(t_out);
    if denom <= ANTIPARALLEL_GUARD {
        return f64::INFINITY;
    }
    (2.0 * t_in.cross(t_out) / denom).abs()
}

/// Curvature of the path `a -> center -> b`. Degenerate geometry (an end on
/// the center) counts as infinitely bent.
pub fn pass_curvature(center: Px, a: Px, b: Px) -> f64 {
    match (Tangent::between(a, center), Tangent::between(center, b)) {
        (Some(t1), Some(t2)) => discrete_curvature(t1, t2),
        _ => f64::INFINITY,
    }
}

/// The three perfect matchings of four ends, in lexicographic order.
pub const MATCHINGS: [[(usize, usize); 2]; 3] = [[(0, 1), (2, 3)], [(0, 2), (1, 3)], [(0, 3), (1, 2)]];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatchingEnergy {
    /// Index pairs into the end list.
    pub pairs: Vec<(usize, usize)>,
    /// Curvature norm of each pair, in the same order.
    pub curvatures: Vec<f64>,
    /// Sum of the finite curvatures.
    pub total: f64,
    pub infinite_pairs: usize,
    /// Sum of end-to-end distances over the pairs.
    pub span: f64,
}

impl MatchingEnergy {
    fn evaluate(center: Px, ends: &[Px], pairs: &[(usize, usize)]) -> Self {
        let curvatures: Vec<f64> = pairs
            .iter()
            .map(|&(a, b)| pass_curvature(center, ends[a], ends[b]))
            .collect();
        let infinite_pairs = curvatures.iter().filter(|c| c.is_infinite()).count();
        let total = curvatures.iter().filter(|c| c.is_finite()).sum();
        let span = pairs.iter().map(|&(a, b)| ends[a].dist(ends[b])).sum();
        Self {
            pairs: pairs.to_vec(),
            curvatures,
            total,
            infinite_pairs,
            span,
        }
    }
}

/// Floating-point slack when deciding two energies are tied.
const TIE_EPS: f64 = 1e-9;

fn lt_with_ties(a: f64, b: f64) -> Option<bool> {
    if (a - b).abs() <= TIE_EPS {
        None
    } else {
        Some(a < b)
    }
}

/// True if `cand` beats `best`. Matchings with no infinite pair compete on
/// total curvature; otherwise on the number of infinite pairs. Remaining
/// ties go to the smaller span and then to the earlier matching.
fn better(cand: &MatchingEnergy, best: &MatchingEnergy) -> bool {
    if cand.infinite_pairs != best.infinite_pairs {
        return cand.infinite_pairs < best.infinite_pairs;
    }
    if cand.infinite_pairs == 0 {
        if let Some(lt) = lt_with_ties(cand.total, best.total) {
            return lt;
        }
    }
    lt_with_ties(cand.span, best.span).unwrap_or(false)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Pairing {
    /// Index into `candidates` of the chosen matching.
    pub chosen: usize,
    pub candidates: Vec<MatchingEnergy>,
}

impl Pairing {
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.candidates[self.chosen].pairs
    }

    pub fn total(&self) -> f64 {
        self.candidates[self.chosen].total
    }
}

fn pick(candidates: Vec<MatchingEnergy>) -> Pairing {
    let mut chosen = 0;
    for i in 1..candidates.len() {
        if better(&candidates[i], &candidates[chosen]) {
            chosen = i;
        }
    }
    Pairing { chosen, candidates }
}

/// Minimal-bending pairing of four ends (sorted) around `center`; with three
/// ends, the best single pair, leaving the third end to stop at the center.
/// Two ends form the only possible pair.
pub fn pair_ends_min_energy(center: Px, ends: &[Px]) -> Pairing {
    let candidates = match ends.len() {
        4 => MATCHINGS
            .iter()
            .map(|m| MatchingEnergy::evaluate(center, ends, m))
            .collect(),
        3 => [(0, 1), (0, 2), (1, 2)]
            .iter()
            .map(|&p| MatchingEnergy::evaluate(center, ends, &[p]))
            .collect(),
        2 => vec![MatchingEnergy::evaluate(center, ends, &[(0, 1)])],
        n => panic!("pairing needs 2 to 4 ends, got {n}"),
    };
    pick(candidates)
}
