use std::collections::{HashMap, HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::curve::{edge_link_curves, is_peripheral, trace_components, MulticurveCoords};
use super::{edge_of, Result, SurfaceError, Triangulation};

pub const DEFAULT_MOVE_BUDGET: u64 = 10_000_000;

/// Plateau searches give up after visiting this many states. The first
/// stage has a fallback and gives up much sooner.
const PLATEAU_STATES: usize = 200_000;
const FIRST_STAGE_STATES: usize = 2_000;

/// How far a single class may climb to get round a local minimum.
const MAX_SLACK: u64 = 8;

/// One isotopy class of a short multicurve, parallel to `edge`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShortComponent {
    pub edge: usize,
    pub multiplicity: u64,
    pub curve: MulticurveCoords,
}

/// A multicurve on a triangulation in which every component is parallel to
/// an edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShortForm {
    pub triangulation: Triangulation,
    pub coords: MulticurveCoords,
    pub components: Vec<ShortComponent>,
}

impl ShortForm {
    /// Number of components counted with multiplicity.
    pub fn num_components(&self) -> u64 {
        self.components.iter().map(|c| c.multiplicity).sum()
    }

    /// No two components are isotopic.
    pub fn is_primitive(&self) -> bool {
        self.components.iter().all(|c| c.multiplicity == 1)
    }
}

#[derive(Debug, Clone)]
pub struct ShortenOptions {
    pub move_budget: u64,
    /// Break ties between equally good flips at random instead of by lowest
    /// edge label.
    pub tie_break_seed: Option<u64>,
}

impl Default for ShortenOptions {
    fn default() -> Self {
        ShortenOptions {
            move_budget: DEFAULT_MOVE_BUDGET,
            tie_break_seed: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Shortening {
    pub short_form: ShortForm,
    /// Edges flipped, in order.
    pub moves: Vec<usize>,
    /// Total weight before the first move and after each move.
    pub weights: Vec<u64>,
}

/// Weight of the new diagonal after flipping `e`.
pub(crate) fn flipped_weight(t: &Triangulation, c: &[u64], e: usize) -> Result<u64> {
    let ([_, a, b], [_, cc, d]) = t.square(e)?;
    let w = |s: usize| c[edge_of(s)];
    (w(a) + w(cc))
        .max(w(b) + w(d))
        .checked_sub(c[e])
        .ok_or_else(|| SurfaceError::InvalidCoords(format!("edge {e} is heavier than its square allows")))
}

/// Decompose `coords` into curves parallel to edges, if it is short.
pub fn detect_short(t: &Triangulation, coords: &MulticurveCoords) -> Option<ShortForm> {
    if coords.validate(t).is_err() {
        return None;
    }
    let mut classes: Vec<(MulticurveCoords, u64)> = Vec::new();
    for comp in trace_components(t, coords).ok()? {
        match classes.iter_mut().find(|(c, _)| *c == comp) {
            Some((_, m)) => *m += 1,
            None => classes.push((comp, 1)),
        }
    }
    let mut links: HashMap<usize, Vec<MulticurveCoords>> = HashMap::new();
    let mut components = Vec::with_capacity(classes.len());
    for (curve, multiplicity) in classes {
        if is_peripheral(t, &curve) {
            return None;
        }
        let edge = (0..t.num_edges()).find(|&e| {
            curve.weights()[e] == 0
                && links
                    .entry(e)
                    .or_insert_with(|| edge_link_curves(t, e).unwrap_or_default())
                    .contains(&curve)
        })?;
        components.push(ShortComponent {
            edge,
            multiplicity,
            curve,
        });
    }
    Some(ShortForm {
        triangulation: t.clone(),
        coords: coords.clone(),
        components,
    })
}

pub fn shorten(t: &Triangulation, coords: &MulticurveCoords) -> Result<Shortening> {
    shorten_with(t, coords, &ShortenOptions::default())
}

fn deltas(t: &Triangulation, c: &[u64]) -> Vec<(usize, i64)> {
    (0..t.num_edges())
        .filter(|&e| t.is_flippable(e))
        .filter_map(|e| flipped_weight(t, c, e).ok().map(|w| (e, w as i64 - c[e] as i64)))
        .collect()
}

struct Walk<'a> {
    tri: Triangulation,
    coords: MulticurveCoords,
    moves: Vec<usize>,
    weights: Vec<u64>,
    spent: u64,
    opts: &'a ShortenOptions,
    rng: Option<ChaCha8Rng>,
}

impl Walk<'_> {
    fn apply(&mut self, e: usize, driver: &mut MulticurveCoords) -> Result<()> {
        let (nt, nc) = self.tri.flip(e, &self.coords)?;
        *driver = self.tri.flip(e, driver)?.1;
        self.tri = nt;
        self.coords = nc;
        self.moves.push(e);
        self.weights.push(self.coords.total_weight());
        Ok(())
    }

    /// Flip until `driver` is short, greedily in its total weight. Returns
    /// false if stuck.
    fn descend(&mut self, driver: &mut MulticurveCoords, max_slack: u64, max_states: usize) -> Result<bool> {
        loop {
            if driver.weights().contains(&0) && detect_short(&self.tri, driver).is_some() {
                return Ok(true);
            }
            if self.spent >= self.opts.move_budget {
                return Err(SurfaceError::BudgetExhausted { moves: self.spent });
            }
            let d = deltas(&self.tri, driver.weights());
            let best = d.iter().map(|&(_, x)| x).min().unwrap_or(0);
            if best < 0 {
                let ties: Vec<usize> = d.iter().filter(|&&(_, x)| x == best).map(|&(e, _)| e).collect();
                let e = match self.rng.as_mut() {
                    Some(r) => *ties.choose(r).unwrap_or(&ties[0]),
                    None => ties[0],
                };
                self.apply(e, driver)?;
                self.spent += 1;
                continue;
            }
            let mut found = None;
            let mut slack = 0;
            while found.is_none() && slack <= max_slack {
                let remaining = self.opts.move_budget.saturating_sub(self.spent);
                let (path, cost) = plateau_exit(&self.tri, driver, slack, remaining, max_states)?;
                self.spent += cost;
                found = path;
                slack += 2;
            }
            let Some(path) = found else {
                return Ok(false);
            };
            for e in path {
                self.apply(e, driver)?;
            }
        }
    }
}

/// Flip edges greedily, always taking the largest strict weight decrease,
/// until the multicurve is short. When no flip decreases the weight, search
/// the weight-preserving flips for a way off the plateau.
///
/// Many parallel copies of one short curve can pin the total weight at a
/// local minimum. If that happens the classes are shortened one at a time
/// instead, keeping each finished class parallel to its edge by never
/// flipping that edge again. The total weight may rise during this stage.
pub fn shorten_with(t: &Triangulation, coords: &MulticurveCoords, opts: &ShortenOptions) -> Result<Shortening> {
    coords.validate(t)?;
    let mut walk = Walk {
        tri: t.clone(),
        coords: coords.clone(),
        moves: Vec::new(),
        weights: vec![coords.total_weight()],
        spent: 0,
        opts,
        rng: opts.tie_break_seed.map(ChaCha8Rng::seed_from_u64),
    };
    let mut driver = coords.clone();
    if !walk.descend(&mut driver, 0, FIRST_STAGE_STATES)? {
        let mut classes = trace_components(&walk.tri, &walk.coords)?;
        classes.sort();
        classes.dedup();
        let mut support = classes[0].clone();
        for k in &classes[1..] {
            support = support.add(k);
        }
        if !walk.descend(&mut support, MAX_SLACK, PLATEAU_STATES)? {
            return Err(SurfaceError::BudgetExhausted { moves: walk.spent });
        }
    }
    let short_form = detect_short(&walk.tri, &walk.coords)
        .ok_or_else(|| SurfaceError::InvalidCoords("classes are short but their union is not".into()))?;
    Ok(Shortening {
        short_form,
        moves: walk.moves,
        weights: walk.weights,
    })
}

/// Breadth-first search over flips that keep the weight at most `slack`
/// above its starting value, for a state that is short or strictly lighter
/// than the start. Returns the path, if found, and the number of states
/// expanded.
fn plateau_exit(
    t: &Triangulation,
    c: &MulticurveCoords,
    slack: u64,
    budget: u64,
    max_states: usize,
) -> Result<(Option<Vec<usize>>, u64)> {
    type State = (Triangulation, MulticurveCoords, Option<(usize, usize)>);
    let start = c.total_weight();
    let mut seen: HashSet<(Vec<[usize; 3]>, MulticurveCoords)> = HashSet::new();
    let mut states: Vec<State> = Vec::new();
    let mut queue = VecDeque::new();
    seen.insert((t.triangles().to_vec(), c.clone()));
    states.push((t.clone(), c.clone(), None));
    queue.push_back(0usize);
    let mut cost = 0u64;
    let path_to = |states: &Vec<State>, mut i: usize| {
        let mut path = Vec::new();
        while let Some((parent, e)) = states[i].2 {
            path.push(e);
            i = parent;
        }
        path.reverse();
        path
    };
    while let Some(i) = queue.pop_front() {
        if cost >= budget || states.len() >= max_states {
            break;
        }
        cost += 1;
        let (tri, cur) = (states[i].0.clone(), states[i].1.clone());
        let here = cur.total_weight() as i64;
        for (e, delta) in deltas(&tri, cur.weights()) {
            let w = (here + delta) as u64;
            if w > start + slack {
                continue;
            }
            let (nt, nc) = tri.flip(e, &cur)?;
            if !seen.insert((nt.triangles().to_vec(), nc.clone())) {
                continue;
            }
            let done = w < start || (nc.weights().contains(&0) && detect_short(&nt, &nc).is_some());
            states.push((nt, nc, Some((i, e))));
            let j = states.len() - 1;
            if done {
                return Ok((Some(path_to(&states, j)), cost));
            }
            queue.push_back(j);
        }
    }
    Ok((None, cost))
}
