//! Deterministic tree MDPs: exact values by backward induction, A* search
//! and Monte Carlo tree search.
//!
//! A state is the action sequence leading to it. Actions are numbered
//! `0..A`, so states of equal depth compare lexicographically as their
//! action sequences, which is also the order of their index in base `A`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stochastics::RngState;

/// Largest number of leaves `A^T` a tree may have.
pub const MAX_LEAVES: usize = 10_000_000;

pub type State = Vec<usize>;

fn leaf_count(branching: usize, horizon: usize) -> Result<usize> {
    let size = (branching as f64).powi(horizon as i32);
    if size > MAX_LEAVES as f64 {
        return Err(Error::TooLarge {
            what: "tree leaves",
            size,
            cap: MAX_LEAVES,
        });
    }
    Ok(branching.pow(horizon as u32))
}

/// A depth-`T` tree with `A` actions per state and a reward on every edge.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeMdp {
    branching: usize,
    horizon: usize,
    /// `levels[t][i * A + a]` is the reward of action `a` at the depth-`t`
    /// state with index `i`.
    levels: Vec<Vec<f64>>,
}

impl TreeMdp {
    pub fn new(branching: usize, horizon: usize, levels: Vec<Vec<f64>>) -> Result<Self> {
        if branching == 0 || horizon == 0 {
            return Err(Error::domain("a tree needs A >= 1 and T >= 1"));
        }
        leaf_count(branching, horizon)?;
        if levels.len() != horizon {
            return Err(Error::Dimension {
                expected: horizon,
                got: levels.len(),
            });
        }
        for (t, level) in levels.iter().enumerate() {
            let expected = branching.pow(t as u32 + 1);
            if level.len() != expected {
                return Err(Error::Dimension {
                    expected,
                    got: level.len(),
                });
            }
            if let Some(r) = level.iter().find(|r| !r.is_finite()) {
                return Err(Error::domain(format!(
                    "reward {r} at depth {t} is not finite"
                )));
            }
        }
        Ok(Self {
            branching,
            horizon,
            levels,
        })
    }

    /// Every reward equal to `c`.
    pub fn constant(branching: usize, horizon: usize, c: f64) -> Result<Self> {
        leaf_count(branching.max(1), horizon)?;
        let levels = (0..horizon)
            .map(|t| vec![c; branching.pow(t as u32 + 1)])
            .collect();
        Self::new(branching, horizon, levels)
    }

    /// Rewards drawn independently from `U[0, 1)`, level by level.
    pub fn random_uniform(branching: usize, horizon: usize, rng: &mut RngState) -> Result<Self> {
        leaf_count(branching.max(1), horizon)?;
        let levels = (0..horizon)
            .map(|t| {
                (0..branching.pow(t as u32 + 1))
                    .map(|_| rng.uniform())
                    .collect()
            })
            .collect();
        Self::new(branching, horizon, levels)
    }

    pub fn branching(&self) -> usize {
        self.branching
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn num_leaves(&self) -> usize {
        self.branching.pow(self.horizon as u32)
    }

    pub fn is_leaf(&self, s: &[usize]) -> bool {
        s.len() == self.horizon
    }

    fn index(&self, s: &[usize]) -> usize {
        s.iter().fold(0, |acc, &a| acc * self.branching + a)
    }

    fn check_state(&self, s: &[usize]) -> Result<()> {
        if s.len() > self.horizon || s.iter().any(|&a| a >= self.branching) {
            return Err(Error::domain(format!("{s:?} is not a state of this tree")));
        }
        Ok(())
    }

    /// `r(s, a)` for an internal state `s`.
    pub fn reward(&self, s: &[usize], a: usize) -> f64 {
        debug_assert!(s.len() < self.horizon && a < self.branching);
        self.levels[s.len()][self.index(s) * self.branching + a]
    }

    /// `Σ_t r(s_t, a_t)` summed from the root.
    pub fn path_reward(&self, actions: &[usize]) -> f64 {
        let mut g = 0.0;
        let mut idx = 0;
        for (t, &a) in actions.iter().enumerate() {
            idx = idx * self.branching + a;
            g += self.levels[t][idx];
        }
        g
    }

    pub fn trajectory(&self, actions: Vec<usize>) -> Result<Trajectory> {
        self.check_state(&actions)?;
        if actions.len() != self.horizon {
            return Err(Error::Dimension {
                expected: self.horizon,
                got: actions.len(),
            });
        }
        let reward = self.path_reward(&actions);
        Ok(Trajectory { actions, reward })
    }

    pub fn from_fixture(fixture: &TreeFixture) -> Result<Self> {
        let (a, h) = (fixture.branching, fixture.horizon);
        if a == 0 || h == 0 {
            return Err(Error::domain("a tree needs A >= 1 and T >= 1"));
        }
        leaf_count(a, h)?;
        let mut levels: Vec<Vec<Option<f64>>> =
            (0..h).map(|t| vec![None; a.pow(t as u32 + 1)]).collect();
        let probe = Self {
            branching: a,
            horizon: h,
            levels: Vec::new(),
        };
        for e in &fixture.edges {
            if e.state.len() >= h || e.action >= a {
                return Err(Error::domain(format!(
                    "edge ({:?}, {}) lies outside the tree",
                    e.state, e.action
                )));
            }
            probe.check_state(&e.state)?;
            let slot = &mut levels[e.state.len()][probe.index(&e.state) * a + e.action];
            if slot.replace(e.reward).is_some() {
                return Err(Error::domain(format!(
                    "edge ({:?}, {}) listed twice",
                    e.state, e.action
                )));
            }
        }
        let mut full = Vec::with_capacity(h);
        for (t, level) in levels.into_iter().enumerate() {
            let row: Option<Vec<f64>> = level.into_iter().collect();
            full.push(row.ok_or_else(|| Error::domain(format!("missing edges at depth {t}")))?);
        }
        Self::new(a, h, full)
    }

    pub fn to_fixture(&self) -> TreeFixture {
        let mut edges = Vec::new();
        for (t, level) in self.levels.iter().enumerate() {
            for (k, &reward) in level.iter().enumerate() {
                let state = decode(k / self.branching, self.branching, t);
                edges.push(TreeEdge {
                    state,
                    action: k % self.branching,
                    reward,
                });
            }
        }
        TreeFixture {
            branching: self.branching,
            horizon: self.horizon,
            edges,
        }
    }
}

fn decode(mut index: usize, branching: usize, depth: usize) -> State {
    let mut s = vec![0; depth];
    for slot in s.iter_mut().rev() {
        *slot = index % branching;
        index /= branching;
    }
    s
}

/// Flat JSON form of a tree: one record per edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeFixture {
    pub branching: usize,
    pub horizon: usize,
    pub edges: Vec<TreeEdge>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeEdge {
    pub state: State,
    pub action: usize,
    pub reward: f64,
}

/// A full action sequence and its cumulative reward.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub actions: Vec<usize>,
    pub reward: f64,
}

/// Brute-force optimum over all `A^T` trajectories; ties go to the
/// lexicographically smallest action sequence.
pub fn exhaustive_best(tree: &TreeMdp) -> Result<Trajectory> {
    leaf_count(tree.branching, tree.horizon)?;
    let mut best: Option<Trajectory> = None;
    let mut actions = vec![0; tree.horizon];
    let mut prefix = vec![0.0; tree.horizon + 1];
    // odometer over leaves in lexicographic order, reusing prefix sums
    let mut depth = 0;
    loop {
        for t in depth..tree.horizon {
            prefix[t + 1] = prefix[t] + tree.reward(&actions[..t], actions[t]);
        }
        let g = prefix[tree.horizon];
        if best.as_ref().is_none_or(|b| g > b.reward) {
            best = Some(Trajectory {
                actions: actions.clone(),
                reward: g,
            });
        }
        let Some(pos) = (0..tree.horizon)
            .rev()
            .find(|&t| actions[t] + 1 < tree.branching)
        else {
            break;
        };
        actions[pos] += 1;
        actions[pos + 1..].iter_mut().for_each(|a| *a = 0);
        depth = pos;
    }
    Ok(best.expect("a tree has at least one leaf"))
}

/// `V*` and `Q*` for every state, by backward induction over depth.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalValues {
    branching: usize,
    v: Vec<Vec<f64>>,
    q: Vec<Vec<f64>>,
}

impl OptimalValues {
    pub fn v(&self, s: &[usize]) -> f64 {
        let idx = s.iter().fold(0, |acc, &a| acc * self.branching + a);
        self.v[s.len()][idx]
    }

    pub fn q(&self, s: &[usize], a: usize) -> f64 {
        let idx = s.iter().fold(0, |acc, &a| acc * self.branching + a);
        self.q[s.len()][idx * self.branching + a]
    }

    /// Root-to-leaf descent taking the first maximizer of `Q*` at each state.
    pub fn greedy(&self, tree: &TreeMdp) -> Trajectory {
        let mut s = Vec::with_capacity(tree.horizon);
        while s.len() < tree.horizon {
            let mut best = 0;
            for a in 1..tree.branching {
                if self.q(&s, a) > self.q(&s, best) {
                    best = a;
                }
            }
            s.push(best);
        }
        let reward = tree.path_reward(&s);
        Trajectory { actions: s, reward }
    }
}

pub fn optimal_values(tree: &TreeMdp) -> Result<OptimalValues> {
    leaf_count(tree.branching, tree.horizon)?;
    let a = tree.branching;
    let mut v: Vec<Vec<f64>> = (0..=tree.horizon)
        .map(|t| vec![0.0; a.pow(t as u32)])
        .collect();
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(tree.horizon);
    for t in (0..tree.horizon).rev() {
        let level = &tree.levels[t];
        let qt: Vec<f64> = level
            .iter()
            .enumerate()
            .map(|(k, &r)| r + v[t + 1][k])
            .collect();
        for (i, slot) in v[t].iter_mut().enumerate() {
            *slot = qt[i * a..(i + 1) * a]
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max);
        }
        q.push(qt);
    }
    q.reverse();
    Ok(OptimalValues { branching: a, v, q })
}

/// `h(s) = Σ_{t ≥ |s|} max over all depth-`t` edges of r`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelMaxHeuristic {
    suffix: Vec<f64>,
}

impl LevelMaxHeuristic {
    pub fn value(&self, s: &[usize]) -> f64 {
        self.suffix[s.len()]
    }
}

pub fn level_max_heuristic(tree: &TreeMdp) -> Result<LevelMaxHeuristic> {
    leaf_count(tree.branching, tree.horizon)?;
    let mut suffix = vec![0.0; tree.horizon + 1];
    for t in (0..tree.horizon).rev() {
        let m = tree.levels[t]
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        // same association as the Bellman recursion, so h >= V* holds exactly
        suffix[t] = m + suffix[t + 1];
    }
    Ok(LevelMaxHeuristic { suffix })
}

/// Cap on work done by a search: node expansions for A*, iterations for MCTS.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_expansions: u64,
}

impl SearchBudget {
    pub fn new(max_expansions: u64) -> Self {
        Self { max_expansions }
    }

    pub fn unlimited() -> Self {
        Self {
            max_expansions: u64::MAX,
        }
    }
}

/// One row of a search progress log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchLogRow {
    pub iter: u64,
    /// Best complete-trajectory reward seen so far, `-inf` before any.
    pub best_reward_so_far: f64,
    pub expansions: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AstarResult {
    pub trajectory: Option<Trajectory>,
    pub expansions: u64,
    pub log: Vec<SearchLogRow>,
}

struct Frontier {
    f: f64,
    g: f64,
    state: State,
}

impl PartialEq for Frontier {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other).is_eq()
    }
}

impl Eq for Frontier {}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Frontier {
    // max-heap: larger f first, then the lexicographically smaller state
    fn cmp(&self, other: &Self) -> Ordering {
        self.f
            .total_cmp(&other.f)
            .then_with(|| other.state.cmp(&self.state))
    }
}

/// Best-first search on `g + h`, returning the first leaf extracted.
///
/// Returns no trajectory if the budget runs out or the frontier empties
/// before a leaf is extracted.
pub fn astar(
    tree: &TreeMdp,
    h: impl Fn(&[usize]) -> f64,
    budget: SearchBudget,
) -> Result<AstarResult> {
    let mut heap = BinaryHeap::new();
    heap.push(Frontier {
        f: h(&[]),
        g: 0.0,
        state: Vec::new(),
    });
    let mut expansions = 0u64;
    let mut best_leaf = f64::NEG_INFINITY;
    let mut log = Vec::new();
    let mut iter = 0u64;
    while let Some(node) = heap.pop() {
        iter += 1;
        if tree.is_leaf(&node.state) {
            let hv = h(&node.state);
            if hv != 0.0 {
                return Err(Error::HeuristicContractViolation {
                    state: node.state,
                    value: hv,
                });
            }
            best_leaf = best_leaf.max(node.g);
            log.push(SearchLogRow {
                iter,
                best_reward_so_far: best_leaf,
                expansions,
            });
            return Ok(AstarResult {
                trajectory: Some(Trajectory {
                    actions: node.state,
                    reward: node.g,
                }),
                expansions,
                log,
            });
        }
        if expansions >= budget.max_expansions {
            break;
        }
        expansions += 1;
        for a in 0..tree.branching {
            let mut child = node.state.clone();
            child.push(a);
            let g = node.g + tree.reward(&node.state, a);
            if tree.is_leaf(&child) {
                best_leaf = best_leaf.max(g);
            }
            heap.push(Frontier {
                f: g + h(&child),
                g,
                state: child,
            });
        }
        log.push(SearchLogRow {
            iter,
            best_reward_so_far: best_leaf,
            expansions,
        });
    }
    Ok(AstarResult {
        trajectory: None,
        expansions,
        log,
    })
}

/// `mean + c √(ln n_parent / n_child)`, or `+∞` for an unvisited child.
pub fn uct_index(mean: f64, n_parent: u64, n_child: u64, c: f64) -> Result<f64> {
    if n_parent == 0 {
        return Err(Error::domain("uct_index needs n_parent >= 1"));
    }
    if !(c >= 0.0) {
        return Err(Error::domain(format!(
            "exploration constant must be >= 0, got {c}"
        )));
    }
    if n_child == 0 {
        return Ok(f64::INFINITY);
    }
    if c == 0.0 {
        return Ok(mean);
    }
    Ok(mean + c * ((n_parent as f64).ln() / n_child as f64).sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MctsNode {
    pub state: State,
    pub parent: Option<usize>,
    /// Child node ids indexed by action; empty until expanded.
    pub children: Vec<usize>,
    pub visits: u64,
    pub mean: f64,
    /// Rollouts started from this node.
    pub rollouts: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MctsResult {
    pub trajectory: Trajectory,
    /// Arena of search-tree nodes; id 0 is the root.
    pub nodes: Vec<MctsNode>,
    /// `(frontier node id, return)` for every iteration.
    pub backups: Vec<(usize, f64)>,
    pub expansions: u64,
    pub log: Vec<SearchLogRow>,
}

impl MctsResult {
    pub fn root(&self) -> &MctsNode {
        &self.nodes[0]
    }
}

/// UCT search: select by [`uct_index`] to a frontier node, expand it, roll
/// out uniformly at random to a leaf and back the trajectory reward up the
/// selected path. The budget counts iterations.
pub fn mcts(
    tree: &TreeMdp,
    budget: SearchBudget,
    c: f64,
    rng: &mut RngState,
) -> Result<MctsResult> {
    if budget.max_expansions == 0 {
        return Err(Error::domain(
            "MCTS needs a budget of at least one iteration",
        ));
    }
    if !(c >= 0.0) {
        return Err(Error::domain(format!(
            "exploration constant must be >= 0, got {c}"
        )));
    }
    let mut nodes = vec![MctsNode {
        state: Vec::new(),
        parent: None,
        children: Vec::new(),
        visits: 0,
        mean: 0.0,
        rollouts: 0,
    }];
    let mut backups = Vec::new();
    let mut log = Vec::new();
    let mut expansions = 0u64;
    let mut best = f64::NEG_INFINITY;
    let mut path = Vec::with_capacity(tree.horizon + 1);
    for iter in 1..=budget.max_expansions {
        path.clear();
        let mut id = 0;
        path.push(id);
        while !nodes[id].children.is_empty() {
            let parent_visits = nodes[id].visits.max(1);
            let mut pick = nodes[id].children[0];
            let mut pick_score = f64::NEG_INFINITY;
            for &ch in &nodes[id].children {
                let score = uct_index(nodes[ch].mean, parent_visits, nodes[ch].visits, c)?;
                if score > pick_score {
                    pick = ch;
                    pick_score = score;
                }
            }
            id = pick;
            path.push(id);
        }
        if !tree.is_leaf(&nodes[id].state) {
            expansions += 1;
            for a in 0..tree.branching {
                let mut state = nodes[id].state.clone();
                state.push(a);
                let child = nodes.len();
                nodes.push(MctsNode {
                    state,
                    parent: Some(id),
                    children: Vec::new(),
                    visits: 0,
                    mean: 0.0,
                    rollouts: 0,
                });
                nodes[id].children.push(child);
            }
        }
        let mut actions = nodes[id].state.clone();
        while actions.len() < tree.horizon {
            actions.push(rng.below(tree.branching));
        }
        let ret = tree.path_reward(&actions);
        best = best.max(ret);
        nodes[id].rollouts += 1;
        for &p in &path {
            let node = &mut nodes[p];
            node.visits += 1;
            node.mean += (ret - node.mean) / node.visits as f64;
        }
        backups.push((id, ret));
        log.push(SearchLogRow {
            iter,
            best_reward_so_far: best,
            expansions,
        });
    }

    let mut actions = Vec::with_capacity(tree.horizon);
    let mut id = Some(0);
    while actions.len() < tree.horizon {
        let next = id.and_then(|i| {
            let mut choice: Option<usize> = None;
            for &ch in &nodes[i].children {
                if nodes[ch].visits > 0 && choice.is_none_or(|b| nodes[ch].mean > nodes[b].mean) {
                    choice = Some(ch);
                }
            }
            choice
        });
        match next {
            Some(ch) => {
                actions.push(*nodes[ch].state.last().expect("child state is nonempty"));
                id = Some(ch);
            }
            None => {
                actions.push(0);
                id = None;
            }
        }
    }
    let trajectory = tree.trajectory(actions)?;
    Ok(MctsResult {
        trajectory,
        nodes,
        backups,
        expansions,
        log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn two_by_two() -> TreeMdp {
        TreeMdp::new(2, 2, vec![vec![1.0, 0.0], vec![0.0, 5.0, 10.0, 0.0]]).unwrap()
    }

    #[test]
    fn exhaustive_on_small_trees() {
        let best = exhaustive_best(&two_by_two()).unwrap();
        assert_eq!(best.actions, vec![1, 0]);
        assert_eq!(best.reward, 10.0);
        let zero = TreeMdp::constant(3, 3, 0.0).unwrap();
        let best = exhaustive_best(&zero).unwrap();
        assert_eq!(best.actions, vec![0, 0, 0]);
        assert_eq!(best.reward, 0.0);
        let single = TreeMdp::constant(1, 4, 2.0).unwrap();
        assert_eq!(exhaustive_best(&single).unwrap().actions, vec![0; 4]);
    }

    #[test]
    fn oversized_tree_rejected() {
        let err = TreeMdp::constant(10, 8, 0.0).unwrap_err();
        assert!(matches!(err, Error::TooLarge { .. }));
    }

    #[test]
    fn bellman_values() {
        let t = TreeMdp::new(2, 1, vec![vec![3.0, 7.0]]).unwrap();
        let vals = optimal_values(&t).unwrap();
        assert_eq!(vals.v(&[]), 7.0);
        assert_eq!((vals.q(&[], 0), vals.q(&[], 1)), (3.0, 7.0));
        let t = two_by_two();
        let vals = optimal_values(&t).unwrap();
        assert_eq!(vals.v(&[]), 10.0);
        assert_eq!(vals.v(&[0]), 5.0);
        assert_eq!(vals.v(&[1, 0]), 0.0);
        assert_eq!(vals.greedy(&t), exhaustive_best(&t).unwrap());
    }

    #[test]
    fn level_max_values() {
        let t = two_by_two();
        let h = level_max_heuristic(&t).unwrap();
        assert_eq!(h.value(&[]), 11.0);
        assert_eq!(h.value(&[1, 1]), 0.0);
        let c = TreeMdp::constant(3, 4, 0.5).unwrap();
        let h = level_max_heuristic(&c).unwrap();
        let v = optimal_values(&c).unwrap();
        assert_eq!(h.value(&[]), 2.0);
        assert_eq!(h.value(&[2, 1]), v.v(&[2, 1]));
    }

    #[test]
    fn astar_with_admissible_heuristic() {
        let t = TreeMdp::new(3, 1, vec![vec![0.2, 0.9, 0.4]]).unwrap();
        let r = astar(
            &t,
            |s: &[usize]| if s.is_empty() { 1.0 } else { 0.0 },
            SearchBudget::unlimited(),
        )
        .unwrap();
        assert_eq!(r.trajectory.unwrap().actions, vec![1]);
        let t = two_by_two();
        let h = level_max_heuristic(&t).unwrap();
        let r = astar(&t, |s: &[usize]| h.value(s), SearchBudget::unlimited()).unwrap();
        assert_eq!(r.trajectory.unwrap(), exhaustive_best(&t).unwrap());
    }

    #[test]
    fn astar_inadmissible_counterexample() {
        let t = two_by_two();
        let h = |s: &[usize]| match s {
            [1] => f64::NEG_INFINITY,
            [] => 11.0,
            [_] => 5.0,
            _ => 0.0,
        };
        let r = astar(&t, h, SearchBudget::unlimited()).unwrap();
        let got = r.trajectory.unwrap();
        assert_eq!(got.actions, vec![0, 1]);
        assert_eq!(got.reward, 6.0);
        assert!(got.reward < exhaustive_best(&t).unwrap().reward);
    }

    #[test]
    fn astar_budget_and_contract() {
        let t = two_by_two();
        let r = astar(&t, |_: &[usize]| 0.0, SearchBudget::new(1)).unwrap();
        assert!(r.trajectory.is_none());
        assert_eq!(r.expansions, 1);
        let err = astar(&t, |_: &[usize]| 1.0, SearchBudget::unlimited()).unwrap_err();
        assert!(matches!(err, Error::HeuristicContractViolation { .. }));
    }

    #[test]
    fn uct_values() {
        let v = uct_index(0.4, 100, 10, 1.0).unwrap();
        assert!((v - 1.078_614_042_441_512).abs() < 1e-14);
        assert_eq!(uct_index(0.4, 5, 0, 1.0).unwrap(), f64::INFINITY);
        assert_eq!(uct_index(0.4, 5, 3, 0.0).unwrap(), 0.4);
        assert!(uct_index(0.4, 0, 3, 1.0).is_err());
    }

    #[test]
    fn mcts_single_action_and_depth_one() {
        let t = TreeMdp::constant(1, 3, 1.0).unwrap();
        let r = mcts(&t, SearchBudget::new(3), 1.0, &mut RngState::new(0)).unwrap();
        assert_eq!(r.trajectory.actions, vec![0, 0, 0]);
        let t = TreeMdp::new(2, 1, vec![vec![0.0, 1.0]]).unwrap();
        let r = mcts(&t, SearchBudget::new(500), 1.0, &mut RngState::new(0)).unwrap();
        assert_eq!(r.trajectory.actions, vec![1]);
        let kids = &r.root().children;
        assert!(r.nodes[kids[1]].visits > r.nodes[kids[0]].visits);
    }

    #[test]
    fn fixture_round_trip() {
        let t = TreeMdp::random_uniform(3, 3, &mut RngState::new(4)).unwrap();
        let fx = t.to_fixture();
        let json = serde_json::to_string(&fx).unwrap();
        let back: TreeFixture = serde_json::from_str(&json).unwrap();
        assert_eq!(TreeMdp::from_fixture(&back).unwrap(), t);
        let mut short = fx.clone();
        short.edges.pop();
        assert!(TreeMdp::from_fixture(&short).is_err());
        let mut dup = fx;
        let e = dup.edges[0].clone();
        dup.edges[1] = e;
        assert!(TreeMdp::from_fixture(&dup).is_err());
    }
}
