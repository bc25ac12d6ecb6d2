//! Greedy load-aware user association.
//!
//! Users are visited in a seeded random order. Each joins the candidate cell
//! maximising `sinr / (load + 1)` among cells whose SINR reaches the threshold;
//! equal scores go to the lowest cell id. Users with no such cell stay unassigned.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::geo::{Subscription, User};
use crate::ingest::{Cell, CellId};
use crate::radio::LinkTable;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Users may only use their own operator's cells.
    PerOperator,
    /// National roaming: every cell is a candidate.
    Roaming,
}

impl Mode {
    pub fn label(&self) -> &'static str {
        match self {
            Mode::PerOperator => "per-operator",
            Mode::Roaming => "roaming",
        }
    }
}

pub fn is_candidate(user: &User, cell: &Cell, mode: Mode) -> bool {
    match (mode, &user.subscription) {
        (Mode::Roaming, _) | (_, Subscription::Any) => true,
        (Mode::PerOperator, Subscription::Operator(op)) => &cell.operator == op,
    }
}

/// Cells `user` may associate with. `cells` holds only surviving cells.
pub fn candidate_cells<'a>(user: &User, cells: &'a [Cell], mode: Mode) -> Vec<&'a Cell> {
    cells.iter().filter(|c| is_candidate(user, c, mode)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub cell: CellId,
    pub cell_index: usize,
    pub sinr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssociationState {
    /// Per user (same order as the user slice).
    pub assignments: Vec<Option<Assignment>>,
    /// Connected users per cell index.
    pub load: Vec<usize>,
}

impl AssociationState {
    pub fn assigned_count(&self) -> usize {
        self.assignments.iter().filter(|a| a.is_some()).count()
    }

    /// Users served by the cell at `cell_index`, ascending.
    pub fn users_of(&self, cell_index: usize) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter(|(_, a)| a.is_some_and(|a| a.cell_index == cell_index))
            .map(|(i, _)| i)
            .collect()
    }
}

/// Seeded visiting order over `n` users.
pub fn association_order(n: usize, order_seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seed::rng(order_seed));
    order
}

/// `links` rows must correspond to `users`, and cell indices to `cells`.
pub fn associate(
    users: &[User],
    links: &LinkTable,
    cells: &[Cell],
    mode: Mode,
    sinr_min: f64,
    order_seed: u64,
) -> AssociationState {
    assert_eq!(users.len(), links.len(), "one link row per user");
    let mut assignments = vec![None; users.len()];
    let mut load = vec![0usize; cells.len()];
    for i in association_order(users.len(), order_seed) {
        let user = &users[i];
        let mut best: Option<(f64, Assignment)> = None;
        for link in links.row(i) {
            if link.sinr < sinr_min || !is_candidate(user, &cells[link.cell_index], mode) {
                continue;
            }
            let score = link.sinr / (load[link.cell_index] + 1) as f64;
            let better = match &best {
                None => true,
                Some((s, a)) => score > *s || (score == *s && link.cell < a.cell),
            };
            if better {
                best = Some((
                    score,
                    Assignment {
                        cell: link.cell,
                        cell_index: link.cell_index,
                        sinr: link.sinr,
                    },
                ));
            }
        }
        if let Some((_, a)) = best {
            load[a.cell_index] += 1;
            assignments[i] = Some(a);
        }
    }
    AssociationState { assignments, load }
}
