mod common;

use cellres_core::association::{associate, association_order, candidate_cells, Mode};
use cellres_core::geo::{Subscription, User};
use cellres_core::ingest::Cell;
use cellres_core::radio::{CellLayout, LinkSeeds, LinkTable, RadioModel, Receiver};
use common::{cell, user};

fn table(users: &[User], cells: &[Cell]) -> LinkTable {
    let layout = CellLayout::new(cells, RadioModel::default()).unwrap();
    let rx: Vec<Receiver> = users.iter().map(Receiver::from).collect();
    LinkTable::build(&rx, &layout, LinkSeeds::for_run(13), None).unwrap()
}

#[test]
fn threshold_is_inclusive() {
    let cells = vec![cell(0, "A", 0.0, 0.0, 0.0, 800.0)];
    let users = vec![user(0, "A", 0.0, 300.0, 8e6)];
    let links = table(&users, &cells);
    let gamma = links.row(0)[0].sinr;
    let at = associate(&users, &links, &cells, Mode::PerOperator, gamma, 1);
    assert_eq!(at.assignments[0].unwrap().cell, cells[0].id);
    let above = associate(&users, &links, &cells, Mode::PerOperator, gamma * 1.000001, 1);
    assert!(above.assignments[0].is_none());
    assert_eq!(above.load, vec![0]);
}

#[test]
fn candidates_by_mode() {
    let ops = ["M1", "M2", "M3"];
    let cells: Vec<Cell> = (0..6)
        .map(|i| cell(i, ops[i as usize / 2], 0.0, 0.0, 0.0, 800.0))
        .collect();
    let u = user(0, "M1", 0.0, 0.0, 1.0);
    assert_eq!(candidate_cells(&u, &cells, Mode::Roaming).len(), 6);
    let own = candidate_cells(&u, &cells, Mode::PerOperator);
    assert_eq!(own.len(), 2);
    assert!(own.iter().all(|c| c.operator.as_str() == "M1"));
    let any = User {
        subscription: Subscription::Any,
        ..u
    };
    assert_eq!(candidate_cells(&any, &cells, Mode::PerOperator).len(), 6);
    // a failed cell is simply absent from the slice
    assert_eq!(candidate_cells(&u, &cells[1..], Mode::PerOperator).len(), 1);
}

#[test]
fn small_fixture_replay() {
    let cells = vec![
        cell(0, "A", 0.0, 0.0, 90.0, 800.0),
        cell(1, "A", 400.0, 0.0, 270.0, 1800.0),
    ];
    let users = vec![
        user(0, "A", 150.0, 10.0, 8e6),
        user(1, "A", 200.0, -10.0, 8e6),
        user(2, "A", 250.0, 0.0, 8e6),
    ];
    let links = table(&users, &cells);
    let gamma_min = 10f64.powf(0.5);
    let state = associate(&users, &links, &cells, Mode::Roaming, gamma_min, 21);

    let mut load = [0usize; 2];
    for i in association_order(3, 21) {
        let mut best: Option<(f64, usize)> = None;
        for l in links.row(i) {
            if l.sinr < gamma_min {
                continue;
            }
            let score = l.sinr / (load[l.cell_index] as f64 + 1.0);
            if best.is_none_or(|(s, j)| score > s || (score == s && l.cell_index < j)) {
                best = Some((score, l.cell_index));
            }
        }
        assert_eq!(state.assignments[i].map(|a| a.cell_index), best.map(|b| b.1));
        if let Some((_, j)) = best {
            load[j] += 1;
        }
    }
    assert_eq!(state.load, load.to_vec());
}

#[test]
fn order_is_a_seeded_permutation() {
    let a = association_order(50, 3);
    let mut sorted = a.clone();
    sorted.sort();
    assert_eq!(sorted, (0..50).collect::<Vec<_>>());
    assert_eq!(a, association_order(50, 3));
    assert_ne!(a, association_order(50, 4));
}
