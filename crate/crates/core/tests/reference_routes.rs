//! Replays the four reference optimal routes for the built-in instance and
//! checks the per-gate task sets against the reference allocation tables.

use std::collections::{BTreeMap, BTreeSet};

use beesched::scheduling::{GateRule, ScheduleModel};

const FD_ROUTE: &str = "16 24 25 45 39 26 38 15 31 14 1 36 35 29 8 56 49 19 32 13 37 20 3 57 50 6 18 28 22 23 48 42 52 4 46 51 59 27 2 17 44 5 55 58 7 40 33 41 60 30 11 34 12 21 10 53 9 54 47 43";
const RMD_ROUTE: &str = "15 39 59 21 52 14 11 30 27 34 38 41 40 7 26 31 46 44 12 42 9 47 19 29 8 58 1 36 54 49 48 13 22 37 20 3 57 50 6 18 28 32 23 10 24 25 17 60 2 33 45 5 53 16 4 51 55 35 43 56";
const PFD_ROUTE: &str = "15 16 46 31 24 41 55 42 54 56 29 25 45 27 44 14 35 58 9 47 43 49 19 23 32 13 28 22 37 18 6 3 57 50 20 48 8 59 17 38 33 12 52 7 11 60 51 34 39 5 1 36 10 53 21 26 4 30 40 2";

fn keys_for(route: &str) -> Vec<f64> {
    let ids: Vec<usize> = route.split_whitespace().map(|s| s.parse().unwrap()).collect();
    assert_eq!(ids.len(), 60);
    let mut keys = vec![0.0; 60];
    for (pos, id) in ids.iter().enumerate() {
        keys[id - 1] = pos as f64;
    }
    keys
}

fn gate_sets(model: &ScheduleModel, route: &str) -> BTreeMap<String, BTreeSet<u32>> {
    let report = model.evaluate(&keys_for(route)).unwrap();
    let mut sets: BTreeMap<String, BTreeSet<u32>> = BTreeMap::new();
    for (id, gate) in &report.gate_assignment {
        sets.entry(gate.clone()).or_default().insert(*id);
    }
    sets
}

fn table(rows: &[(&str, &[u32])]) -> BTreeMap<String, BTreeSet<u32>> {
    rows.iter()
        .filter(|(_, ids)| !ids.is_empty())
        .map(|(g, ids)| (g.to_string(), ids.iter().copied().collect()))
        .collect()
}

#[test]
fn nearest_cell_rule_reproduces_fd_allocation() {
    let model = ScheduleModel::default_instance().with_gate_rule(GateRule::NearestToCell);
    let expected = table(&[
        ("R1", &[16, 24, 25, 26, 15, 4, 27, 2, 17, 7, 30, 11]),
        ("R2", &[14, 1, 5, 12, 21, 10]),
        ("R3", &[9]),
        ("R4", &[29, 8]),
        ("R5", &[19]),
        ("R6", &[23]),
        ("R7", &[13, 28, 22]),
        ("R8", &[20, 3, 6, 18]),
        ("C1", &[45, 39, 38, 31, 46, 51, 59, 44, 40, 33, 41, 60, 34]),
        ("C2", &[36, 35, 42, 52, 55, 58, 53]),
        ("C3", &[56, 49, 54, 47, 43]),
        ("C4", &[32, 48]),
        ("C5", &[37]),
        ("C7", &[57, 50]),
    ]);
    assert_eq!(gate_sets(&model, FD_ROUTE), expected);
}

#[test]
fn nearest_cell_rule_reproduces_rmd_allocation() {
    let model = ScheduleModel::default_instance().with_gate_rule(GateRule::NearestToCell);
    let expected = table(&[
        ("R1", &[15, 11, 30, 27, 7, 26, 24, 25, 17, 2, 16, 4]),
        ("R2", &[21, 14, 12, 1, 10, 5]),
        ("R3", &[9]),
        ("R4", &[29, 8]),
        ("R5", &[19]),
        ("R6", &[23]),
        ("R7", &[13, 22, 28]),
        ("R8", &[20, 3, 6, 18]),
        ("C1", &[39, 59, 34, 38, 41, 40, 31, 60, 33, 45, 51, 46, 44]),
        ("C2", &[52, 42, 58, 36, 53, 55, 35]),
        ("C3", &[47, 54, 49, 43, 56]),
        ("C4", &[48, 32]),
        ("C5", &[37]),
        ("C7", &[57, 50]),
    ]);
    assert_eq!(gate_sets(&model, RMD_ROUTE), expected);
}

#[test]
fn exit_allocation_is_rule_independent() {
    // Outbound legs from the ETV to the cell do not depend on the gate, so
    // both rules agree on every exit.
    for rule in [GateRule::MinTotalLegs, GateRule::NearestToCell] {
        let model = ScheduleModel::default_instance().with_gate_rule(rule);
        let sets = gate_sets(&model, PFD_ROUTE);
        let exits: BTreeMap<_, _> = sets.into_iter().filter(|(g, _)| g.starts_with('C')).collect();
        let expected = table(&[
            ("C1", &[46, 31, 41, 45, 44, 59, 38, 33, 60, 51, 34, 39, 40]),
            ("C2", &[55, 42, 35, 58, 52, 36, 53]),
            ("C3", &[54, 56, 47, 43, 49]),
            ("C4", &[32, 48]),
            ("C5", &[37]),
            ("C7", &[57, 50]),
        ]);
        assert_eq!(exits, expected, "{rule:?}");
    }
}
