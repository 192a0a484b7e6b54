#![allow(dead_code)]

use flagred::adversarial::{worst_case_filtration, WorstCaseParams};
use flagred::flagfilt::{boundary_matrix, Filtration, TiePolicy};
use flagred::homology::betti1_profile;
use flagred::randmodels::{sample_order, Model, Seed};
use flagred::z2core::{reduce, validate_staircase, StaircaseMatrix};
use rand::seq::SliceRandom;

/// Random instance: model in {er, vr2, vr3}, ties reshuffled within each
/// entry-time class when `shuffle_ties` is set.
pub fn random_filtration(kind: u8, n: usize, seed: u64, shuffle_ties: bool) -> Filtration {
    let model = match kind % 3 {
        0 => Model::Er,
        1 => Model::Vr { dim: 2 },
        _ => Model::Vr { dim: 3 },
    };
    let s = Seed::new(seed);
    let f = Filtration::with_default_ties(sample_order(model, n, s, "prop", 0).unwrap());
    if !shuffle_ties {
        return f;
    }
    let mut rng = s.rng("prop/ties", 0);
    let co = f.column_order();
    let mut seq = co.triangles().to_vec();
    let times = co.entry_times();
    let mut start = 0;
    while start < seq.len() {
        let end = start + times[start..].iter().take_while(|&&t| t == times[start]).count();
        seq[start..end].shuffle(&mut rng);
        start = end;
    }
    Filtration::new(f.edge_order().clone(), &TiePolicy::Explicit(seq)).unwrap()
}

pub fn worst(p: usize, seed: u64) -> Filtration {
    worst_case_filtration(WorstCaseParams::new(p).unwrap(), Seed::new(seed)).unwrap().filtration
}

/// Dense left-to-right reduction written straight from the textbook loop:
/// while some earlier column has the same lowest one, add it. Returns the
/// reduced columns as bitmasks (`rows <= 64`) and the metered cost.
pub fn dense_reduce(m: &StaircaseMatrix) -> (Vec<u64>, u64) {
    assert!(m.n_rows() <= 64);
    let mut cols: Vec<u64> = m
        .columns()
        .iter()
        .map(|c| c.rows().iter().fold(0u64, |acc, &r| acc | 1 << r))
        .collect();
    let low = |x: u64| (x != 0).then(|| 63 - x.leading_zeros());
    let mut cost = 0;
    for j in 0..cols.len() {
        while let Some(k) = low(cols[j]).and_then(|l| (0..j).find(|&k| low(cols[k]) == Some(l))) {
            cols[j] ^= cols[k];
            cost += cols[k].count_ones() as u64;
        }
    }
    (cols, cost)
}

pub fn mask(rows: &[u32]) -> u64 {
    rows.iter().fold(0u64, |acc, &r| acc | 1 << r)
}

/// Every property the reduction is expected to satisfy on a clique
/// filtration. Returns a description of the first violation.
pub fn check_invariants(f: &Filtration) -> Result<(), String> {
    let n = f.n();
    let d = boundary_matrix(f);
    if !validate_staircase(&d) {
        return Err("boundary matrix is not staircase".into());
    }
    let (r, stats) = reduce(&d).map_err(|e| e.to_string())?;

    let mut seen = std::collections::HashSet::new();
    for c in r.columns() {
        if let Some(p) = c.pivot() {
            if !seen.insert(p) {
                return Err(format!("pivot {p} appears twice"));
            }
        }
    }
    for (j, c) in r.columns().iter().enumerate() {
        if let Some(p) = c.pivot() {
            if stats.step_indices.contains(&p) && c != &d.columns()[j] {
                return Err(format!("column {j} has step pivot {p} but changed"));
            }
        }
    }
    if stats.cost > stats.cols as u64 * stats.fill_up {
        return Err(format!("cost {} > c·fill {}·{}", stats.cost, stats.cols, stats.fill_up));
    }
    let m = n * (n - 1) / 2;
    if stats.fill_up + (n as u64) < m as u64 {
        return Err(format!("fill {} below C(n,2)-n", stats.fill_up));
    }
    let profile = betti1_profile(f, &r).map_err(|e| e.to_string())?;
    for &p in &stats.critical_indices {
        // row p is the (p+1)-th edge, so it lies in K_{p+1}
        if profile.values[p as usize + 1] == 0 {
            return Err(format!("critical index {p} but beta1(K_{}) = 0", p + 1));
        }
    }
    let upper = 3 * m as u64 + stats.critical_indices.iter().map(|&p| p as u64 + 1).sum::<u64>();
    if stats.fill_up > upper {
        return Err(format!("fill {} above 3m + sum of critical indices {upper}", stats.fill_up));
    }
    let audit = 3 * m as u64 + profile.weighted_support();
    if stats.fill_up > audit {
        return Err(format!("fill {} above 3m + weighted support {audit}", stats.fill_up));
    }
    Ok(())
}
