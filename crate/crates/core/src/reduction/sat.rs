//! (3,B2)-SAT to feasibility of a robust flow on an acyclic digraph with zero costs.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::ReductionError;
use crate::instance::{
    validate_robust_flow, Arc, ArcIdx, ArcKind, Instance, RobustFlow, Scenario, VertexId,
};

/// CNF with three literals per clause; literal `+i` is x_i, `-i` its negation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SatFormula {
    variables: usize,
    clauses: Vec<[i32; 3]>,
}

impl SatFormula {
    /// Requires every literal of every variable to occur exactly twice.
    pub fn new(variables: usize, clauses: Vec<[i32; 3]>) -> Result<Self, ReductionError> {
        let mut count: HashMap<i32, usize> = HashMap::new();
        for lit in clauses.iter().flatten() {
            let var = lit.unsigned_abs() as usize;
            if *lit == 0 || var > variables {
                return Err(ReductionError::NotB2(format!(
                    "literal {lit} is out of range"
                )));
            }
            *count.entry(*lit).or_default() += 1;
        }
        for v in 1..=variables as i32 {
            for lit in [v, -v] {
                let c = count.get(&lit).copied().unwrap_or(0);
                if c != 2 {
                    return Err(ReductionError::NotB2(format!(
                        "literal {lit} occurs {c} times"
                    )));
                }
            }
        }
        Ok(SatFormula { variables, clauses })
    }

    pub fn variables(&self) -> usize {
        self.variables
    }

    pub fn clauses(&self) -> &[[i32; 3]] {
        &self.clauses
    }
}

fn literal_true(lit: i32, assignment: &[bool]) -> bool {
    assignment[lit.unsigned_abs() as usize - 1] == (lit > 0)
}

pub fn satisfies(formula: &SatFormula, assignment: &[bool]) -> bool {
    assignment.len() == formula.variables
        && formula
            .clauses
            .iter()
            .all(|c| c.iter().any(|&l| literal_true(l, assignment)))
}

/// First satisfying assignment in binary counting order, x_1 lowest bit.
pub fn brute_force_sat(formula: &SatFormula) -> Option<Vec<bool>> {
    let n = formula.variables;
    assert!(
        n < 32,
        "exhaustive search is limited to fewer than 32 variables"
    );
    (0u32..1 << n)
        .map(|m| (0..n).map(|i| m >> i & 1 == 1).collect::<Vec<bool>>())
        .find(|a| satisfies(formula, a))
}

/// Arc indices of one literal gadget (x_i or its negation).
#[derive(Debug, Clone, Default)]
struct LiteralArcs {
    /// The five arcs from v_i to v_{i+1}.
    path: Vec<ArcIdx>,
    /// Per occurrence k: source connector, literal arc, arc to the clause, arc to t.
    entry: [ArcIdx; 2],
    literal: [ArcIdx; 2],
    to_clause: [ArcIdx; 2],
    to_t: [ArcIdx; 2],
    /// (clause index, position) of each occurrence.
    occurrence: [(usize, usize); 2],
}

struct SatArcs {
    /// `literals[i][0]` is x_{i+1}, `literals[i][1]` its negation.
    literals: Vec<[LiteralArcs; 2]>,
    /// Arcs r_l -> r_{l+1}, with r_0 = v_{n+1} and r_{4n+4} = z.
    tilde: Vec<ArcIdx>,
    clause_out: Vec<ArcIdx>,
    /// Arc t -> r_{2l+1} at index l - m - 1.
    t_out: Vec<ArcIdx>,
    /// v1 -> r_1 and v1 -> r_{4n+3}.
    extra: [ArcIdx; 2],
    /// Arc r_l -> z for even l at index l/2 - 1.
    to_z: Vec<ArcIdx>,
}

struct Builder {
    names: Vec<String>,
    index: HashMap<String, VertexId>,
    arcs: Vec<Arc>,
    ids: HashMap<String, usize>,
}

impl Builder {
    fn vertex(&mut self, name: String) {
        self.index.insert(name.clone(), self.names.len());
        self.names.push(name);
    }

    fn arc(&mut self, tail: &str, head: &str, kind: ArcKind) -> ArcIdx {
        let base = format!("{tail}->{head}");
        let seen = self.ids.entry(base.clone()).or_default();
        *seen += 1;
        let id = if *seen == 1 {
            base
        } else {
            format!("{base}#{seen}")
        };
        self.arcs.push(Arc {
            id,
            tail: self.index[tail],
            head: self.index[head],
            cost: 0,
            kind,
        });
        self.arcs.len() - 1
    }
}

fn w_name(i: usize, neg: usize, l: usize) -> String {
    if neg == 0 {
        format!("w{l}_{i}")
    } else {
        format!("wbar{l}_{i}")
    }
}

fn r_name(l: usize, n: usize) -> String {
    match l {
        0 => format!("v{}", n + 1),
        l if l == 4 * n + 4 => "z".into(),
        l => format!("r{l}"),
    }
}

fn build(formula: &SatFormula) -> (Instance, SatArcs) {
    let n = formula.variables;
    let m = formula.clauses.len();
    let mut b = Builder {
        names: Vec::new(),
        index: HashMap::new(),
        arcs: Vec::new(),
        ids: HashMap::new(),
    };
    for i in 1..=n + 1 {
        b.vertex(format!("v{i}"));
    }
    for j in 1..=m {
        b.vertex(format!("u{j}"));
    }
    for i in 1..=n {
        for neg in 0..2 {
            for l in 1..=4 {
                b.vertex(w_name(i, neg, l));
            }
        }
    }
    b.vertex("t".into());
    for l in 1..=4 * n + 3 {
        b.vertex(format!("r{l}"));
    }
    b.vertex("z".into());

    let mut occurrences: HashMap<i32, Vec<(usize, usize)>> = HashMap::new();
    for (j, clause) in formula.clauses.iter().enumerate() {
        for (pos, &lit) in clause.iter().enumerate() {
            occurrences.entry(lit).or_default().push((j, pos));
        }
    }

    let mut literals: Vec<[LiteralArcs; 2]> = Vec::with_capacity(n);
    for i in 1..=n {
        let mut pair: [LiteralArcs; 2] = Default::default();
        for (neg, gadget) in pair.iter_mut().enumerate() {
            let ws: Vec<String> = (1..=4).map(|l| w_name(i, neg, l)).collect();
            let vi = format!("v{i}");
            let vnext = format!("v{}", i + 1);
            gadget.path.push(b.arc(&vi, &ws[0], ArcKind::Free));
            gadget.path.push(b.arc(&ws[0], &ws[1], ArcKind::Fixed));
            gadget.path.push(b.arc(&ws[1], &ws[2], ArcKind::Free));
            gadget.path.push(b.arc(&ws[2], &ws[3], ArcKind::Fixed));
            gadget.path.push(b.arc(&ws[3], &vnext, ArcKind::Free));
            gadget.literal = [gadget.path[1], gadget.path[3]];
            let lit = if neg == 0 { i as i32 } else { -(i as i32) };
            let occ = &occurrences[&lit];
            gadget.occurrence = [occ[0], occ[1]];
        }
        literals.push(pair);
    }
    for (i, pair) in literals.iter_mut().enumerate() {
        for (neg, gadget) in pair.iter_mut().enumerate() {
            for k in 0..2 {
                gadget.entry[k] = b.arc("v1", &w_name(i + 1, neg, 2 * k + 1), ArcKind::Free);
            }
        }
    }
    for (i, pair) in literals.iter_mut().enumerate() {
        for (neg, gadget) in pair.iter_mut().enumerate() {
            for k in 0..2 {
                let w = w_name(i + 1, neg, 2 * k + 2);
                gadget.to_clause[k] = b.arc(
                    &w,
                    &format!("u{}", gadget.occurrence[k].0 + 1),
                    ArcKind::Free,
                );
                gadget.to_t[k] = b.arc(&w, "t", ArcKind::Free);
            }
        }
    }
    let tilde: Vec<ArcIdx> = (0..4 * n + 4)
        .map(|l| {
            let kind = if l % 2 == 1 {
                ArcKind::Fixed
            } else {
                ArcKind::Free
            };
            b.arc(&r_name(l, n), &r_name(l + 1, n), kind)
        })
        .collect();
    let clause_out: Vec<ArcIdx> = (1..=m)
        .map(|j| b.arc(&format!("u{j}"), &r_name(2 * j + 1, n), ArcKind::Free))
        .collect();
    let t_out: Vec<ArcIdx> = (m + 1..=2 * n)
        .map(|l| b.arc("t", &r_name(2 * l + 1, n), ArcKind::Free))
        .collect();
    // The two padding units enter the first and the last fixed arc of the
    // closing path directly. Occupying r_1 -> r_2 keeps scenario 2 from
    // reaching it through v_{n+1}, and no padding unit can touch a literal
    // vertex.
    let extra = [
        b.arc("v1", &r_name(1, n), ArcKind::Free),
        b.arc("v1", &r_name(4 * n + 3, n), ArcKind::Free),
    ];
    let to_z: Vec<ArcIdx> = (1..=2 * n + 1)
        .map(|h| b.arc(&r_name(2 * h, n), "z", ArcKind::Free))
        .collect();

    let k = b.names.len();
    let (v1, z) = (0, k - 1);
    let supply = 2 * n as i64 + 2;
    let mut b1 = vec![0; k];
    b1[v1] = 1;
    b1[z] = -1;
    let mut b2 = vec![0; k];
    b2[v1] = supply;
    b2[z] = -supply;
    let scenarios = vec![
        Scenario {
            name: "1".into(),
            balances: b1,
        },
        Scenario {
            name: "2".into(),
            balances: b2,
        },
    ];
    let instance =
        Instance::new(b.names, b.arcs, scenarios).expect("construction is a valid instance");
    (
        instance,
        SatArcs {
            literals,
            tilde,
            clause_out,
            t_out,
            extra,
            to_z,
        },
    )
}

/// Zero-cost instance with source v1 and sink z that admits a feasible
/// robust flow exactly when the formula is satisfiable.
pub fn sat_reduction_instance(formula: &SatFormula) -> Instance {
    build(formula).0
}

/// Feasible robust flow built from a satisfying assignment. Each clause is
/// served by the lowest-position true literal.
pub fn sat_forward_flow(
    formula: &SatFormula,
    assignment: &[bool],
) -> Result<(Instance, RobustFlow), ReductionError> {
    if !satisfies(formula, assignment) {
        return Err(ReductionError::MalformedFlow(
            "assignment does not satisfy the formula".into(),
        ));
    }
    let (g, arcs) = build(formula);
    let n = formula.variables;
    let mut flow = RobustFlow::zero(&g);
    let mut add = |lambda: usize, path: &[ArcIdx]| {
        for &a in path {
            flow.per_scenario[lambda][a] += 1;
        }
    };
    for (i, pair) in arcs.literals.iter().enumerate() {
        let chosen = if assignment[i] { 0 } else { 1 };
        add(0, &pair[chosen].path);
    }
    add(0, &arcs.tilde);

    let designated: Vec<usize> = formula
        .clauses
        .iter()
        .map(|c| {
            c.iter()
                .position(|&l| literal_true(l, assignment))
                .expect("satisfied")
        })
        .collect();
    let mut spare = 0;
    for (i, pair) in arcs.literals.iter().enumerate() {
        let gadget = &pair[if assignment[i] { 0 } else { 1 }];
        for k in 0..2 {
            let (j, pos) = gadget.occurrence[k];
            let head = [gadget.entry[k], gadget.literal[k]];
            if designated[j] == pos {
                add(1, &head);
                add(
                    1,
                    &[
                        gadget.to_clause[k],
                        arcs.clause_out[j],
                        arcs.tilde[2 * j + 3],
                        arcs.to_z[j + 1],
                    ],
                );
            } else {
                add(1, &head);
                add(1, &[gadget.to_t[k]]);
                let l = formula.clauses.len() + spare + 1;
                add(1, &[arcs.t_out[spare], arcs.tilde[2 * l + 1], arcs.to_z[l]]);
                spare += 1;
            }
        }
    }
    add(1, &[arcs.extra[0], arcs.tilde[1], arcs.to_z[0]]);
    add(1, &[arcs.extra[1], arcs.tilde[4 * n + 3]]);
    Ok((g, flow))
}

/// Reads x_i = true when scenario 1 walks the positive literal path of
/// variable i, false when it walks the negative one.
pub fn extract_assignment(
    formula: &SatFormula,
    instance: &Instance,
    flow: &RobustFlow,
) -> Result<Vec<bool>, ReductionError> {
    let (g, arcs) = build(formula);
    if g != *instance {
        return Err(ReductionError::MalformedFlow(
            "instance is not the construction of this formula".into(),
        ));
    }
    if let Some(v) = validate_robust_flow(instance, flow).violations.first() {
        return Err(ReductionError::MalformedFlow(format!(
            "flow is infeasible: {v}"
        )));
    }
    let on = |path: &[ArcIdx]| path.iter().all(|&a| flow.get(0, a) == 1);
    let off = |path: &[ArcIdx]| path.iter().all(|&a| flow.get(0, a) == 0);
    if !on(&arcs.tilde) {
        return Err(ReductionError::MalformedFlow(
            "scenario 1 does not follow the closing path".into(),
        ));
    }
    arcs.literals
        .iter()
        .enumerate()
        .map(|(i, pair)| match (on(&pair[0].path), on(&pair[1].path)) {
            (true, false) if off(&pair[1].path) => Ok(true),
            (false, true) if off(&pair[0].path) => Ok(false),
            _ => Err(ReductionError::MalformedFlow(format!(
                "scenario 1 does not take exactly one literal path of x{}",
                i + 1
            ))),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sat_example() -> SatFormula {
        SatFormula::new(3, vec![[1, 2, -3], [1, -2, 3], [-1, 2, 3], [-1, -2, -3]]).unwrap()
    }

    fn unsat_example() -> SatFormula {
        SatFormula::new(3, vec![[1, 1, 3], [-1, -1, 3], [2, 2, -3], [-2, -2, -3]]).unwrap()
    }

    #[test]
    fn sizes() {
        let g = sat_reduction_instance(&sat_example());
        assert_eq!(g.vertex_count(), 13 * 3 + 4 + 6);
        assert_eq!(g.arc_count(), 30 * 3 + 7);
        assert_eq!(g.fixed_arcs().len(), 6 * 3 + 2);
        assert_eq!(g.sources(), vec![g.vertex("v1").unwrap()]);
        assert_eq!(g.sinks(), vec![g.vertex("z").unwrap()]);
        assert!(crate::graph::is_acyclic(&g));
    }

    #[test]
    fn rejects_non_b2() {
        assert!(matches!(
            SatFormula::new(3, vec![[1, 2, 3], [1, 2, 3], [1, 2, 3], [-1, -2, -3]]),
            Err(ReductionError::NotB2(_))
        ));
        assert!(matches!(
            SatFormula::new(1, vec![[1, 2, -1]]),
            Err(ReductionError::NotB2(_))
        ));
    }

    #[test]
    fn brute_force() {
        assert!(brute_force_sat(&unsat_example()).is_none());
        let a = brute_force_sat(&sat_example()).unwrap();
        assert!(satisfies(&sat_example(), &a));
    }

    #[test]
    fn forward_then_backward() {
        let f = sat_example();
        for m in 0u32..8 {
            let a: Vec<bool> = (0..3).map(|i| m >> i & 1 == 1).collect();
            if !satisfies(&f, &a) {
                assert!(sat_forward_flow(&f, &a).is_err());
                continue;
            }
            let (g, flow) = sat_forward_flow(&f, &a).unwrap();
            assert!(validate_robust_flow(&g, &flow).is_ok(), "{a:?}");
            assert_eq!(extract_assignment(&f, &g, &flow).unwrap(), a);
        }
    }

    #[test]
    fn feasibility_follows_satisfiability() {
        let opt = crate::oracle::brute_force_optimal(&sat_reduction_instance(&sat_example()), None)
            .unwrap();
        assert_eq!(opt.cost, 0);
        assert!(crate::oracle::brute_force_optimal(
            &sat_reduction_instance(&unsat_example()),
            None
        )
        .is_err());
    }

    #[test]
    fn positive_path_reads_true() {
        let f = sat_example();
        let (g, flow) = sat_forward_flow(&f, &[true, true, false]).unwrap();
        assert!(extract_assignment(&f, &g, &flow).unwrap()[0]);
    }
}
