//! The maximum split instance: a chain of fixed cross arcs with detours to
//! one sink and shortcuts to another, whose optimum encodes a pair partition.

use serde::Serialize;

use super::{PairPartitionInstance, ReductionError};
use crate::instance::{
    robust_cost, validate_robust_flow, Arc, ArcIdx, ArcKind, Instance, RobustFlow, Scenario,
};

/// The generated instance together with the role of every arc.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxSplitLayout {
    pub pairs: PairPartitionInstance,
    pub instance: Instance,
    /// Detour arcs 1..=2n, the last one entering the first sink.
    pub detour: Vec<ArcIdx>,
    /// Cross arcs 1..2n; exactly the fixed arcs.
    pub cross: Vec<ArcIdx>,
    /// Shortcut arcs 1..=2n, all entering the second sink.
    pub shortcut: Vec<ArcIdx>,
    pub blocked: ArcIdx,
    pub n: usize,
    pub w: i64,
    /// Free-arc multiplier 2^(n+1) - n - 2.
    pub f: i64,
}

fn pow2(k: usize) -> Result<i128, ReductionError> {
    2i128
        .checked_pow(k as u32)
        .ok_or(ReductionError::FormulaOverflow)
}

fn to_i64(x: Option<i128>) -> Result<i64, ReductionError> {
    x.and_then(|v| i64::try_from(v).ok())
        .ok_or(ReductionError::FormulaOverflow)
}

fn multiplier(n: usize) -> Result<i128, ReductionError> {
    Ok(pow2(n + 1)? - n as i128 - 2)
}

/// Cost carried by the cross arcs in every optimal robust flow:
/// `n·w·(2^(n-1)·n − 2^n + 1)`.
pub fn fixed_arc_cost(n: usize, w: i64) -> Result<i64, ReductionError> {
    let inner = pow2(n - 1)?
        .checked_mul(n as i128)
        .and_then(|x| x.checked_sub(pow2(n).ok()?))
        .map(|x| x + 1);
    to_i64(inner.and_then(|x| x.checked_mul(n as i128)?.checked_mul(w as i128)))
}

/// Yes-instances and only they admit a robust flow of at most this cost.
pub fn beta_threshold(pp: &PairPartitionInstance) -> Result<i64, ReductionError> {
    let n = pp.n();
    if n < 2 {
        return Err(ReductionError::TooFewPairs(n));
    }
    let w = pp.w() as i128;
    let fixed = fixed_arc_cost(n, pp.w())? as i128;
    let free = multiplier(n)?
        .checked_mul(n as i128)
        .and_then(|x| x.checked_mul(w));
    to_i64(free.and_then(|x| x.checked_add(fixed)?.checked_add(w)))
}

pub fn max_split_instance(pp: &PairPartitionInstance) -> Result<MaxSplitLayout, ReductionError> {
    let n = pp.n();
    if n < 2 {
        return Err(ReductionError::TooFewPairs(n));
    }
    let s: Vec<i128> = pp.integers().iter().map(|&x| x as i128).collect();
    let si = |i: usize| s[i - 1];
    let w = pp.w() as i128;
    let nw = (n as i128)
        .checked_mul(w)
        .ok_or(ReductionError::FormulaOverflow)?;
    let f = multiplier(n)?;
    let fw = f.checked_mul(w).ok_or(ReductionError::FormulaOverflow)?;

    let mut vertices = vec!["s".to_string()];
    vertices.extend((1..2 * n).map(|i| format!("v{i}")));
    vertices.push("t1".into());
    vertices.push("t2".into());
    let (t1, t2) = (2 * n, 2 * n + 1);

    let mut arcs = Vec::with_capacity(6 * n);
    let mut layout_detour = Vec::new();
    let mut layout_cross = Vec::new();
    let mut layout_shortcut = Vec::new();
    let push = |arcs: &mut Vec<Arc>,
                id: String,
                tail,
                head,
                cost: Option<i128>,
                kind|
     -> Result<ArcIdx, ReductionError> {
        arcs.push(Arc {
            id,
            tail,
            head,
            cost: to_i64(cost)?,
            kind,
        });
        Ok(arcs.len() - 1)
    };
    for i in 1..=2 * n {
        let tail = i - 1;
        let detour_cost = if i == 2 * n {
            si(i).checked_add(nw)
        } else if i % 2 == 1 {
            Some(si(i) - si(i + 1))
        } else {
            pow2(n - i / 2)?
                .checked_mul(nw)
                .and_then(|x| x.checked_add(si(i) - si(i + 1)))
        };
        let head = if i == 2 * n { t1 } else { i };
        layout_detour.push(push(
            &mut arcs,
            format!("detour{i}"),
            tail,
            head,
            detour_cost,
            ArcKind::Free,
        )?);
        if i < 2 * n {
            let cross_cost = if i % 2 == 1 {
                Some(0)
            } else {
                pow2(n - i / 2 - 1)?.checked_mul(nw)
            };
            layout_cross.push(push(
                &mut arcs,
                format!("cross{i}"),
                tail,
                i,
                cross_cost,
                ArcKind::Fixed,
            )?);
        }
        let partner = if i % 2 == 1 { si(i + 1) } else { si(i - 1) };
        layout_shortcut.push(push(
            &mut arcs,
            format!("shortcut{i}"),
            tail,
            t2,
            fw.checked_add(partner),
            ArcKind::Free,
        )?);
    }
    let blocked_cost = pow2(n + 1)?
        .checked_mul(n as i128)
        .and_then(|x| x.checked_mul(nw));
    let blocked = push(
        &mut arcs,
        "blocked".into(),
        t1,
        t2,
        blocked_cost,
        ArcKind::Free,
    )?;

    let supply = n as i64;
    let mut b1 = vec![0; 2 * n + 2];
    b1[0] = supply;
    b1[t1] = -supply;
    let mut b2 = vec![0; 2 * n + 2];
    b2[0] = supply;
    b2[t2] = -supply;
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
    let instance = Instance::new(vertices, arcs, scenarios)?;
    Ok(MaxSplitLayout {
        pairs: pp.clone(),
        instance,
        detour: layout_detour,
        cross: layout_cross,
        shortcut: layout_shortcut,
        blocked,
        n,
        w: pp.w(),
        f: to_i64(Some(f))?,
    })
}

impl MaxSplitLayout {
    fn s(&self, i: usize) -> i128 {
        self.pairs.integers()[i - 1] as i128
    }

    /// Closed-form cost of the i-th first-scenario path (cross arcs up to
    /// i-1, then detours to the first sink).
    pub fn first_path_cost(&self, i: usize) -> i128 {
        let (n, q) = (self.n, i.div_ceil(2));
        let nw = (n as i128) * self.w as i128;
        nw * ((1i128 << (n - q)) + (1i128 << (n - 1)) - 1) + self.s(i)
    }

    /// Closed-form cost of the i-th second-scenario path (cross arcs up to
    /// i-1, then one shortcut).
    pub fn second_path_cost(&self, i: usize) -> i128 {
        let (n, q) = (self.n, i.div_ceil(2));
        let nw = (n as i128) * self.w as i128;
        let partner = if i % 2 == 1 {
            self.s(i + 1)
        } else {
            self.s(i - 1)
        };
        nw * ((1i128 << (n - 1)) - (1i128 << (n - q))) + partner + self.f as i128 * self.w as i128
    }

    /// Arcs of the i-th path of scenario 1 (`second == false`) or 2.
    pub fn path_arcs(&self, i: usize, second: bool) -> Vec<ArcIdx> {
        let mut arcs: Vec<ArcIdx> = self.cross[..i - 1].to_vec();
        if second {
            arcs.push(self.shortcut[i - 1]);
        } else {
            arcs.extend_from_slice(&self.detour[i - 1..]);
        }
        arcs
    }

    fn arc_sum(&self, arcs: &[ArcIdx]) -> i128 {
        arcs.iter()
            .map(|&a| self.instance.arc(a).cost as i128)
            .sum()
    }

    /// Units per path family read off the cross arcs of scenario `lambda`:
    /// path i carries what enters cross arc i-1 minus what enters cross arc i.
    fn path_flows(&self, flow: &RobustFlow, lambda: usize) -> Vec<i64> {
        let n = self.n as i64;
        let cross = |j: usize| -> i64 {
            if j == 0 {
                n
            } else if j == 2 * self.n {
                0
            } else {
                flow.get(lambda, self.cross[j - 1])
            }
        };
        (1..=2 * self.n).map(|i| cross(i - 1) - cross(i)).collect()
    }
}

/// Robust flow of the forward direction: for pair i, one unit travels the
/// paths of index 2i-1 when `choice[i]` holds and 2i otherwise.
pub fn max_split_flow(layout: &MaxSplitLayout, choice: &[bool]) -> RobustFlow {
    let mut flow = RobustFlow::zero(&layout.instance);
    for (pair, &first) in choice.iter().enumerate() {
        let i = if first { 2 * pair + 1 } else { 2 * pair + 2 };
        for (lambda, second) in [(0, false), (1, true)] {
            for a in layout.path_arcs(i, second) {
                flow.per_scenario[lambda][a] += 1;
            }
        }
    }
    flow
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructureCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub checks: Vec<StructureCheck>,
}

impl StructureReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&StructureCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn check(name: &str, failures: Vec<String>) -> StructureCheck {
    StructureCheck {
        name: name.to_string(),
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            "ok".into()
        } else {
            failures.join("; ")
        },
    }
}

pub const CHECK_MONOTONE: &str = "monotone-fixed-flow";
pub const CHECK_FIXED_COST: &str = "fixed-arc-cost";
pub const CHECK_FIXED_VALUES: &str = "fixed-arc-values";
pub const CHECK_PATHS: &str = "one-path-of-a-pair";
pub const CHECK_PATH_COSTS: &str = "path-costs";

/// Tests a flow against the shape every optimal flow must have.
pub fn check_max_split_structure(layout: &MaxSplitLayout, flow: &RobustFlow) -> StructureReport {
    let g = &layout.instance;
    let n = layout.n;
    if flow.per_scenario.len() != 2 || flow.per_scenario.iter().any(|f| f.len() != g.arc_count()) {
        let names = [
            CHECK_MONOTONE,
            CHECK_FIXED_COST,
            CHECK_FIXED_VALUES,
            CHECK_PATHS,
            CHECK_PATH_COSTS,
        ];
        return StructureReport {
            checks: names
                .iter()
                .map(|n| check(n, vec!["flow shape does not match".into()]))
                .collect(),
        };
    }
    let fx = |lambda: usize, j: usize| flow.get(lambda, layout.cross[j - 1]);
    let mut checks = Vec::new();

    let mut bad = Vec::new();
    for j in 1..2 * n {
        if fx(0, j) != fx(1, j) {
            bad.push(format!("cross{j} differs across scenarios"));
        }
        if j + 1 < 2 * n && (fx(0, j) < fx(0, j + 1) || fx(1, j) < fx(1, j + 1)) {
            bad.push(format!("cross{j} carries less than cross{}", j + 1));
        }
    }
    checks.push(check(CHECK_MONOTONE, bad));

    let target = fixed_arc_cost(n, layout.w).map(|x| x as i128);
    let mut bad = Vec::new();
    for lambda in 0..2 {
        let cost: i128 = layout
            .cross
            .iter()
            .map(|&a| g.arc(a).cost as i128 * flow.get(lambda, a) as i128)
            .sum();
        match &target {
            Ok(t) if *t == cost => {}
            Ok(t) => bad.push(format!(
                "scenario {} fixed cost {cost}, expected {t}",
                lambda + 1
            )),
            Err(e) => bad.push(e.to_string()),
        }
    }
    checks.push(check(CHECK_FIXED_COST, bad));

    let mut bad = Vec::new();
    for i in 1..=n {
        let hi = (n - i + 1) as i64;
        for lambda in 0..2 {
            let odd = fx(lambda, 2 * i - 1);
            if odd != hi && odd != hi - 1 {
                bad.push(format!(
                    "scenario {}: cross{} = {odd}",
                    lambda + 1,
                    2 * i - 1
                ));
            }
            if i < n && fx(lambda, 2 * i) != hi - 1 {
                bad.push(format!(
                    "scenario {}: cross{} = {}",
                    lambda + 1,
                    2 * i,
                    fx(lambda, 2 * i)
                ));
            }
        }
    }
    checks.push(check(CHECK_FIXED_VALUES, bad));

    let p1 = layout.path_flows(flow, 0);
    let p2 = layout.path_flows(flow, 1);
    let mut bad = Vec::new();
    if p1 != p2 {
        bad.push("path flows differ across scenarios".into());
    }
    let mut detour_expected = 0i64;
    for i in 1..=2 * n {
        detour_expected += p1[i - 1];
        if flow.get(0, layout.detour[i - 1]) != detour_expected {
            bad.push(format!(
                "scenario 1: detour{i} does not match the path flows"
            ));
        }
        if flow.get(0, layout.shortcut[i - 1]) != 0 {
            bad.push(format!("scenario 1 uses shortcut{i}"));
        }
        if flow.get(1, layout.detour[i - 1]) != 0 {
            bad.push(format!("scenario 2 uses detour{i}"));
        }
        if flow.get(1, layout.shortcut[i - 1]) != p2[i - 1] {
            bad.push(format!(
                "scenario 2: shortcut{i} does not match the path flows"
            ));
        }
    }
    for lambda in 0..2 {
        if flow.get(lambda, layout.blocked) != 0 {
            bad.push(format!("scenario {} uses the blocked arc", lambda + 1));
        }
    }
    for i in 0..n {
        for (lambda, p) in [(1, &p1), (2, &p2)] {
            let (a, b) = (p[2 * i], p[2 * i + 1]);
            if !(a == 0 && b == 1 || a == 1 && b == 0) {
                bad.push(format!(
                    "scenario {lambda}: pair {} carries ({a}, {b})",
                    i + 1
                ));
            }
        }
    }
    let paths_ok = bad.is_empty();
    checks.push(check(CHECK_PATHS, bad));

    let mut bad = Vec::new();
    for i in 1..=2 * n {
        let c1 = layout.arc_sum(&layout.path_arcs(i, false));
        if c1 != layout.first_path_cost(i) {
            bad.push(format!(
                "first-scenario path {i} costs {c1}, closed form {}",
                layout.first_path_cost(i)
            ));
        }
        let c2 = layout.arc_sum(&layout.path_arcs(i, true));
        if c2 != layout.second_path_cost(i) {
            bad.push(format!(
                "second-scenario path {i} costs {c2}, closed form {}",
                layout.second_path_cost(i)
            ));
        }
    }
    if paths_ok {
        for (lambda, p) in [(0, &p1), (1, &p2)] {
            let by_paths: i128 = (1..=2 * n)
                .map(|i| {
                    let c = if lambda == 0 {
                        layout.first_path_cost(i)
                    } else {
                        layout.second_path_cost(i)
                    };
                    c * p[i - 1] as i128
                })
                .sum();
            let direct: i128 = g
                .arcs()
                .iter()
                .enumerate()
                .map(|(a, arc)| arc.cost as i128 * flow.get(lambda, a) as i128)
                .sum();
            if by_paths != direct {
                bad.push(format!(
                    "scenario {} costs {direct}, paths sum to {by_paths}",
                    lambda + 1
                ));
            }
        }
    } else {
        bad.push("no path decomposition to price".into());
    }
    checks.push(check(CHECK_PATH_COSTS, bad));
    StructureReport { checks }
}

/// Moves flow from each odd detour arc onto the parallel cross arc when the
/// pair is tied (equal integers make both arcs cost nothing), by the amount
/// every scenario has on that detour. Cost and feasibility are unchanged.
pub fn normalize_ties(layout: &MaxSplitLayout, flow: &RobustFlow) -> RobustFlow {
    let mut out = flow.clone();
    let g = &layout.instance;
    for i in (1..2 * layout.n).step_by(2) {
        let (d, c) = (layout.detour[i - 1], layout.cross[i - 1]);
        if g.arc(d).cost != g.arc(c).cost {
            continue;
        }
        let shift = (0..out.per_scenario.len())
            .map(|l| out.get(l, d))
            .min()
            .unwrap_or(0);
        for f in &mut out.per_scenario {
            f[d] -= shift;
            f[c] += shift;
        }
    }
    out
}

/// A separating partition: `first` and `second` hold 1-based positions into
/// s_1..s_{2n}; `choice[i]` tells whether the larger element of pair i went first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Partition {
    pub first: Vec<usize>,
    pub second: Vec<usize>,
    pub choice: Vec<bool>,
}

/// Reads the partition off a robust flow of cost at most the threshold.
/// Tied pairs are normalized first, see [`normalize_ties`].
pub fn extract_partition(
    layout: &MaxSplitLayout,
    flow: &RobustFlow,
) -> Result<Partition, ReductionError> {
    let g = &layout.instance;
    let flow = &normalize_ties(layout, flow);
    let report = validate_robust_flow(g, flow);
    if let Some(v) = report.violations.first() {
        return Err(ReductionError::NotThresholdFlow(format!(
            "flow is infeasible: {v}"
        )));
    }
    let cost = robust_cost(g, flow).map_err(|e| ReductionError::NotThresholdFlow(e.to_string()))?;
    let beta = beta_threshold(&layout.pairs)? as i128;
    if cost > beta {
        return Err(ReductionError::NotThresholdFlow(format!(
            "cost {cost} exceeds threshold {beta}"
        )));
    }
    let structure = check_max_split_structure(layout, flow);
    let paths = structure.get(CHECK_PATHS).expect("check present");
    if !paths.passed {
        return Err(ReductionError::NotThresholdFlow(paths.detail.clone()));
    }
    let p = layout.path_flows(flow, 0);
    let choice: Vec<bool> = (0..layout.n).map(|i| p[2 * i] == 1).collect();
    let first: Vec<usize> = choice
        .iter()
        .enumerate()
        .map(|(i, &c)| if c { 2 * i + 1 } else { 2 * i + 2 })
        .collect();
    let second: Vec<usize> = first
        .iter()
        .map(|&i| if i % 2 == 1 { i + 1 } else { i - 1 })
        .collect();
    let sum = |idx: &[usize]| idx.iter().map(|&i| layout.s(i)).sum::<i128>();
    if sum(&first) != layout.w as i128 || sum(&second) != layout.w as i128 {
        return Err(ReductionError::NotThresholdFlow(
            "partition sides do not sum to w".into(),
        ));
    }
    Ok(Partition {
        first,
        second,
        choice,
    })
}
