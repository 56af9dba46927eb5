//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.
//!
//! Run with `cargo test -p qpath-core --test acceptance`.

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use qpath_core::cube::{self, Vertex};
use qpath_core::decompose::{
    check_divisibility, decompose, decompose_plan, power2_plan, power2_plan_at, Decomposition, Plan,
};
use qpath_core::dvop::{dvop_for, dvop_kind, dvop_mid, dvop_wide};
use qpath_core::ham::{self, g_eval, g_inverse, rho1, rho2, CycleIndex};
use qpath_core::transforms::{
    sharp_family, stretch_decomposition, Embedding, SharpVertex, StretchedVertex,
};
use qpath_core::verify::{
    brute_force_decompose, verify_decomposition, verify_dvop, Coverage, DvopCheck,
};
use qpath_core::{Error, Limits};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GRID_BUDGET: Duration = Duration::from_secs(30);
const LARGE_BUDGET: Duration = Duration::from_secs(300);
const MEMORY_BUDGET_KIB: u64 = 2 * 1024 * 1024;
const HAM_SAMPLES: u64 = 100_000;
const DVOP_SAMPLES: u64 = 10_000;
const SEED: u64 = 20_240_617;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Edge key independent of the library's edge indexing.
fn key(a: Vertex, b: Vertex) -> Option<u128> {
    ((a ^ b).count_ones() == 1).then(|| ((a.min(b) as u128) << 64) | a.max(b) as u128)
}

/// Sort-and-compare check that `d` is a `P_m` decomposition of `Q_q`.
fn independent_check(d: &Decomposition) -> Result<u64, String> {
    let (q, m) = (d.dim(), d.path_len() as usize);
    let mut keys = Vec::new();
    let mut paths = 0u64;
    let mut err = None;
    d.for_each_path(&mut |p| {
        paths += 1;
        if err.is_some() {
            return;
        }
        let distinct: HashSet<_> = p.iter().collect();
        if p.len() != m + 1 || distinct.len() != p.len() || p.iter().any(|&v| v >> q != 0) {
            err = Some(format!("bad path {p:x?}"));
            return;
        }
        for w in p.windows(2) {
            match key(w[0], w[1]) {
                Some(k) => keys.push(k),
                None => err = Some(format!("non-adjacent step in {p:x?}")),
            }
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    let total = keys.len();
    keys.sort_unstable();
    keys.dedup();
    ensure(keys.len() == total, || "repeated edge".into())?;
    ensure(total as u128 == cube::edge_count(q), || {
        format!("{total} edges cover only part of Q_{q}")
    })?;
    Ok(paths)
}

fn check_case(m: u64, q: u64, limits: &Limits) -> Result<(), String> {
    let d = decompose(m, q, limits).map_err(|e| format!("decompose({m},{q}): {e}"))?;
    let report = verify_decomposition(&d, limits).map_err(|e| e.to_string())?;
    ensure(report.ok, || {
        format!("verifier rejected ({m},{q}): {report}")
    })?;
    let expected = (q as u128) << (q - 1);
    ensure(expected.is_multiple_of(m as u128), || "bad grid".into())?;
    let expected = (expected / m as u128) as u64;
    ensure(report.paths_seen == expected, || {
        format!(
            "({m},{q}): {} paths, expected {expected}",
            report.paths_seen
        )
    })?;
    let independent = independent_check(&d).map_err(|e| format!("({m},{q}): {e}"))?;
    ensure(independent == expected, || {
        format!("({m},{q}): independent count {independent}")
    })
}

fn valid_ms(q: u64) -> Vec<u64> {
    (1..=q)
        .filter(|m| ((q as u128) << (q - 1)).is_multiple_of(*m as u128))
        .collect()
}

fn criterion_1() -> Outcome {
    let limits = Limits::default();
    let start = Instant::now();
    let mut cases = 0;
    for q in (1..=13u64).step_by(2) {
        for m in valid_ms(q) {
            check_case(m, q, &limits)?;
            cases += 1;
        }
    }
    let d = decompose(6, 9, &limits).map_err(|e| e.to_string())?;
    ensure(d.path_count() == 384, || {
        "q=9, m=6 must give 384 paths".into()
    })?;
    let elapsed = start.elapsed();
    ensure(elapsed < GRID_BUDGET, || format!("took {elapsed:.1?}"))?;
    Ok(format!(
        "{cases} (m,q) cases verified in {elapsed:.2?} (< {GRID_BUDGET:?})"
    ))
}

fn peak_rss_kib() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    line.split_whitespace().nth(1)?.parse().ok()
}

fn criterion_2() -> Outcome {
    let limits = Limits::default();
    let start = Instant::now();
    let mut cases = 0;
    for q in [15u64, 17, 19] {
        for m in valid_ms(q) {
            check_case(m, q, &limits)?;
            cases += 1;
        }
    }
    let d = decompose(16, 17, &limits).map_err(|e| e.to_string())?;
    ensure(d.path_count() == 69632, || {
        format!("(16,17) gave {} paths", d.path_count())
    })?;

    // The route through 1#Q_16 with the half and mid path systems.
    let plan = power2_plan_at(4, 17, 4).map_err(|e| e.to_string())?;
    ensure(
        plan == Plan::SharpBase {
            t: 4,
            s: 1,
            r: 4,
            rungs: 1,
            k_out: 8,
            k_in: 7,
        },
        || format!("unexpected Q_16 route {plan:?}"),
    )?;
    ensure(
        dvop_kind(4, 8) == Some(qpath_core::dvop::DvopKind::Half),
        || "k'=8 is not the half system".into(),
    )?;
    ensure(
        dvop_kind(4, 7) == Some(qpath_core::dvop::DvopKind::Mid),
        || "k''=7 is not the mid system".into(),
    )?;
    let d = Decomposition::from_plan(&plan, &limits).map_err(|e| e.to_string())?;
    let report = verify_decomposition(&d, &limits).map_err(|e| e.to_string())?;
    ensure(report.ok && report.paths_seen == 69632, || {
        format!("Q_16 route: {report}")
    })?;
    ensure(independent_check(&d)? == 69632, || {
        "Q_16 route: independent count".into()
    })?;

    let elapsed = start.elapsed();
    ensure(elapsed < LARGE_BUDGET, || format!("took {elapsed:.1?}"))?;
    let peak = peak_rss_kib().ok_or("cannot read VmHWM")?;
    ensure(peak < MEMORY_BUDGET_KIB, || {
        format!("peak memory {peak} KiB")
    })?;
    Ok(format!(
        "{cases} cases plus the Q_16 route, 69632 paths for (16,17), {elapsed:.1?} (< {LARGE_BUDGET:?}), peak {} MiB (< 2048 MiB)",
        peak / 1024
    ))
}

fn criterion_3() -> Outcome {
    let expected_edges = [4u128, 32, 1024, 524_288];
    for r in 1..=4u32 {
        let q = 1u32 << r;
        let cycles = ham::ham_decomposition(r).map_err(|e| e.to_string())?;
        ensure(cycles.len() == 1 << (r - 1), || {
            format!("r={r}: {} cycles", cycles.len())
        })?;
        let mut keys = Vec::new();
        for c in &cycles {
            let v = c.verts();
            ensure(v.len() as u64 == 1u64 << q, || {
                format!("r={r}: cycle is not Hamiltonian")
            })?;
            let distinct: HashSet<_> = v.iter().collect();
            ensure(distinct.len() == v.len(), || {
                format!("r={r}: cycle repeats a vertex")
            })?;
            for i in 0..v.len() {
                keys.push(
                    key(v[i], v[(i + 1) % v.len()])
                        .ok_or_else(|| format!("r={r}: non-adjacent step"))?,
                );
            }
        }
        let total = keys.len();
        keys.sort_unstable();
        keys.dedup();
        ensure(keys.len() == total, || {
            format!("r={r}: cycles share an edge")
        })?;
        ensure(
            total as u128 == cube::edge_count(q) && total as u128 == expected_edges[r as usize - 1],
            || format!("r={r}: {total} edges"),
        )?;
    }
    // r = 5: sampled positions on every cycle.
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for c in CycleIndex::all(5).map_err(|e| e.to_string())? {
        for _ in 0..HAM_SAMPLES {
            let w: u64 = rng.gen::<u32>() as u64;
            let (x, y) = (g_eval(c, w), g_eval(c, w + 1));
            ensure((x ^ y).count_ones() == 1, || {
                format!("{c}: step {w} is not an edge")
            })?;
            ensure(g_inverse(c, x) == w, || {
                format!("{c}: inverse fails at {w}")
            })?;
            let (a, b) = (rho1(x, 32).unwrap(), rho1(y, 32).unwrap());
            ensure(b == (a + 1) % 4, || {
                format!("{c}: 1-value does not advance at {w}")
            })?;
        }
    }
    Ok(format!(
        "r=1..4 partition E(Q_{{2^r}}) (4, 32, 1024, 524288 edges); r=5: {HAM_SAMPLES} positions x 16 cycles"
    ))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    for r in 1..=5u32 {
        let dim = 1u32 << r;
        for c in CycleIndex::all(r).map_err(|e| e.to_string())? {
            let positions: Vec<u64> = if r <= 3 {
                (0..c.cycle_len()).collect()
            } else {
                (0..20_000)
                    .map(|_| rng.gen::<u64>() & (c.cycle_len() - 1))
                    .collect()
            };
            for w in positions {
                let v = rho1(g_eval(c, w), dim).unwrap() as u64;
                ensure(v == w % 4, || format!("1-value of {c} at {w} is {v}"))?;
            }
        }
    }
    let (g0, g1) = (
        CycleIndex::new(2, 0).unwrap(),
        CycleIndex::new(2, 1).unwrap(),
    );
    for w in 0..16u64 {
        ensure(rho2(g_eval(g0, w), 4).unwrap() as u64 == w % 16, || {
            format!("2-value of g_0({w})")
        })?;
        ensure(
            rho2(g_eval(g1, w), 4).unwrap() as u64 % 8 == (5 * w) % 8,
            || format!("2-value of g_1({w})"),
        )?;
    }
    for c in CycleIndex::all(5).map_err(|e| e.to_string())? {
        let step = if c.leading() == 0 { 1 } else { 5 };
        for _ in 0..20_000 {
            let w = rng.gen::<u32>() as u64;
            let a = rho2(g_eval(c, w), 32).unwrap();
            let b = rho2(g_eval(c, w + 1), 32).unwrap();
            ensure((b + 8 - a % 8) % 8 == step, || {
                format!("2-value step of {c} at {w}")
            })?;
        }
    }
    Ok(
        "1-value law exhaustive r<=3, sampled r=4,5; 2-value laws on Q_4; mod-8 steps +1/+5 at r=5"
            .into(),
    )
}

fn criterion_5() -> Outcome {
    let limits = Limits::default();
    let mut systems = 0;
    for r in 1..=4u32 {
        for k in 0..=1u32 << (r - 1) {
            if dvop_kind(r, k).is_none() {
                continue;
            }
            let d = dvop_for(r, k).map_err(|e| e.to_string())?;
            let report =
                verify_dvop(&d, &DvopCheck::default(), &limits).map_err(|e| e.to_string())?;
            ensure(report.ok && report.coverage == Coverage::Exhaustive, || {
                format!("r={r} k={k}: {report}")
            })?;
            if r == 3 {
                ensure(d.complement().len() as u32 == 4 - k, || {
                    format!("Q_8, k={k}: complement")
                })?;
            }
            systems += 1;
        }
    }
    let mid_offsets = [0, 1, 0, 1, 2, 3, 2, 3];
    let mid = dvop_mid(4, 7).map_err(|e| e.to_string())?;
    let mut buf = Vec::new();
    for v in 0..1u64 << 16 {
        mid.path_into(v, &mut buf);
        let nu = rho1(v, 16).unwrap();
        for (x, o) in buf.iter().zip(mid_offsets) {
            ensure(rho1(*x, 16).unwrap() == (nu + o) % 4, || {
                format!("mid trace at {v:x}")
            })?;
        }
    }

    let wide = dvop_wide(5, 15).map_err(|e| e.to_string())?;
    let check = DvopCheck {
        samples: Some(DVOP_SAMPLES),
        seed: SEED,
    };
    let report = verify_dvop(&wide, &check, &limits).map_err(|e| e.to_string())?;
    ensure(report.ok && report.paths_seen >= DVOP_SAMPLES, || {
        format!("wide: {report}")
    })?;
    let mid5 = dvop_mid(5, 7).map_err(|e| e.to_string())?;
    let report = verify_dvop(&mid5, &check, &limits).map_err(|e| e.to_string())?;
    ensure(report.ok, || format!("mid at r=5: {report}"))?;
    let wide_offsets = [0, 1, 0, 1, 2, 7, 2, 7, 4, 5, 4, 5, 6, 3, 6, 3];
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for _ in 0..DVOP_SAMPLES {
        let v = rng.gen::<u32>() as u64;
        wide.path_into(v, &mut buf);
        ensure(
            buf[0] == v && buf.iter().collect::<HashSet<_>>().len() == 16,
            || format!("wide path of {v:x}"),
        )?;
        let nu = rho2(v, 32).unwrap() % 8;
        for (x, o) in buf.iter().zip(wide_offsets) {
            ensure(rho2(*x, 32).unwrap() % 8 == (nu + o) % 8, || {
                format!("wide trace at {v:x}")
            })?;
        }
        mid5.path_into(v, &mut buf);
        let nu = rho1(v, 32).unwrap();
        for (x, o) in buf.iter().zip(mid_offsets) {
            ensure(rho1(*x, 32).unwrap() == (nu + o) % 4, || {
                format!("mid trace at {v:x} (r=5)")
            })?;
        }
    }
    Ok(format!(
        "{systems} systems exhaustive for r<=4; mid 1-value trace on all of Q_16; wide sampled on {DVOP_SAMPLES} vertices"
    ))
}

/// Image edges of every map in a family, checked against `E(Q_target)`.
fn family_covers<E: Embedding>(
    family: &[E],
    source_edges: &[(E::Source, E::Source)],
) -> Result<(), String> {
    let target = family[0].target_dim();
    let mut keys = Vec::new();
    for map in family {
        for &(a, b) in source_edges {
            keys.push(key(map.eval(a), map.eval(b)).ok_or("an edge maps to a non-edge")?);
        }
    }
    let total = keys.len();
    keys.sort_unstable();
    keys.dedup();
    ensure(keys.len() == total, || {
        "two source edges share an image".into()
    })?;
    ensure(total as u128 == cube::edge_count(target), || {
        format!("{total} of {} edges", cube::edge_count(target))
    })
}

fn criterion_6() -> Outcome {
    let limits = Limits::default();
    for (m, q) in [(2u32, 2u32), (2, 3), (3, 2), (3, 3), (5, 2), (6, 1), (4, 2)] {
        let family = stretch_decomposition(m, q, &limits).map_err(|e| e.to_string())?;
        ensure(family.len() as u64 == 1 << (m * q - q), || {
            format!("{m}*Q_{q}: {} maps", family.len())
        })?;
        let mut edges = Vec::new();
        for v in 0..1u64 << q {
            for j in 0..q {
                if v >> j & 1 == 0 {
                    for k in 1..=m {
                        edges.push((
                            StretchedVertex::on_edge(m, v, j, k - 1),
                            StretchedVertex::on_edge(m, v, j, k),
                        ));
                    }
                }
            }
        }
        family_covers(&family, &edges).map_err(|e| format!("{m}*Q_{q}: {e}"))?;
    }
    for (m, q) in [(1u32, 4u32), (3, 4), (5, 4), (7, 4), (3, 2)] {
        let family: Vec<_> = sharp_family(m, q).map_err(|e| e.to_string())?.collect();
        ensure(family.len() == 1 << (m - 1), || {
            format!("{m}#Q_{q}: {} maps", family.len())
        })?;
        let mut edges = Vec::new();
        for v in 0..1u64 << q {
            for j in 0..q {
                let w = v ^ (1 << j);
                if v < w {
                    edges.push((SharpVertex::Prime(v), SharpVertex::Prime(w)));
                    edges.push((SharpVertex::DoublePrime(v), SharpVertex::DoublePrime(w)));
                }
            }
            for j in 1..=m {
                edges.push((SharpVertex::at(m, v, j - 1), SharpVertex::at(m, v, j)));
            }
        }
        family_covers(&family, &edges).map_err(|e| format!("{m}#Q_{q}: {e}"))?;
    }
    Ok("7 stretch families and 5 sharp families partition their target cubes".into())
}

fn criterion_7() -> Outcome {
    let limits = Limits::default();
    for q in [1u32, 3] {
        for m in 1..=2 * q {
            let condition = check_divisibility(m as u64, q as u64).map_err(|e| e.to_string())?;
            let witness = brute_force_decompose(q, m).map_err(|e| e.to_string())?;
            ensure(witness.is_some() == condition, || {
                format!("oracle disagrees at q={q}, m={m}")
            })?;
            let built = decompose(m as u64, q as u64, &limits);
            ensure(built.is_ok() == condition, || {
                format!("pipeline disagrees at q={q}, m={m}")
            })?;
            if let Some(paths) = witness {
                let d = Decomposition::from_paths(q, m, paths).map_err(|e| e.to_string())?;
                independent_check(&d).map_err(|e| format!("oracle witness q={q} m={m}: {e}"))?;
            }
        }
    }
    let w = brute_force_decompose(3, 2)
        .map_err(|e| e.to_string())?
        .ok_or("no P_2 witness in Q_3")?;
    ensure(w.len() == 6, || "P_2 witness size".into())?;
    Ok(
        "q in {1,3}, m <= 2q: oracle, condition and pipeline agree; P_2 in Q_3 witness found"
            .into(),
    )
}

fn check_sharp_level5(plan: &Plan, t: u32) -> Result<(), String> {
    let base = match plan {
        Plan::Stride { r, base, .. } => {
            ensure(*r == 5, || format!("t={t}: stride level {r}"))?;
            base.as_ref()
        }
        p => p,
    };
    match *base {
        Plan::SharpBase {
            r: 5, k_out, k_in, ..
        } => {
            // Point-wise constructibility of the two path systems on Q_32.
            for k in [k_out, k_in] {
                let d = dvop_for(5, k).map_err(|e| e.to_string())?;
                let p = d.path_of(0x8765_4321).map_err(|e| e.to_string())?;
                ensure(p.len() == k as usize, || format!("t={t}: path length"))?;
            }
            Ok(())
        }
        ref p => Err(format!("t={t}: base is {p:?}")),
    }
}

fn criterion_8() -> Outcome {
    let limits = Limits::default();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut plans = 0;
    for t in 16..32u32 {
        let low = (1u64 << t) + 1;
        let high = (1u64 << 32) - 1;
        let mut qs: Vec<u64> = (0..16).map(|s| low + 2 * s).collect();
        qs.extend((0..24).map(|_| rng.gen_range(low..=high) | 1));
        qs.push(high);
        for q in qs {
            let plan = power2_plan(t, q).map_err(|e| format!("t={t} q={q}: {e}"))?;
            plan.validate().map_err(|e| format!("t={t} q={q}: {e}"))?;
            ensure(plan.dim() == q && plan.path_len() == 1 << t, || {
                format!("t={t} q={q}: shape")
            })?;
            check_sharp_level5(&plan, t)?;
            let refused = matches!(
                Decomposition::from_plan(&plan, &limits),
                Err(Error::ResourceLimit { .. })
            );
            ensure(refused, || format!("t={t} q={q}: emission was not refused"))?;
            plans += 1;
        }
    }
    // Plans for arbitrary (m, q) with q < 2^32.
    for _ in 0..2000 {
        let q = rng.gen_range(1..(1u64 << 32)) | 1;
        let d = {
            let divs: Vec<u64> = (1..=64).filter(|d| q % d == 0).collect();
            divs[rng.gen_range(0..divs.len())]
        };
        let t = rng.gen_range(0..32u32);
        let m = d << t;
        let condition = check_divisibility(m, q).map_err(|e| e.to_string())?;
        match decompose_plan(m, q) {
            Ok(plan) => {
                ensure(condition, || format!("plan for impossible ({m},{q})"))?;
                ensure(plan.dim() == q && plan.path_len() == m, || {
                    format!("({m},{q}): shape")
                })?;
                plans += 1;
            }
            Err(Error::NotDivisible { .. }) => {
                ensure(!condition, || format!("({m},{q}) wrongly refused"))?
            }
            Err(e) => return Err(format!("({m},{q}): {e}")),
        }
    }
    Ok(format!(
        "{plans} plans well-formed for t in [16,32) and q < 2^32, none materialized"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 full grid q<=13", criterion_1),
        ("2 large odd q in {15,17,19}", criterion_2),
        ("3 Hamiltonian cycle family", criterion_3),
        ("4 value laws", criterion_4),
        ("5 path systems", criterion_5),
        ("6 stretch and sharp families", criterion_6),
        ("7 oracle equivalence", criterion_7),
        ("8 plan validity beyond desk scale", criterion_8),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        match run() {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why}");
            }
        }
        eprintln!("  [{name}: {:.2?}]", start.elapsed());
    }
    if failed == 0 {
        println!("acceptance: all 8 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of 8 criteria failed");
        ExitCode::FAILURE
    }
}
