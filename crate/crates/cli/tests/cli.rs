use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use oracle::fixtures::{clustered_instance, edge, mission, node};
use oracle::{brute_force_cvpp, DEFAULT_PATH_CAP};
use platoon::netmodel::{load_instance, save_instance, ProblemInstance, RoadNetwork, SavingsParams};
use platoon::routing::{shortest_path_assignment, RouteAssignment};
use platoon::rshm::{Termination, TraceRow};
use platoon::scheduling::PlatoonConfiguration;
use platoon_cli::report::{read_result, route_fuels, RshmRecord};
use platoon_cli::{detour_vs, exit, rel_dev, ResultFile};
use proptest::prelude::*;
use tempfile::TempDir;

struct Run {
    code: u8,
    stdout: String,
    stderr: String,
}

fn cli(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("platoon").chain(args.iter().copied());
    let code = platoon_cli::run(argv, &mut out, &mut err);
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn ok(args: &[&str]) -> String {
    let r = cli(args);
    assert_eq!(r.code, exit::OK, "{args:?}: {}", r.stderr);
    r.stdout
}

fn p(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn save(dir: &TempDir, name: &str, inst: &ProblemInstance) -> PathBuf {
    let path = p(dir, name);
    save_instance(inst, &path).unwrap();
    path
}

/// Two vehicles whose only routes share one long edge.
fn shared_edge_instance() -> ProblemInstance {
    let net = RoadNetwork::new(
        (0..4).map(node).collect(),
        vec![edge(0, 2, 1.0, 1.0), edge(1, 2, 1.0, 1.0), edge(2, 3, 10.0, 2.0)],
    )
    .unwrap();
    let missions = vec![mission(1, 0, 3, 0.0, 4.0), mission(2, 1, 3, 0.5, 4.5)];
    ProblemInstance::new(net, missions, SavingsParams::default(), None).unwrap()
}

fn rshm_record(path: &Path) -> RshmRecord {
    match read_result(path).unwrap() {
        ResultFile::Rshm(r) => r,
        other => panic!("expected a heuristic result, got {:?}", other.kind()),
    }
}

#[test]
fn gen_two_cluster_validates_and_repeats_bytes() {
    let dir = TempDir::new().unwrap();
    let a = p(&dir, "a.json");
    let b = p(&dir, "b.json");
    for out in [&a, &b] {
        ok(&["gen", "--model", "two-cluster", "--n", "10", "--seed", "0", "--out", s(out)]);
    }
    let inst = load_instance(&a).unwrap();
    assert_eq!(inst.num_vehicles(), 10);
    inst.validate().unwrap();
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(inst.meta.as_ref().unwrap().model, "two-cluster");
}

#[test]
fn gen_batches_and_network_reuse() {
    let dir = TempDir::new().unwrap();
    let net = p(&dir, "net.json");
    ok(&["gen", "--model", "synthetic-net", "--rows", "5", "--cols", "5", "--seed", "3", "--out", s(&net)]);
    let base = load_instance(&net).unwrap();
    assert_eq!(base.num_vehicles(), 0);
    assert_eq!(base.meta.as_ref().unwrap().model, "synthetic-net");

    let template = p(&dir, "d{seed}.json");
    let args = [
        "gen", "--model", "distributed", "--n", "4", "--seed", "10", "--count", "3", "--jobs", "2", "--network",
        s(&net), "--out", s(&template),
    ];
    let table = ok(&args);
    assert_eq!(table.lines().count(), 4);
    for seed in 10..13 {
        let inst = load_instance(&p(&dir, &format!("d{seed}.json"))).unwrap();
        assert_eq!(inst.network, base.network);
        assert_eq!(inst.meta.as_ref().unwrap().seed, seed);
    }
    // Several outputs need a placeholder.
    let r = cli(&["gen", "--model", "distributed", "--count", "2", "--out", s(&p(&dir, "x.json"))]);
    assert_eq!(r.code, exit::USAGE);
}

#[test]
fn star_rows_never_raise_the_root_bound() {
    let dir = TempDir::new().unwrap();
    let mut added = 0;
    for seed in 0..6 {
        let n = 4 + seed as usize % 3;
        let inst = save(&dir, &format!("i{seed}.json"), &clustered_instance(n, 800 + seed, 5, 3.0));
        let routes = p(&dir, &format!("r{seed}.json"));
        ok(&["solve-rdp", "--instance", s(&inst), "--out", s(&routes)]);
        let mut bound = Vec::new();
        for cuts in ["none", "star"] {
            let out = p(&dir, &format!("s{seed}-{cuts}.json"));
            ok(&["solve-sp", "--instance", s(&inst), "--routes", s(&routes), "--cuts", cuts, "--out", s(&out)]);
            match read_result(&out).unwrap() {
                ResultFile::Sp(r) => bound.push((r.lp_bound, r.savings, r.cons)),
                _ => panic!("expected a scheduling result"),
            }
        }
        assert!(bound[1].0 <= bound[0].0 + 1e-9, "seed {seed}: {bound:?}");
        assert!((bound[1].1 - bound[0].1).abs() < 1e-6, "seed {seed}: {bound:?}");
        assert!(bound[1].2 >= bound[0].2);
        added += usize::from(bound[1].2 > bound[0].2);
    }
    assert!(added > 0, "star mode never added a row");
}

#[test]
fn rshm_reaches_the_exhaustive_optimum_on_two_vehicles() {
    let dir = TempDir::new().unwrap();
    let inst = shared_edge_instance();
    let z_star = brute_force_cvpp(&inst, DEFAULT_PATH_CAP).unwrap().z_star;
    let path = save(&dir, "two.json", &inst);
    let out = p(&dir, "h.json");
    ok(&["rshm", "--instance", s(&path), "--freq-threshold", "3", "--out", s(&out)]);
    let rec = rshm_record(&out);
    assert!((rec.fuel_cost - z_star).abs() < 1e-6, "{} vs {z_star}", rec.fuel_cost);

    for seed in 0..4 {
        let inst = clustered_instance(2, 600 + seed, 5, 2.0);
        let z_star = brute_force_cvpp(&inst, 2000).unwrap().z_star;
        let path = save(&dir, &format!("c{seed}.json"), &inst);
        let out = p(&dir, &format!("c{seed}-h.json"));
        ok(&["rshm", "--instance", s(&path), "--out", s(&out)]);
        assert!(rshm_record(&out).fuel_cost >= z_star - 1e-6, "seed {seed}");
    }
}

#[test]
fn routing_then_scheduling_equals_first_heuristic_iteration() {
    let dir = TempDir::new().unwrap();
    for seed in 0..3 {
        let inst = save(&dir, &format!("i{seed}.json"), &clustered_instance(4, 700 + seed, 5, 3.0));
        let routes = p(&dir, &format!("r{seed}.json"));
        let sp = p(&dir, &format!("s{seed}.json"));
        let h = p(&dir, &format!("h{seed}.json"));
        ok(&["solve-rdp", "--instance", s(&inst), "--out", s(&routes)]);
        ok(&["solve-sp", "--instance", s(&inst), "--routes", s(&routes), "--out", s(&sp)]);
        ok(&["rshm", "--instance", s(&inst), "--out", s(&h)]);
        let fuel = match read_result(&sp).unwrap() {
            ResultFile::Sp(r) => r.total_fuel,
            _ => panic!("expected a scheduling result"),
        };
        let z1 = rshm_record(&h).trace[0].z;
        assert!((fuel - z1).abs() < 1e-6, "seed {seed}: {fuel} vs {z1}");
    }
}

#[test]
fn reports_are_byte_identical_without_timing() {
    let dir = TempDir::new().unwrap();
    let a = save(&dir, "a.json", &clustered_instance(4, 710, 5, 3.0));
    let b = save(&dir, "b.json", &clustered_instance(4, 711, 5, 3.0));
    let run = |tag: &str| {
        let out = p(&dir, &format!("{tag}-{{stem}}.json"));
        let trace = p(&dir, &format!("{tag}-{{stem}}.csv"));
        let args = [
            "--no-timing", "rshm", "--instance", s(&a), s(&b), "--jobs", "2", "--out", s(&out), "--trace",
            s(&trace),
        ];
        let table = ok(&args);
        let files: Vec<Vec<u8>> = ["a.json", "b.json", "a.csv", "b.csv"]
            .iter()
            .map(|f| fs::read(p(&dir, &format!("{tag}-{f}"))).unwrap())
            .collect();
        (table, files)
    };
    assert_eq!(run("x"), run("y"));
    let json = ok(&["--format", "json", "report", s(&p(&dir, "x-a.json")), s(&p(&dir, "x-b.json"))]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    assert_eq!(v["rows"][0]["Instance"], "a");
}

#[test]
fn rel_dev_examples() {
    let expected = (2.0_f64 / 3.0).sqrt() / 11.0;
    assert!((rel_dev(&[10.0, 12.0, 11.0]) - expected).abs() < 1e-15);
    assert_eq!(rel_dev(&[7.5, 7.5, 7.5, 7.5]), 0.0);
    assert_eq!(rel_dev(&[]), 0.0);
}

#[test]
fn report_recomputes_derived_columns() {
    let dir = TempDir::new().unwrap();
    let trace: Vec<TraceRow> = [10.0, 12.0, 11.0]
        .iter()
        .enumerate()
        .map(|(k, &z)| TraceRow {
            iteration: k + 1,
            z,
            rdp_objective: z - 1.0,
            runtime_s: 0.0,
        })
        .collect();
    let rec = RshmRecord {
        instance: "hand".into(),
        vehicles: 2,
        fuel_0: 20.0,
        fuel_cost: 10.0,
        // Stale values that the report must not trust.
        saving_rate: 0.9,
        rel_dev: 0.9,
        iterations: 3,
        termination: Termination::FreqThreshold,
        best_iteration: 1,
        cpu_s: 0.0,
        limit_hit: false,
        trace,
        routes: RouteAssignment::from_vec(vec![vec![0], vec![1]]),
        platoons: PlatoonConfiguration::default(),
    };
    let path = p(&dir, "hand.json");
    fs::write(&path, serde_json::to_string(&ResultFile::Rshm(rec)).unwrap()).unwrap();
    let json = ok(&["--format", "json", "report", s(&path)]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    let row = &v["rows"][0];
    let rd = row["RelDev(%)"].as_f64().unwrap();
    assert!((rd - 100.0 * (2.0_f64 / 3.0).sqrt() / 11.0).abs() < 1e-12);
    assert!((row["Saving Rate(%)"].as_f64().unwrap() - 50.0).abs() < 1e-12);
    assert_eq!(row["Termination"], "freq_threshold");
}

#[test]
fn shortest_path_routes_have_no_detours() {
    let inst = clustered_instance(6, 720, 5, 3.0);
    let routes = shortest_path_assignment(&inst).unwrap();
    let (assigned, shortest) = route_fuels(&inst, &routes).unwrap();
    assert_eq!(detour_vs(&assigned, &shortest), 0);
    assert_eq!(detour_vs(&[2.0, 3.0], &[1.0, 3.0]), 1);
}

#[test]
fn bound_study_and_export() {
    let dir = TempDir::new().unwrap();
    let inst = save(&dir, "i.json", &clustered_instance(4, 730, 5, 3.0));
    let out = p(&dir, "b.json");
    let table = ok(&["solve-sp", "--instance", s(&inst), "--bound-study", "--out", s(&out)]);
    assert!(table.starts_with("Instance,Vehicles,LPbd0,LPbd1,LPbd2,StarRows,DisjCuts,Rounds,IMP1(%),IMP2(%)"));
    let ResultFile::Sp(rec) = read_result(&out).unwrap() else {
        panic!("expected a scheduling result")
    };
    let b = rec.bounds.unwrap();
    assert!(b.lpbd2 <= b.lpbd1 + 1e-9 && b.lpbd1 <= b.lpbd0 + 1e-9);
    ok(&["report", "--table", "bounds", s(&out)]);

    let mps = p(&dir, "m.mps");
    let lp = p(&dir, "m.lp");
    ok(&["export-mps", "--instance", s(&inst), "--model", "sp", "--out", s(&mps)]);
    ok(&["export-mps", "--instance", s(&inst), "--model", "rdp", "--file-format", "lp", "--out", s(&lp)]);
    assert!(fs::read_to_string(&mps).unwrap().starts_with("NAME"));
    assert!(!fs::read_to_string(&lp).unwrap().is_empty());
}

#[test]
fn exit_codes_and_structured_errors() {
    let dir = TempDir::new().unwrap();
    let r = cli(&["solve-sp", "--no-such-flag"]);
    assert_eq!(r.code, exit::USAGE);

    let inst = save(&dir, "i.json", &clustered_instance(4, 740, 5, 3.0));
    let r = cli(&["solve-sp", "--instance", s(&inst), "--cuts", "everything"]);
    assert_eq!(r.code, exit::USAGE);
    let err: serde_json::Value = serde_json::from_str(r.stderr.trim()).unwrap();
    assert_eq!(err["error"], "usage");

    let r = cli(&["solve-rdp", "--instance", s(&p(&dir, "missing.json"))]);
    assert_eq!(r.code, exit::FAILURE);
    assert_eq!(serde_json::from_str::<serde_json::Value>(r.stderr.trim()).unwrap()["error"], "instance");

    let bad = p(&dir, "bad.json");
    fs::write(&bad, r#"{"kind": "rdp", "result": {"instance": "x"}}"#).unwrap();
    let r = cli(&["report", s(&bad)]);
    assert_eq!(r.code, exit::FAILURE);
    assert_eq!(serde_json::from_str::<serde_json::Value>(r.stderr.trim()).unwrap()["error"], "schema");

    // A detour that cannot fit the window.
    let net = RoadNetwork::new(
        (0..3).map(node).collect(),
        vec![edge(0, 1, 1.0, 1.0), edge(0, 2, 1.0, 1.0), edge(2, 1, 1.0, 1.0)],
    )
    .unwrap();
    let tight = ProblemInstance::new(net, vec![mission(1, 0, 1, 0.0, 1.5)], SavingsParams::default(), None).unwrap();
    let tight_path = save(&dir, "tight.json", &tight);
    let routes = p(&dir, "detour.json");
    let detour = RouteAssignment::from_vec(vec![vec![1, 2]]);
    fs::write(&routes, serde_json::to_string(&detour).unwrap()).unwrap();
    let r = cli(&["solve-sp", "--instance", s(&tight_path), "--routes", s(&routes)]);
    assert_eq!(r.code, exit::INFEASIBLE, "{}", r.stderr);

    let r = cli(&["rshm", "--instance", s(&inst), "--iter-cap", "1"]);
    assert_eq!(r.code, exit::LIMIT, "{}", r.stderr);
    assert!(r.stdout.contains("iter_cap"));
}

#[test]
fn binary_reports_exit_codes() {
    let dir = TempDir::new().unwrap();
    let bin = env!("CARGO_BIN_EXE_platoon");
    let out = p(&dir, "g.json");
    let st = Command::new(bin)
        .args(["gen", "--model", "two-cluster", "--n", "3", "--seed", "1", "--out", s(&out)])
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(0));
    let st = Command::new(bin).args(["rshm"]).output().unwrap();
    assert_eq!(st.status.code(), Some(i32::from(exit::USAGE)));
    let st = Command::new(bin).args(["report", s(&p(&dir, "none.json"))]).output().unwrap();
    assert_eq!(st.status.code(), Some(i32::from(exit::FAILURE)));
    assert!(String::from_utf8_lossy(&st.stderr).starts_with("{\"error\":\"io\""));
}

proptest! {
    #[test]
    fn rel_dev_is_scale_invariant(zs in prop::collection::vec(1.0f64..1e4, 1..12), k in 0.5f64..50.0) {
        let a = rel_dev(&zs);
        let scaled: Vec<f64> = zs.iter().map(|z| z * k).collect();
        prop_assert!(a >= 0.0);
        prop_assert!((rel_dev(&scaled) - a).abs() < 1e-9);
    }

    #[test]
    fn detours_never_exceed_vehicles(pairs in prop::collection::vec((0.0f64..100.0, 0.0f64..100.0), 0..20)) {
        let shortest: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let assigned: Vec<f64> = pairs.iter().map(|p| p.0 + p.1).collect();
        let d = detour_vs(&assigned, &shortest);
        prop_assert!(d <= pairs.len());
        prop_assert_eq!(detour_vs(&shortest, &shortest), 0);
    }
}
