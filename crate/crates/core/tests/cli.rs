use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const TOY: &str = "# two triangles joined by one edge\n0 1\n0 2\n1 2\n2 3\n3 4\n3 5\n4 5\n";

fn netsample(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netsample"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn usage_and_data_errors_have_distinct_exit_codes() {
    assert_eq!(code(&netsample(&[])), 1);
    assert_eq!(code(&netsample(&["sample", "--graph"])), 1);
    assert_eq!(code(&netsample(&["--help"])), 0);
    let out = netsample(&["summary", "--graph", "/nonexistent/graph.txt"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/graph.txt"));

    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.txt", "0 1\n2\n");
    let out = netsample(&["summary", "--graph", &bad]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn sample_prints_the_trace() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "toy.txt", TOY);
    let out = netsample(&[
        "sample",
        "--graph",
        &g,
        "--strategy",
        "xs",
        "--seed-node",
        "0",
        "--k",
        "3",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8_lossy(&out.stdout), "0\n2\n3\n");

    let out = netsample(&[
        "sample",
        "--graph",
        &g,
        "--strategy",
        "bfs",
        "--seed-node",
        "0",
        "--k",
        "9",
    ]);
    assert_eq!(code(&out), 3);
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 6);

    let out = netsample(&[
        "sample",
        "--graph",
        &g,
        "--strategy",
        "bogus",
        "--seed-node",
        "0",
        "--k",
        "2",
    ]);
    assert_eq!(code(&out), 1);
    let out = netsample(&[
        "sample",
        "--graph",
        &g,
        "--strategy",
        "dfs",
        "--seed-node",
        "77",
        "--k",
        "2",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn eval_then_aggregate() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "toy.txt", TOY);
    let cfg = write(
        dir.path(),
        "exp.toml",
        "strategies = [\"xs\"]\nmetrics = [\"dq\"]\ncheckpoints = [3]\nseeds = 1\nmaster_seed = 5\n",
    );
    let raw = dir.path().join("raw.csv");
    let out = netsample(&["eval", "--graph", &g, "--config", &cfg, "--out", raw.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&raw).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "strategy,seed_index,seed_node,checkpoint,metric,value,status");
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("xs,0,"));
    assert!(lines[1].ends_with(",3,dq,1.0,ok"), "{}", lines[1]);

    let agg = dir.path().join("agg.csv");
    let plot = dir.path().join("agg.dat");
    let out = netsample(&[
        "aggregate",
        "--in",
        raw.to_str().unwrap(),
        "--out",
        agg.to_str().unwrap(),
        "--gnuplot",
        plot.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        fs::read_to_string(&agg).unwrap(),
        "strategy,metric,checkpoint,mean,std,count\nxs,dq,3,1.0,0.0,1\n"
    );
    assert!(fs::read_to_string(&plot).unwrap().contains("# xs dq\n3 1 0\n"));
}

#[test]
fn eval_marks_exhausted_rows_and_exits_partial() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "two.txt", "a b\nb c\nx y\n");
    let cfg = write(
        dir.path(),
        "exp.toml",
        "strategies = [\"bfs\", \"acq\"]\nmetrics = [\"dq\", \"commreach_cnm\"]\ncheckpoints = [2, 4]\nseeds = 3\ncnm = \"detect\"\n",
    );
    let out = netsample(&["eval", "--graph", &g, "--config", &cfg]);
    assert_eq!(code(&out), 3);
    let text = String::from_utf8_lossy(&out.stdout);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    // every (strategy, seed) pair reports every checkpoint and metric
    assert_eq!(rows.len(), 2 * 3 * 2 * 2);
    assert!(rows
        .iter()
        .any(|r| r.starts_with("bfs,") && r.ends_with(",4,dq,,exhausted")));
    for r in &rows {
        let cols: Vec<&str> = r.split(',').collect();
        if cols[0] == "bfs" && cols[3] == "2" {
            assert_eq!(cols[6], "ok", "{r}");
        }
    }

    let bad = write(dir.path(), "bad.toml", "metrics = [\"commreach_rak\"]\n");
    assert_eq!(code(&netsample(&["eval", "--graph", &g, "--config", &bad])), 1);
}

#[test]
fn eval_reuses_cached_partitions() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "toy.txt", TOY);
    let cache = dir.path().join("cache");
    let cfg = write(
        dir.path(),
        "exp.toml",
        &format!(
            "strategies = [\"sec\"]\nmetrics = [\"commreach_rak\", \"commreach_cnm\"]\ncheckpoints = [1]\nseeds = 2\nrak = \"detect\"\ncnm = \"detect\"\ncommunity_seed = 3\npartition_cache = {:?}\n",
            cache.to_str().unwrap()
        ),
    );
    let first = netsample(&["eval", "--graph", &g, "--config", &cfg]);
    assert_eq!(code(&first), 0, "{}", String::from_utf8_lossy(&first.stderr));
    let cnm = fs::read_to_string(cache.join("toy.cnm.part")).unwrap();
    assert_eq!(cnm, "0 0\n1 0\n2 0\n3 1\n4 1\n5 1\n");
    assert!(cache.join("toy.rak.3.part").exists());
    // a hand-edited cache is what later runs measure against
    fs::write(cache.join("toy.cnm.part"), "0 0\n1 1\n2 2\n3 3\n4 4\n5 5\n").unwrap();
    let second = netsample(&["eval", "--graph", &g, "--config", &cfg]);
    let text = String::from_utf8_lossy(&second.stdout);
    let cnm_row = text.lines().find(|l| l.contains("commreach_cnm")).unwrap();
    assert!(cnm_row.contains(",0.16666"), "{cnm_row}");
}

#[test]
fn communities_summary_and_outbreak() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "toy.txt", TOY);
    let part = dir.path().join("p.txt");
    let out = netsample(&[
        "communities",
        "--graph",
        &g,
        "--algo",
        "cnm",
        "--out",
        part.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(fs::read_to_string(&part).unwrap(), "0 0\n1 0\n2 0\n3 1\n4 1\n5 1\n");
    assert!(String::from_utf8_lossy(&out.stderr).contains("modularity=0.357143"));

    let tri = write(dir.path(), "tri.txt", "0 1\n1 2\n0 2\n");
    let out = netsample(&["summary", "--graph", &tri]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(&row[..4], &["3", "3", "1.0", "2.0"]);
    assert_eq!(row[6], "1.0");
    assert_eq!(row[7], "exact");

    let star = write(dir.path(), "star.txt", "0 1\n0 2\n0 3\n0 4\n");
    let out = netsample(&[
        "outbreak",
        "--graph",
        &star,
        "--K",
        "1",
        "--seeds",
        "4",
        "--targets",
        "0,1",
    ]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("strategy,target,mean_size,std,censored,runs,mean_draws\n"));
    assert!(text.contains("sec,0.0,1.0,"));

    // stopping before the hub is reached censors the run
    let out = netsample(&[
        "outbreak",
        "--graph",
        &star,
        "--strategies",
        "dfs",
        "--K",
        "2",
        "--seeds",
        "4",
        "--max-size",
        "1",
    ]);
    assert_eq!(code(&out), 3);
}

#[test]
fn synth_and_theory_commands() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("pp.txt");
    let part = dir.path().join("pp.part");
    let out = netsample(&[
        "synth",
        "planted",
        "--communities",
        "4",
        "--size",
        "25",
        "--e-in",
        "6",
        "--e-out",
        "1",
        "--rng",
        "2",
        "--out-graph",
        graph.to_str().unwrap(),
        "--out-partition",
        part.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(fs::read_to_string(&part).unwrap().lines().count(), 100);
    assert!(fs::read_to_string(&graph).unwrap().lines().count() > 300);

    let out = netsample(&[
        "synth",
        "planted",
        "--communities",
        "2",
        "--size",
        "5",
        "--e-in",
        "5",
        "--e-out",
        "0",
        "--out-graph",
        "/dev/null",
        "--out-partition",
        "/dev/null",
    ]);
    assert_eq!(code(&out), 1);

    let cl = dir.path().join("cl.txt");
    let out = netsample(&[
        "synth",
        "chunglu",
        "--n",
        "500",
        "--rng",
        "1",
        "--out-graph",
        cl.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(fs::read_to_string(&cl).unwrap().lines().count() > 1000);

    let out = netsample(&["theory", "xs-expansion", "--trials", "50", "--rng", "4"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("communities,community_size,e_in,e_out,sample_size"));
    assert!(lines[1].starts_with("10,100,20,2,5,1,frontier,50,4,3.636"));

    let out = netsample(&["theory", "sec-order", "--trials", "40"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("\"2:10,8:10,10:20\",2,frontier,40,"));
    let out = netsample(&["theory", "sec-order", "--classes", "2:x"]);
    assert_eq!(code(&out), 1);
}
