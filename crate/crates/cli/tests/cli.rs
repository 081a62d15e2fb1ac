use std::path::PathBuf;
use std::process::{Command, Output};

use tempcoal::parser::print;
use tempcoal::preference::{fuzz_axiom, validate_in_place, AxiomKind, FuzzOptions};
use tempcoal::semantics::{EvalContext, EvalOptions};

fn data(name: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let p = if name.ends_with(".sptc") { root.join("tests/data").join(name) } else { root.join("../core/data").join(name) };
    p.display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tempcoal")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn records(o: &Output) -> Vec<(String, String)> {
    String::from_utf8_lossy(&o.stdout)
        .lines()
        .map(|l| {
            let (k, v) = l.split_once('=').expect("record line");
            (k.to_string(), v.to_string())
        })
        .collect()
}

fn get<'a>(r: &'a [(String, String)], key: &str) -> &'a str {
    &r.iter().find(|(k, _)| k == key).unwrap_or_else(|| panic!("missing {key}")).1
}

#[test]
fn parse_echoes_the_normal_form() {
    let o = run(&["--records", "parse", "--formula", "F p1 & G !p2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(records(&o), vec![("formula".to_string(), "F p1 & G !p2".to_string())]);
    let o = run(&["parse", "--formula", "<<2,1>> X p"]);
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "formula: <<1,2>> X p");
}

#[test]
fn usage_and_load_errors_exit_with_two() {
    assert_eq!(code(&run(&["parse", "--formula", "F ("])), 2);
    assert_eq!(code(&run(&["mc", "--model", "/nonexistent.cgm", "--formula", "p"])), 2);
    assert_eq!(code(&run(&["mc", "--model", &data("enemies2.cgm"), "--formula", "p", "--stem-bound", "0"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
    let o = run(&["sptc", "enables", "--model", &data("enemies2.cgm"), "--profile", &data("idle.sptc"), "--formula", "F p2"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("--player"));
}

#[test]
fn latch_preference_is_checked() {
    let m = data("enemies2.cgm");
    let p = data("enemies2.prf");
    let o = run(&["--records", "mc", "--model", &m, "--prefs", &p, "--formula", "lt(1, init(F p1 & G !p2), init(G !p1 & F p2))"]);
    assert_eq!(code(&o), 0);
    let r = records(&o);
    assert_eq!(get(&r, "verdict"), "true");
    assert_eq!((get(&r, "stem_bound"), get(&r, "loop_bound"), get(&r, "seed")), ("6", "4", "0"));
    let o = run(&["mc", "--model", &m, "--prefs", &p, "--formula", "lt(1, init(G !p1 & F p2), init(F p1 & G !p2))"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn unsound_variant_countermodel_revalidates() {
    let o = run(&["--records", "axioms", "--axiom", "P4-unsound", "--trials", "500", "--seed", "7"]);
    assert_eq!(code(&o), 1);
    let r = records(&o);
    assert_eq!(get(&r, "verdict"), "counterexample");
    let opts = FuzzOptions { trials: 500, seed: 7, ..FuzzOptions::default() };
    let c = fuzz_axiom(AxiomKind::P4Unsound, &opts).unwrap().countermodel.unwrap();
    assert_eq!(get(&r, "trial"), c.trial.to_string());
    assert_eq!(get(&r, "formula"), print(&c.formula));
    let eo = EvalOptions { stem_bound: opts.stem_bound, loop_bound: opts.loop_bound, ..EvalOptions::default() };
    let ctx = EvalContext::new(c.model.clone(), eo);
    let mut sys = c.objectives.clone();
    validate_in_place(&c.model, &mut sys, ctx.universe()).unwrap();
    assert!(!ctx.with_objectives(sys).eval_state(&c.history, &c.formula).unwrap());
    // The sound axiom survives the same draws.
    assert_eq!(code(&run(&["axioms", "--axiom", "P4", "--trials", "50", "--seed", "7"])), 0);
}

#[test]
fn record_output_is_deterministic() {
    let (m, p, r) = (data("enemies2.cgm"), data("enemies2.prf"), data("idle.sptc"));
    let args = [
        "--records", "core", "--model", &m, "--prefs", &p, "--profile", &r, "--formula", "G !p1 & G !p2", "--cap", "40",
        "--seed", "5",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(code(&a), 1);
    let keys: Vec<String> = records(&a).into_iter().map(|(k, _)| k).collect();
    let expected = [
        "target", "verdict", "vacuous", "sampled", "profiles_checked", "failure", "stem_bound", "loop_bound", "memory",
        "seed", "qualifiers",
    ];
    assert_eq!(keys, expected);
    assert!(get(&records(&a), "qualifiers").contains("seed 5"));
}

#[test]
fn validate_prefs_accepts_the_shipped_systems() {
    for n in ["enemies2", "enemies3", "single", "split"] {
        let o = run(&["--records", "validate-prefs", "--model", &data(&format!("{n}.cgm")), "--prefs", &data(&format!("{n}.prf"))]);
        assert_eq!(code(&o), 0, "{n}");
        assert_eq!(get(&records(&o), "disjoint"), "true");
    }
}

#[test]
fn gnf_lists_one_row_per_guard() {
    let o = run(&["--records", "gnf", "--formula", "p U q"]);
    assert_eq!(code(&o), 0);
    let r = records(&o);
    assert_eq!(r.iter().filter(|(k, _)| k == "guard").count(), 4);
    let o = run(&["--records", "gnf", "--formula", "F p", "--ap", "p,q"]);
    assert_eq!(records(&o).iter().filter(|(k, _)| k == "derivative").count(), 4);
    assert_eq!(code(&run(&["gnf", "--formula", "Y p"])), 2);
}

#[test]
fn eliminate_prints_a_preference_free_formula() {
    let o = run(&[
        "--records", "eliminate", "--model", &data("enemies2.cgm"), "--prefs", &data("enemies2.prf"), "--formula",
        "lt(1, false, F p2)", "--simplify",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(get(&records(&o), "eliminated"), "true");
}

#[test]
fn profile_judgments() {
    let m = data("enemies2.cgm");
    let s = data("strike.sptc");
    let base = ["--records", "sptc"];
    let judge = |extra: &[&str]| {
        let args: Vec<&str> = base.iter().copied().chain(extra.iter().copied()).chain(["--model", &m, "--profile", &s]).collect();
        run(&args)
    };
    assert_eq!(code(&judge(&["enforces", "--formula", "F p2"])), 0);
    assert_eq!(code(&judge(&["enforces", "--formula", "F p1"])), 1);
    assert_eq!(code(&judge(&["enables", "--player", "1", "--formula", "F p2"])), 0);
    assert_eq!(code(&judge(&["wellformed", "--depth", "2"])), 0);
}

#[test]
fn dominance_modes() {
    let single = ["--model".to_string(), data("single.cgm"), "--prefs".to_string(), data("single.prf")];
    let split = ["--model".to_string(), data("split.cgm"), "--prefs".to_string(), data("split.prf")];
    let call = |files: &[String], extra: &[&str]| {
        let mut args = vec!["--records", "dominant"];
        args.extend(files.iter().map(String::as_str));
        args.extend(extra);
        run(&args)
    };
    let o = call(&single, &[]);
    assert_eq!(code(&o), 0);
    assert_eq!(get(&records(&o), "mode"), "exists");
    assert!(records(&o).iter().any(|(k, _)| k == "witness"));
    assert_eq!(code(&call(&split, &[])), 1);
    let latch = ["--model".to_string(), data("enemies2.cgm"), "--prefs".to_string(), data("enemies2.prf")];
    let (idle, strike) = (data("idle.sptc"), data("strike.sptc"));
    let o = call(&latch, &["--profile", &idle, "--profile2", &strike, "--cap", "5"]);
    assert_eq!(get(&records(&o), "mode"), "pair");
    let o = call(&latch, &["--profile", &idle, "--player", "1", "--cap", "5"]);
    assert_eq!(get(&records(&o), "mode"), "player");
}
