//! The command-line workflow end to end in a temporary directory:
//! generate inputs, validate, build shocks, regress, bin, project.

fn run(args: &[&str]) {
    println!("$ demoshock {}", args.join(" "));
    let code = demoshock::cli::run(std::iter::once("demoshock").chain(args.iter().copied()));
    println!("(exit {code})\n");
}

fn main() -> std::io::Result<()> {
    let dir = tempfile::tempdir()?;
    let d = dir.path().display().to_string();
    let f = |name: &str| format!("{d}/{name}");
    run(&["generate", "--out-dir", &d, "--seed", "4", "--controls", "white_share,income"]);
    let inputs = [
        "--population", &f("population.csv"),
        "--preferences", &f("preferences.csv"),
        "--stock", &f("stock.csv"),
        "--outcomes", &f("outcomes.csv"),
    ];
    let mut validate = vec!["validate", "--out-dir", &d];
    validate.extend(inputs);
    run(&validate);
    let mut shock = vec!["shock", "--out-dir", &d, "--start", "2012", "--end", "2018", "--controls", "white_share,income"];
    shock.extend(inputs);
    run(&shock);
    run(&["regress", "--out-dir", &d, "--shocks", &f("shocks.csv")]);
    run(&["binscatter", "--out-dir", &d, "--shocks", &f("shocks.csv"), "--bins", "10"]);
    run(&["split", "--out-dir", &d, "--shocks", &f("shocks.csv"), "--outcomes", &f("outcomes.csv"), "--split-var", "income"]);

    let mut scenario = String::from("period,age_group,share\n");
    for (period, old) in [(2020, 0.15), (2025, 0.175), (2030, 0.20)] {
        for a in 1..=14 {
            let share = if a >= 11 { old / 4.0 } else { (1.0 - old) / 10.0 };
            scenario.push_str(&format!("{period},{a},{share}\n"));
        }
    }
    std::fs::write(f("scenario.csv"), scenario)?;
    run(&["project", "--out-dir", &d, "--preferences", &f("preferences.csv"), "--scenario", &f("scenario.csv")]);
    println!("{}", std::fs::read_to_string(f("projection.csv"))?);
    Ok(())
}
