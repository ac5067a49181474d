//! Drive the batch front end in-process: write a config, run `compute` and
//! `verify`, and list what was produced.

use phasespace::cli::run_with;

fn main() -> std::io::Result<()> {
    let dir = tempfile::tempdir()?;
    let out = dir.path().join("out");
    let config = dir.path().join("job.json");
    std::fs::write(
        &config,
        r#"{
  "system": {"kind": "linear-force"},
  "physics": {"hbar": 1.0, "force": 0.5, "mass": 1.0},
  "pair": ["q", "H"],
  "state": {"kind": "random", "seed": 4},
  "kernel": {"id": "margenau-hill"},
  "grid": {"n": 32, "domain": [-12, 12]},
  "outputs": {"fields": ["dist", "marginals", "cfn"], "operator": {"product": ["q", "H"]}}
}"#,
    )?;
    let args = |cmd: &str| -> Vec<String> {
        let c = config.display().to_string();
        let o = out.display().to_string();
        ["phasespace", cmd, "--config", &c, "--out", &o]
            .map(String::from)
            .to_vec()
    };
    println!("compute -> exit {}", run_with(args("compute")));
    println!("verify  -> exit {}", run_with(args("verify")));
    println!("expect  -> exit {}", run_with(args("expect")));
    let mut names: Vec<_> = std::fs::read_dir(&out)?.map(|e| e.unwrap().file_name()).collect();
    names.sort();
    println!("{names:?}");
    print!("{}", std::fs::read_to_string(out.join("manifest.json"))?);
    Ok(())
}
