//! Universality class of every system in `examples/systems`.

use ddeuc::classify::{classify_auto, LemmaOutcome};
use ddeuc::system::LinearDde;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "examples/systems".into());
    let mut paths: Vec<_> = std::fs::read_dir(&dir)?.filter_map(|e| e.ok().map(|e| e.path())).collect();
    paths.sort();
    for path in paths.iter().filter(|p| p.extension().is_some_and(|e| e == "json")) {
        let (sys, _) = LinearDde::from_json(&std::fs::read_to_string(path)?)?;
        let name = path.file_stem().unwrap().to_string_lossy();
        match classify_auto(&sys) {
            Ok(v) => {
                let pattern: Vec<String> = v.pattern.iter().map(|(w, d)| format!("{w:.4} {d:?}")).collect();
                println!("{name:<20} class {:<5} [{}]", v.tag.to_string(), pattern.join(", "));
                for (lemma, outcome) in &v.lemma_checks {
                    if let LemmaOutcome::Holds(h) = outcome {
                        println!("{:<20}   {lemma}: {h}", "");
                    }
                }
                for note in &v.notes {
                    println!("{:<20}   note: {note}", "");
                }
            }
            Err(e) => println!("{name:<20} error: {e}"),
        }
    }
    Ok(())
}
