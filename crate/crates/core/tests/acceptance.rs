use matdyn::acceptance;
use matdyn::sample::DEFAULT_SEED;

fn main() {
    let results = acceptance::run_all(DEFAULT_SEED);
    for r in &results {
        println!("{r}");
    }
    let failed: Vec<u8> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    println!("acceptance: {}/{} passed", results.len() - failed.len(), acceptance::COUNT);
    if results.len() != acceptance::COUNT as usize || !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
