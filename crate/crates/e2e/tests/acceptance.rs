fn main() {
    let failed = eightrank_e2e::run_all();
    if failed.is_empty() {
        println!("acceptance: all 11 criteria pass");
    } else {
        println!("acceptance: {} of 11 criteria fail: {failed:?}", failed.len());
        std::process::exit(1);
    }
}
