fn main() {
    std::process::exit(spoofrelay::harness::cli(std::env::args()));
}
