fn main() {
    std::process::exit(tilepeps::run(std::env::args()));
}
