fn main() {
    std::process::exit(lozenge::run(std::env::args_os()));
}
