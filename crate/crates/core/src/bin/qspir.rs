fn main() {
    std::process::exit(qspir::harness::main_with(std::env::args_os()));
}
