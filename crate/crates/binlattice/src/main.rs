fn main() {
    std::process::exit(binlattice::run(std::env::args_os()));
}
