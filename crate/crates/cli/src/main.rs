fn main() {
    std::process::exit(dimdrop::run(std::env::args_os()));
}
