fn main() {
    std::process::exit(boat_cli::run(std::env::args_os()));
}
