fn main() {
    std::process::exit(adaplan_cli::run(std::env::args_os()));
}
