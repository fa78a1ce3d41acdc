fn main() {
    std::process::exit(convex_utm_cli::run(std::env::args_os()));
}
