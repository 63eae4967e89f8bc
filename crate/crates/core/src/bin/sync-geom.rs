fn main() {
    std::process::exit(sync_geom::cli::parse_and_dispatch(std::env::args_os()));
}
