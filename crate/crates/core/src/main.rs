fn main() {
    std::process::exit(tornado_tab::cli::run(std::env::args_os()));
}
