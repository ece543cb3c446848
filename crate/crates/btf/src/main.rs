fn main() {
    std::process::exit(btf::cli::run(std::env::args_os()));
}
