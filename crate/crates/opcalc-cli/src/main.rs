fn main() {
    let status = opcalc_cli::run(std::env::args_os());
    std::process::exit(status as i32);
}
