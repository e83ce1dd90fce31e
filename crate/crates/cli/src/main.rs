fn main() {
    let env_seed = std::env::var(thermofock_cli::config::SEED_ENV).ok();
    std::process::exit(thermofock_cli::main_with(std::env::args_os(), env_seed.as_deref()));
}
