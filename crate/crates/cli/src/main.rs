fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("RPA_MPPI_LOG", "warn")).init();
    let code = rpa_mppi_cli::run_cli(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
