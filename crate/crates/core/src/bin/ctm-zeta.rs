fn main() {
    std::process::exit(ctm_zeta::cli::main_from_env());
}
