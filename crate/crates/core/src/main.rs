fn main() { std::process::exit(rydberg_core::cli::main()) }
