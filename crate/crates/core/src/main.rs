fn main() -> std::process::ExitCode {
    manifold_embed::cli::main()
}
