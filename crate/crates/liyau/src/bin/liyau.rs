fn main() {
    // Die quietly on a closed pipe (`liyau ... | head`) instead of
    // panicking in println.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    std::process::exit(liyau::cli::dispatch(std::env::args_os()));
}
