pub mod bench;
pub mod converge;
pub mod figure;
pub mod lyapunov;
pub mod poincare;
pub mod run;

/// Standard metadata header: command line, library version, the full
/// config echo, and the elapsed wall clock. Only the wall-clock line
/// varies between identical runs; everything below the header is
/// deterministic for a fixed config and seed.
pub fn header(command: &str, echo: &[String], wall_seconds: f64) -> Vec<String> {
    let mut lines = vec![
        format!("expcli {command}"),
        format!("version = {}", env!("CARGO_PKG_VERSION")),
    ];
    lines.extend(echo.iter().cloned());
    lines.push(format!("wall_seconds = {wall_seconds:.3}"));
    lines
}
