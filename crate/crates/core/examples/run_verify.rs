use ncilw_core::config::Config;
use ncilw_core::verify;
fn main() {
    let only = std::env::args().nth(1);
    let cfg = Config::default();
    let rep = verify::run_all(&cfg, only.as_deref());
    print!("{}", rep.summary());
}
