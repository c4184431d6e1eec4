use ncilw_core::report::Report;
use ncilw_core::verify;

fn main() {
    for (q, l_max) in [(0.0f64, 16usize), (0.0, 20), (0.0, 24), (0.3, 16), (0.3, 20), (0.3, 24)] {
        let mut rep = Report::new(0);
        verify::sq_case_for_calibration(&mut rep, q, 0.25, 16, l_max, None);
        for r in &rep.results {
            println!("q={q} l_max={l_max} cut=full: {} residual {:.3e}", r.id, r.residual);
        }
    }
}
