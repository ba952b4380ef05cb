use chevalley_core::chevalley::*;
use chevalley_core::field::{Field, Rng};
use chevalley_core::liealg::{chevalley_lie_algebra, scramble};
use chevalley_core::rootdata::{build_root_datum, DynkinType, Isogeny};
use std::io::Write;
use std::time::Instant;

fn tryit(t: DynkinType, n: usize, iso: Isogeny, spec: &str, seed: u64) {
    let start = Instant::now();
    let datum = build_root_datum(t, n, iso).unwrap();
    let f = Field::parse(spec).unwrap();
    let (alg, span, _) = chevalley_lie_algebra(&datum, &f);
    let (scrambled, sspan, _) = scramble(&alg, &span, seed);
    let mut rng = Rng::from_seed(seed);
    match chevalley_basis(&scrambled, &sspan, &datum, &mut rng, 20) {
        Ok(res) => println!("{t}{n} {iso} {spec}: OK attempts {} in {:?}", res.attempts_used, start.elapsed()),
        Err(e) => println!("{t}{n} {iso} {spec}: FAIL {e} in {:?}", start.elapsed()),
    }
    std::io::stdout().flush().unwrap();
}

fn main() {
    use DynkinType::*;
    use Isogeny::*;
    tryit(B, 4, SimplyConnected, "2", 31);
    tryit(B, 4, Adjoint, "2", 32);
    tryit(B, 5, SimplyConnected, "2", 33);
    tryit(C, 4, Adjoint, "2", 34);
    tryit(C, 5, SimplyConnected, "2", 35);
    tryit(D, 5, SimplyConnected, "2", 36);
    tryit(D, 5, Intermediate(1), "2", 37);
    tryit(A, 5, SimplyConnected, "2", 38);
    tryit(A, 5, Intermediate(2), "2", 39);
    tryit(E, 6, Adjoint, "2", 40);
}
