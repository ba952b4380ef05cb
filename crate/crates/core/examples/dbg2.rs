use chevalley_core::chevalley::*;
use chevalley_core::field::{Field, Rng};
use chevalley_core::liealg::{chevalley_lie_algebra, scramble};
use chevalley_core::rootdata::{build_root_datum, DynkinType, Isogeny};
use std::io::Write;
use std::time::Instant;

fn main() {
    let f = Field::parse("2").unwrap();
    let datum = build_root_datum(DynkinType::B, 5, Isogeny::SimplyConnected).unwrap();
    let (alg, span, _) = chevalley_lie_algebra(&datum, &f);
    let (scrambled, sspan, _) = scramble(&alg, &span, 33);
    let t0 = Instant::now();
    let deco = find_root_spaces(&scrambled, &sspan).unwrap();
    println!("deco {:?} classes {:?}", t0.elapsed(), deco.classes.iter().map(|(_, s)| s.dim()).collect::<Vec<_>>());
    std::io::stdout().flush().unwrap();
    for seed in 0..3u64 {
        let t0 = Instant::now();
        let mut rng = Rng::from_seed(seed);
        match find_frame(&scrambled, &datum, &deco, &mut rng) {
            Ok(fr) => {
                println!("seed {seed}: frame {} lines in {:?}", fr.lines.len(), t0.elapsed());
                let t1 = Instant::now();
                let ids = identify_roots(&scrambled, &datum, &deco, &fr, 2);
                println!("  identify {} in {:?}", ids.len(), t1.elapsed());
            }
            Err(e) => println!("seed {seed}: frame err {e} in {:?}", t0.elapsed()),
        }
        std::io::stdout().flush().unwrap();
    }
}
