use chevalley_core::chevalley::*;
use chevalley_core::field::{Field, Rng};
use chevalley_core::liealg::chevalley_lie_algebra;
use chevalley_core::rootdata::{build_root_datum, DynkinType, Isogeny};

fn main() {
    let f = Field::parse("2").unwrap();
    let datum = build_root_datum(DynkinType::B, 5, Isogeny::SimplyConnected).unwrap();
    let (alg, span, _) = chevalley_lie_algebra(&datum, &f);
    let deco = find_root_spaces(&alg, &span).unwrap();
    let mut rng = Rng::from_seed(0);
    match find_frame(&alg, &datum, &deco, &mut rng) {
        Ok(fr) => eprintln!("frame OK {} lines", fr.lines.len()),
        Err(e) => eprintln!("frame err {e}"),
    }
}
