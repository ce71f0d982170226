//! Searches for configurations where the pressure starts to grow again
//! before the matter runs out.

use tovds::analysis::nonmonotone_search;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let gammas = [1.4, 1.5, 1.6];
    let lambdas = [0.05, 0.1, 0.2, 0.3];
    let cs = [3.0, 10.0, 30.0];
    let (cells, first) = nonmonotone_search(&gammas, &lambdas, &cs, 50.0)?;
    for c in &cells {
        println!("gamma {:4} lambda {:4} c {:4}: {}", c.gamma, c.lambda, c.c, c.outcome);
    }
    match first {
        Some(c) => println!("\nfirst non-monotone cell: {c:?}"),
        None => println!("\nno non-monotone cell on this grid"),
    }
    Ok(())
}
