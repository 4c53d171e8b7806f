//! The signed Weyl group on one qubit: products, adjoints and moving an
//! operator across a Bell pair.

use qspir::pauli::{adjoint, bell_transfer, commutation_sign, compose, SignedWeyl, WeylLabel};

fn main() {
    println!("products W(x) W(y):");
    print!("{:>10}", "");
    for y in WeylLabel::ALL {
        print!("{:>10}", y.to_string());
    }
    println!();
    for x in WeylLabel::ALL {
        print!("{:>10}", x.to_string());
        for y in WeylLabel::ALL {
            print!("{:>10}", compose(x.unsigned(), y.unsigned()).to_string());
        }
        println!();
    }

    println!("\nadjoints and Bell-pair transfer:");
    for x in SignedWeyl::all() {
        println!(
            "  {x}: adjoint {}, transfer {}",
            adjoint(x),
            bell_transfer(x)
        );
    }

    let (x, z) = (WeylLabel::X, WeylLabel::Z);
    println!("\nXZ = (-1)^{} ZX", commutation_sign(x, z));
}
