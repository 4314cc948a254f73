//! Monomial counts frozen from an independent computer-algebra run.

use somos::kernel::int;
use somos::laurent::{symbolic_iterate, RecurrenceShape, SymbolicGuard};
use somos::sequences::{gale_robinson_extend, GaleRobinsonParams};

fn counts(order: usize, p: usize, q: usize, n_max: usize) -> Vec<usize> {
    let shape = RecurrenceShape::new(order, p, q).unwrap();
    let orbit = symbolic_iterate(shape, n_max, SymbolicGuard::default()).unwrap();
    orbit.monomial_counts()[order..].to_vec()
}

#[test]
fn somos4_counts() {
    assert_eq!(counts(4, 1, 2, 12), vec![2, 3, 6, 12, 23, 43, 80, 140, 233]);
}

#[test]
fn gale_robinson_counts() {
    assert_eq!(counts(5, 1, 2, 13), vec![2, 3, 5, 9, 18, 29, 52, 84, 141]);
    assert_eq!(counts(6, 1, 2, 14), vec![2, 3, 5, 8, 16, 33, 56, 105, 201]);
    assert_eq!(counts(6, 1, 3, 14), vec![2, 3, 4, 7, 13, 26, 43, 80, 160]);
    assert_eq!(counts(7, 1, 2, 15), vec![2, 3, 5, 8, 13, 25, 51, 85, 154]);
}

#[test]
fn symbolic_matches_numeric() {
    for &(order, p, q) in &[(4, 1, 2), (5, 1, 2), (6, 1, 3)] {
        let shape = RecurrenceShape::new(order, p, q).unwrap();
        let orbit = symbolic_iterate(shape, order + 6, SymbolicGuard::default()).unwrap();
        let init: Vec<_> = (0..order as i64).map(|i| int(i + 2)).collect();
        let (a, b) = (int(3), int(-2));
        let params = GaleRobinsonParams::new(order, p, q, a.clone(), b.clone(), init.clone()).unwrap();
        let w = gale_robinson_extend(&params, 0, (order + 6) as i64).unwrap();
        for n in 0..=order + 6 {
            assert_eq!(orbit.term(n).evaluate(&a, &b, &init).unwrap(), w[n as i64], "({order},{p},{q}) t{n}");
        }
    }
}
