use alloc::vec;
use alloc::vec::Vec;

use crate::kernels::FiniteKernel;
use crate::linalg::{Lu, Matrix};
use crate::{Error, Result};

/// Strongly connected components of the transition graph that no edge
/// leaves, each sorted ascending, ordered by smallest member.
pub fn closed_classes(k: &FiniteKernel) -> Vec<Vec<usize>> {
    let n = k.n();
    let comp = components(k);
    let count = comp.iter().copied().max().map_or(0, |m| m + 1);
    let mut closed = vec![true; count];
    for x in 0..n {
        for &(y, _) in k.sparse_row(x) {
            if comp[x] != comp[y] {
                closed[comp[x]] = false;
            }
        }
    }
    let mut classes: Vec<Vec<usize>> = vec![Vec::new(); count];
    for x in 0..n {
        classes[comp[x]].push(x);
    }
    let mut out: Vec<Vec<usize>> = classes
        .into_iter()
        .enumerate()
        .filter(|(c, _)| closed[*c])
        .map(|(_, members)| members)
        .collect();
    out.sort_by_key(|c| c[0]);
    out
}

/// Kosaraju's algorithm with explicit stacks.
fn components(k: &FiniteKernel) -> Vec<usize> {
    let n = k.n();
    let mut reverse: Vec<Vec<usize>> = vec![Vec::new(); n];
    for x in 0..n {
        for &(y, _) in k.sparse_row(x) {
            reverse[y].push(x);
        }
    }
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for root in 0..n {
        if visited[root] {
            continue;
        }
        visited[root] = true;
        let mut stack = vec![(root, 0usize)];
        while let Some(top) = stack.len().checked_sub(1) {
            let (x, next) = stack[top];
            let row = k.sparse_row(x);
            if next < row.len() {
                stack[top].1 += 1;
                let y = row[next].0;
                if !visited[y] {
                    visited[y] = true;
                    stack.push((y, 0));
                }
            } else {
                order.push(x);
                stack.pop();
            }
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut label = 0;
    for &root in order.iter().rev() {
        if comp[root] != usize::MAX {
            continue;
        }
        comp[root] = label;
        let mut stack = vec![root];
        while let Some(x) = stack.pop() {
            for &y in &reverse[x] {
                if comp[y] == usize::MAX {
                    comp[y] = label;
                    stack.push(y);
                }
            }
        }
        label += 1;
    }
    comp
}

/// The unique stationary law `pi P = pi`, zero on transient states.
///
/// Solved densely on the closed class (balance equations with one row
/// replaced by normalization); falls back to power iteration on the lazy
/// kernel if the dense system is numerically singular.
pub fn stationary_distribution(k: &FiniteKernel) -> Result<Vec<f64>> {
    let classes = closed_classes(k);
    if classes.len() != 1 {
        return Err(Error::Reducible {
            classes: classes.len(),
        });
    }
    Ok(class_stationary(k, &classes[0]))
}

/// Equal-weight mixture of the stationary laws of every closed class. For an
/// irreducible chain this is the stationary law.
pub(crate) fn mixture_stationary(k: &FiniteKernel) -> Vec<f64> {
    let classes = closed_classes(k);
    let mut pi = vec![0.0; k.n()];
    for class in &classes {
        for (p, q) in pi.iter_mut().zip(class_stationary(k, class)) {
            *p += q / classes.len() as f64;
        }
    }
    pi
}

fn class_stationary(k: &FiniteKernel, class: &[usize]) -> Vec<f64> {
    let m = class.len();
    let sub = k.matrix().select(class, class);
    let mut a = sub.transpose();
    for i in 0..m {
        a[(i, i)] -= 1.0;
    }
    for j in 0..m {
        a[(m - 1, j)] = 1.0;
    }
    let mut rhs = vec![0.0; m];
    rhs[m - 1] = 1.0;
    let local = match Lu::factor(a) {
        Ok(lu) => lu.solve(&rhs),
        Err(_) => power_iteration(&sub),
    };
    let mut pi = vec![0.0; k.n()];
    for (&x, v) in class.iter().zip(local) {
        pi[x] = v.max(0.0);
    }
    let total: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|v| *v /= total);
    pi
}

fn power_iteration(p: &Matrix) -> Vec<f64> {
    let m = p.rows();
    let mut mu = vec![1.0 / m as f64; m];
    for _ in 0..1_000_000 {
        let step = p.vec_mul(&mu);
        let next: Vec<f64> = mu.iter().zip(&step).map(|(a, b)| 0.5 * (a + b)).collect();
        let change = next.iter().zip(&mu).map(|(a, b)| (a - b).abs()).sum::<f64>();
        mu = next;
        if change < 1e-15 {
            break;
        }
    }
    mu
}
