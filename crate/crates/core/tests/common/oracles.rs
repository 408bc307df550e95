//! Independent oracles shared by several test targets.

use maidkit_core::graphs::Dag;
use maidkit_core::lp::{LinearProgram, Relation};
use maidkit_core::Rational;
use num_traits::{One, Zero};
use rand::Rng;

/// All simple paths in the skeleton; a path is active iff every interior node is
/// either a collider with itself or a descendant observed, or an unobserved non-collider.
pub fn path_oracle(g: &Dag, x: usize, y: usize, z: &[usize]) -> bool {
    let n = g.len();
    let observed: Vec<bool> = (0..n).map(|v| z.contains(&v)).collect();
    let anc_obs = g.ancestors(z);
    let mut path = vec![x];
    let mut on = vec![false; n];
    on[x] = true;
    fn neighbours(g: &Dag, v: usize) -> Vec<usize> {
        g.parents(v).iter().chain(g.children(v)).copied().collect()
    }
    fn dfs(g: &Dag, y: usize, path: &mut Vec<usize>, on: &mut Vec<bool>, observed: &[bool], anc_obs: &[bool]) -> bool {
        let last = *path.last().unwrap();
        if last == y {
            return active(g, path, observed, anc_obs);
        }
        for w in neighbours(g, last) {
            if !on[w] {
                on[w] = true;
                path.push(w);
                if dfs(g, y, path, on, observed, anc_obs) {
                    return true;
                }
                path.pop();
                on[w] = false;
            }
        }
        false
    }
    fn active(g: &Dag, path: &[usize], observed: &[bool], anc_obs: &[bool]) -> bool {
        (1..path.len() - 1).all(|i| {
            let (a, b, c) = (path[i - 1], path[i], path[i + 1]);
            let collider = g.parents(b).contains(&a) && g.parents(b).contains(&c);
            if collider {
                anc_obs[b]
            } else {
                !observed[b]
            }
        })
    }
    !dfs(g, y, &mut path, &mut on, &observed, &anc_obs)
}

pub fn random_dag(rng: &mut impl rand::Rng, n: usize, p: f64) -> Dag {
    let mut g = Dag::new(n);
    for j in 0..n {
        for i in 0..j {
            if rng.gen_bool(p) {
                g.add_edge(i, j);
            }
        }
    }
    g
}

/// Solves a square system by Gauss-Jordan elimination; `None` if singular.
pub fn solve_square(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let p = a[col][col].clone();
        for x in a[col].iter_mut() {
            *x /= &p;
        }
        b[col] /= &p;
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..n {
                    let d = &f * &a[col][c];
                    a[r][c] -= d;
                }
                let d = &f * &b[col];
                b[r] -= d;
            }
        }
    }
    Some(b)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n < k {
        return Vec::new();
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Best objective over all vertices of {x ≥ 0, constraints}; `None` if there are none.
pub fn vertex_optimum(lp: &LinearProgram, maximize: bool) -> Option<Rational> {
    let n = lp.len();
    // every hyperplane: constraint rows, then the coordinate planes x_j = 0
    let mut planes: Vec<(Vec<Rational>, Rational)> = lp.constraints.iter().map(|c| (c.coeffs.clone(), c.rhs.clone())).collect();
    for j in 0..n {
        let mut e = vec![Rational::zero(); n];
        e[j] = Rational::one();
        planes.push((e, Rational::zero()));
    }
    let mut best: Option<Rational> = None;
    for s in subsets(planes.len(), n) {
        let a = s.iter().map(|&i| planes[i].0.clone()).collect();
        let b = s.iter().map(|&i| planes[i].1.clone()).collect();
        let Some(x) = solve_square(a, b) else { continue };
        if !lp.is_feasible(&x) {
            continue;
        }
        let v: Rational = lp.objective.iter().zip(&x).map(|(c, x)| c * x).sum();
        let better = best.as_ref().is_none_or(|b| if maximize { v > *b } else { v < *b });
        if better {
            best = Some(v);
        }
    }
    best
}

pub fn random_lp(r: &mut impl Rng, bounded: bool) -> (LinearProgram, bool) {
    let n = r.gen_range(1..=6);
    let m = r.gen_range(1..=9);
    let mut lp = LinearProgram::new(n);
    let coeff = |r: &mut dyn rand::RngCore| Rational::new(r.gen_range(-6..=6).into(), r.gen_range(1..=3).into());
    for _ in 0..m {
        let coeffs = (0..n).map(|_| coeff(r)).collect();
        let rel = [Relation::Le, Relation::Le, Relation::Ge, Relation::Eq][r.gen_range(0..4)];
        let rhs = Rational::new(r.gen_range(-4..=10).into(), r.gen_range(1..=2).into());
        lp.add(coeffs, rel, rhs);
    }
    if bounded {
        lp.add(vec![Rational::one(); n], Relation::Le, Rational::from_integer(10.into()));
    }
    let objective = (0..n).map(|_| coeff(r)).collect();
    let maximize = r.gen_bool(0.5);
    if maximize {
        lp.maximize(objective);
    } else {
        lp.minimize(objective);
    }
    (lp, maximize)
}

