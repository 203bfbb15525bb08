use super::{check_endo, Theory, TheoryError};

pub const DEFAULT_STAR_ROUNDS: usize = 10_000;
pub const DEFAULT_OMEGA_ROUNDS: usize = 10_000;

/// Kleene iteration `X₀ = id`, `X_{k+1} = X_k·(id ∨ α)`, stopped when the
/// instance comparator sees two equal consecutive iterates.
pub fn star_iterative<T: Theory + ?Sized>(t: &T, alpha: &T::Arrow, max_rounds: usize) -> Result<T::Arrow, TheoryError> {
    let n = check_endo(t, alpha, "star")?;
    let step = t.join(&t.identity(n), alpha)?;
    let mut x = t.identity(n);
    for _ in 0..max_rounds {
        let next = t.compose(&x, &step)?;
        if t.compare(&next, &x)?.holds() {
            return Ok(next);
        }
        x = next;
    }
    Err(TheoryError::NoFixpoint { rounds: max_rounds })
}

/// Co-Kleene iteration from the top of `hom(n, 0)`: `x_{k+1} = x_k·β`.
pub fn omega_iterative<T: Theory + ?Sized>(t: &T, beta: &T::Arrow, max_rounds: usize) -> Result<T::Arrow, TheoryError> {
    let n = check_endo(t, beta, "omega")?;
    let mut x = t
        .top(n)
        .ok_or_else(|| TheoryError::Unsupported("no top element in hom(n, 0)".into()))?;
    for _ in 0..max_rounds {
        let next = t.compose(&x, beta)?;
        if t.compare(&next, &x)?.holds() {
            return Ok(next);
        }
        x = next;
    }
    Err(TheoryError::NoFixpoint { rounds: max_rounds })
}

/// `α⁺ = α*·α`.
pub fn plus<T: Theory + ?Sized>(t: &T, alpha: &T::Arrow) -> Result<T::Arrow, TheoryError> {
    t.compose(&t.star(alpha)?, alpha)
}

/// `α* = [α, in^p]*·in^n` for `α : n ⇸ n+p`.
pub fn extended_star<T: Theory + ?Sized>(t: &T, alpha: &T::Arrow) -> Result<T::Arrow, TheoryError> {
    let n = t.dom(alpha);
    let total = t.cod(alpha);
    if total < n {
        return Err(TheoryError::Type(format!(
            "extended star needs n ⇸ n+p, got {n} -> {total}"
        )));
    }
    let p = total - n;
    let square = t.cotuple(&[alpha.clone(), t.injection(1, &[n, p])?])?;
    t.compose(&t.star(&square)?, &t.injection(0, &[n, p])?)
}

/// Base map sending everything to the single point: `! : n ⇸ 1`.
pub fn bang<T: Theory + ?Sized>(t: &T, n: usize) -> T::Arrow {
    t.base(&vec![0; n], 1).expect("constant map into 1")
}

/// Diagonal arrow `f_F : n ⇸ n` that is the identity on `F` and bottom elsewhere.
pub fn final_map<T: Theory + ?Sized>(t: &T, n: usize, accepting: &[bool]) -> Result<T::Arrow, TheoryError> {
    if accepting.len() != n {
        return Err(TheoryError::Type(format!(
            "final set over {} states for n = {n}",
            accepting.len()
        )));
    }
    if n == 0 {
        return Ok(t.bottom(0, 0));
    }
    let rows: Vec<T::Arrow> = (0..n)
        .map(|j| {
            if accepting[j] {
                t.base(&[j], n)
            } else {
                Ok(t.bottom(1, n))
            }
        })
        .collect::<Result<_, _>>()?;
    t.cotuple(&rows)
}

/// Base map on `sizes` blocks that places block `order[k]` at position `k`.
/// Returns the map from the original layout to the permuted one.
fn block_permutation(sizes: &[usize], order: &[usize]) -> Vec<usize> {
    let mut start = vec![0; sizes.len()];
    let mut acc = 0;
    for &b in order {
        start[b] = acc;
        acc += sizes[b];
    }
    let mut map = Vec::with_capacity(acc);
    for (b, &s) in sizes.iter().enumerate() {
        for i in 0..s {
            map.push(start[b] + i);
        }
    }
    map
}

/// Left side of the star pairing identity: `[f, g]*` for `f : n ⇸ n+m+p`
/// and `g : m ⇸ n+m+p`.
pub fn gspi_lhs<T: Theory + ?Sized>(t: &T, f: &T::Arrow, g: &T::Arrow) -> Result<T::Arrow, TheoryError> {
    extended_star(t, &t.cotuple(&[f.clone(), g.clone()])?)
}

/// Right side of the star pairing identity,
/// `[[in^n, K, in^p]·f*, K]` with `K = (π⁻¹+id_p)·k*` and
/// `k = [(π+id_p)·f*, [in^m, in^p]]·g`, where `π` swaps the `n` and `m` blocks.
pub fn gspi_rhs<T: Theory + ?Sized>(t: &T, f: &T::Arrow, g: &T::Arrow) -> Result<T::Arrow, TheoryError> {
    let n = t.dom(f);
    let m = t.dom(g);
    let total = t.cod(f);
    if t.cod(g) != total || total < n + m {
        return Err(TheoryError::Type(format!(
            "pairing needs f : n ⇸ n+m+p and g : m ⇸ n+m+p, got {n} -> {total} and {m} -> {}",
            t.cod(g)
        )));
    }
    let p = total - n - m;
    let swap = t.base(&block_permutation(&[n, m, p], &[1, 0, 2]), total)?;
    let unswap = t.base(&block_permutation(&[m, n, p], &[1, 0, 2]), total)?;
    let f_star = extended_star(t, f)?;
    let m_and_p: Vec<usize> = (0..m).chain(m + n..m + n + p).collect();
    let k = t.compose(&t.cotuple(&[t.compose(&swap, &f_star)?, t.base(&m_and_p, total)?])?, g)?;
    let big_k = t.compose(&unswap, &extended_star(t, &k)?)?;
    let first = t.compose(
        &t.cotuple(&[t.injection(0, &[n, m + p])?, big_k.clone(), t.injection(2, &[n, m, p])?])?,
        &f_star,
    )?;
    t.cotuple(&[first, big_k])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_permutation_swaps() {
        assert_eq!(block_permutation(&[1, 2, 1], &[1, 0, 2]), vec![2, 0, 1, 3]);
        assert_eq!(block_permutation(&[2, 1, 0], &[1, 0, 2]), vec![1, 2, 0]);
    }
}
