use crate::grid::Grid;
use crate::scalar::Real;

fn smoothstep<T: Real>(s: T) -> T {
    let s = s.max(T::zero()).min(T::one());
    s * s * (T::lit(3.0) - T::lit(2.0) * s)
}

/// Damping rate `sigma(x) >= 0`: zero in `|x| <= L - width`, then
/// `strength * smoothstep(s)^2` with `s = (|x| - (L - width)) / width`.
pub fn sponge_profile<T: Real>(grid: &Grid<T>, width: T, strength: T) -> Vec<T> {
    if width <= T::zero() {
        return vec![T::zero(); grid.len()];
    }
    let start = grid.half_length() - width;
    grid.coords()
        .map(|x| {
            let s = (x.abs() - start) / width;
            if s <= T::zero() {
                T::zero()
            } else {
                let h = smoothstep(s);
                strength * h * h
            }
        })
        .collect()
}
