//! Origin-anchored hierarchical grid: level `l` has cells of side `2^-l`.

/// Levels are clamped to this range so that `2^l` stays a normal double.
pub const MAX_LEVEL: i32 = 1000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridCellKey {
    pub level: i32,
    pub coords: Vec<i64>,
}

impl GridCellKey {
    /// The cell containing `p` at `level`: `floor(p * 2^level)` per axis.
    pub fn of(p: &[f64], level: i32) -> Self {
        let s = scale(level);
        Self {
            level,
            coords: p.iter().map(|x| (x * s).floor() as i64).collect(),
        }
    }

    pub fn side(&self) -> f64 {
        side(self.level)
    }

    /// Lower corner of the cell.
    pub fn corner(&self) -> Vec<f64> {
        let a = self.side();
        self.coords.iter().map(|&c| c as f64 * a).collect()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        *self == Self::of(p, self.level)
    }

    /// Key of the enclosing cell one level coarser.
    pub fn parent(&self) -> Self {
        Self {
            level: self.level - 1,
            coords: self.coords.iter().map(|c| c.div_euclid(2)).collect(),
        }
    }
}

#[inline]
pub fn scale(level: i32) -> f64 {
    2f64.powi(level)
}

#[inline]
pub fn side(level: i32) -> f64 {
    2f64.powi(-level)
}

/// Finest level at which `p` and `q` share a cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SharedLevel {
    /// Different closed orthants: no level puts them in one cell.
    Never,
    Finest(i32),
    /// Identical points share every cell.
    Always,
}

fn same_cell(p: &[f64], q: &[f64], level: i32) -> bool {
    let s = scale(level);
    p.iter().zip(q).all(|(a, b)| (a * s).floor() == (b * s).floor())
}

pub fn shared_level(p: &[f64], q: &[f64]) -> SharedLevel {
    if p == q {
        return SharedLevel::Always;
    }
    // Cells never straddle a coordinate hyperplane through the origin.
    if p.iter().zip(q).any(|(a, b)| (*a < 0.0) != (*b < 0.0)) {
        return SharedLevel::Never;
    }
    let gap = p
        .iter()
        .zip(q)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    // Sharing needs side 2^-l > gap, so l < -log2(gap).
    let mut level = ((-gap.log2()).ceil() as i32).clamp(-MAX_LEVEL, MAX_LEVEL);
    while level < MAX_LEVEL && same_cell(p, q, level + 1) {
        level += 1;
    }
    while !same_cell(p, q, level) {
        level -= 1;
        if level < -MAX_LEVEL {
            return SharedLevel::Never;
        }
    }
    SharedLevel::Finest(level)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_keys_floor() {
        let k = GridCellKey::of(&[0.75, -0.25], 1);
        assert_eq!(k.coords, vec![1, -1]);
        assert_eq!(k.corner(), vec![0.5, -0.5]);
        assert!(k.contains(&[0.5, -0.5]));
        assert!(!k.contains(&[1.0, -0.5]));
        assert_eq!(GridCellKey::of(&[5.0], -2).coords, vec![1]);
    }

    #[test]
    fn parent_contains_child() {
        let p = [0.3, -1.7, 2.2];
        for l in -4..8 {
            let k = GridCellKey::of(&p, l);
            assert_eq!(k.parent(), GridCellKey::of(&p, l - 1));
        }
    }

    #[test]
    fn shared_levels() {
        assert_eq!(shared_level(&[0.0, 0.0], &[1.0, 0.0]), SharedLevel::Finest(-1));
        assert_eq!(shared_level(&[0.1], &[0.1]), SharedLevel::Always);
        assert_eq!(shared_level(&[-0.1], &[0.1]), SharedLevel::Never);
        assert_eq!(shared_level(&[0.25], &[0.3]), SharedLevel::Finest(4));
    }

    #[test]
    fn shared_level_is_exact() {
        let pts = [[0.1, 0.7], [0.11, 0.69], [3.0, 0.2], [0.5, 0.5], [1e-9, 1e-9]];
        for p in &pts {
            for q in &pts {
                if p == q {
                    continue;
                }
                if let SharedLevel::Finest(l) = shared_level(p, q) {
                    assert!(same_cell(p, q, l));
                    assert!(!same_cell(p, q, l + 1));
                    assert!(same_cell(p, q, l - 5));
                }
            }
        }
    }
}
