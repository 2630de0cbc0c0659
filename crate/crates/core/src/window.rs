//! Finite size-closed windows of a wreath-product level.
//!
//! A window holds every object of a level up to a size bound together with
//! all morphisms between them, tabulated once so presheaves can store their
//! actions as plain index tables.  Operations that would leave the window
//! report [`crate::Error::WindowExhausted`] rather than guessing.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::theta::{all_objects, enumerate_hom, ThetaMorphism, ThetaObject};
use crate::{Error, Result};

pub struct Window {
    level: usize,
    max_size: usize,
    objects: Vec<ThetaObject>,
    index: HashMap<ThetaObject, usize>,
    homs: Vec<Vec<Vec<ThetaMorphism>>>,
    hom_index: Vec<Vec<HashMap<ThetaMorphism, usize>>>,
    comp_cache: Mutex<HashMap<(usize, usize, usize, usize, usize), usize>>,
}

impl Window {
    pub fn new(level: usize, max_size: usize) -> Arc<Window> {
        let objects = all_objects(level, max_size);
        let count = objects.len();
        let index: HashMap<ThetaObject, usize> =
            objects.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        let mut homs = Vec::with_capacity(count);
        let mut hom_index = Vec::with_capacity(count);
        for a in &objects {
            let mut row = Vec::with_capacity(count);
            let mut row_index = Vec::with_capacity(count);
            for b in &objects {
                let hom = enumerate_hom(a, b);
                let idx: HashMap<ThetaMorphism, usize> =
                    hom.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect();
                row.push(hom);
                row_index.push(idx);
            }
            homs.push(row);
            hom_index.push(row_index);
        }
        Arc::new(Window {
            level,
            max_size,
            objects,
            index,
            homs,
            hom_index,
            comp_cache: Mutex::new(HashMap::new()),
        })
    }

    /// Index of `hom(b, c)[gi] . hom(a, b)[fi]` inside `hom(a, c)`, memoized
    /// per window so repeated validation sweeps pay for each pair once.
    pub fn compose_idx(&self, a: usize, b: usize, c: usize, fi: usize, gi: usize) -> Result<usize> {
        let key = (a, b, c, fi, gi);
        if let Some(&i) = self.comp_cache.lock().unwrap().get(&key) {
            return Ok(i);
        }
        let gf = crate::theta::compose_theta(&self.homs[b][c][gi], &self.homs[a][b][fi])?;
        let i = *self.hom_index[a][c]
            .get(&gf)
            .ok_or_else(|| Error::Invariant("composite missing from its tabulated hom set".into()))?;
        self.comp_cache.lock().unwrap().insert(key, i);
        Ok(i)
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn max_size(&self) -> usize {
        self.max_size
    }

    pub fn objects(&self) -> &[ThetaObject] {
        &self.objects
    }

    pub fn object(&self, i: usize) -> &ThetaObject {
        &self.objects[i]
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn contains(&self, t: &ThetaObject) -> bool {
        self.index.contains_key(t)
    }

    pub fn index_of(&self, t: &ThetaObject) -> Result<usize> {
        self.index.get(t).copied().ok_or_else(|| {
            Error::WindowExhausted(format!(
                "object {t} outside the level-{} window of size {}",
                self.level, self.max_size
            ))
        })
    }

    /// The terminal object's index; objects are sorted by size, so it is 0.
    pub fn terminal_index(&self) -> usize {
        debug_assert!(self.objects[0].is_terminal());
        0
    }

    pub fn hom(&self, a: usize, b: usize) -> &[ThetaMorphism] {
        &self.homs[a][b]
    }

    pub fn hom_of(&self, a: &ThetaObject, b: &ThetaObject) -> Result<&[ThetaMorphism]> {
        Ok(self.hom(self.index_of(a)?, self.index_of(b)?))
    }

    /// Locate a morphism: `(source index, target index, position in hom)`.
    pub fn locate(&self, f: &ThetaMorphism) -> Result<(usize, usize, usize)> {
        let a = self.index_of(&f.src)?;
        let b = self.index_of(&f.dst)?;
        let i = self.hom_index[a][b].get(f).copied().ok_or_else(|| {
            Error::Invariant(format!("morphism {f:?} missing from its tabulated hom set"))
        })?;
        Ok((a, b, i))
    }

    pub fn morphism_count(&self) -> usize {
        self.homs.iter().flatten().map(Vec::len).sum()
    }

    /// Iterate `(source index, target index, morphism)` over the window.
    pub fn morphisms(&self) -> impl Iterator<Item = (usize, usize, &ThetaMorphism)> {
        self.homs.iter().enumerate().flat_map(|(a, row)| {
            row.iter().enumerate().flat_map(move |(b, hom)| hom.iter().map(move |f| (a, b, f)))
        })
    }
}

/// Windows for every suspension depth of a base window: depth `k` holds the
/// level `n - k` objects of size at most `s - k`, exactly the trees `t` with
/// `sigma^k t` inside the base window.
pub struct WindowTower {
    windows: Vec<Arc<Window>>,
}

impl WindowTower {
    pub fn new(level: usize, max_size: usize) -> Self {
        let windows = (0..=level)
            .map(|k| Window::new(level - k, max_size.saturating_sub(k)))
            .collect();
        WindowTower { windows }
    }

    pub fn base(&self) -> &Arc<Window> {
        &self.windows[0]
    }

    pub fn depth(&self, k: usize) -> &Arc<Window> {
        &self.windows[k]
    }

    pub fn depths(&self) -> usize {
        self.windows.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_object_counts() {
        assert_eq!(Window::new(2, 4).len(), 16);
        assert_eq!(Window::new(3, 3).len(), 9);
        assert_eq!(Window::new(1, 3).len(), 4);
    }

    #[test]
    fn locate_round_trips() {
        let w = Window::new(2, 3);
        for (a, b, f) in w.morphisms() {
            let (a2, b2, i) = w.locate(f).unwrap();
            assert_eq!((a2, b2), (a, b));
            assert_eq!(&w.hom(a, b)[i], f);
        }
    }

    #[test]
    fn missing_objects_exhaust_the_window() {
        let w = Window::new(2, 2);
        let big = ThetaObject::parse("[3]", 2).unwrap();
        assert!(matches!(w.index_of(&big), Err(Error::WindowExhausted(_))));
    }

    #[test]
    fn tower_depths_shrink() {
        let t = WindowTower::new(2, 4);
        assert_eq!(t.depths(), 3);
        assert_eq!(t.base().level(), 2);
        assert_eq!(t.depth(1).level(), 1);
        assert_eq!(t.depth(1).max_size(), 3);
        assert_eq!(t.depth(2).level(), 0);
        assert_eq!(t.depth(2).len(), 1);
    }

    #[test]
    fn terminal_sits_first() {
        let w = Window::new(2, 4);
        assert!(w.object(w.terminal_index()).is_terminal());
        for (i, t) in w.objects().iter().enumerate() {
            if i > 0 {
                assert!(t.size() >= w.object(i - 1).size());
            }
        }
    }
}
