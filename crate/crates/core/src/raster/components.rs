use std::collections::VecDeque;

use super::{offset, BinaryMask, Raster, NEIGHBORS_8};

/// 8-connected components of a mask.
#[derive(Clone, Debug)]
pub struct Components {
    /// Number of components.
    pub count: usize,
    /// `0` for background, `1..=count` for component pixels. Components are
    /// numbered in raster order of their first pixel.
    pub labels: Raster<u32>,
}

impl Components {
    /// Pixel indices of each component, in raster order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut members = vec![Vec::new(); self.count];
        for (i, &l) in self.labels.data().iter().enumerate() {
            if l > 0 {
                members[l as usize - 1].push(i);
            }
        }
        members
    }
}

pub fn connected_components(mask: &BinaryMask) -> Components {
    let (w, h) = mask.dimensions();
    let mut labels = Raster::filled(w, h, 0u32);
    let mut count = 0u32;
    let mut queue = VecDeque::new();
    for start in 0..mask.len() {
        if !mask.data()[start] || labels.data()[start] != 0 {
            continue;
        }
        count += 1;
        labels.data_mut()[start] = count;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            let (x, y) = (i % w, i / w);
            for &d in &NEIGHBORS_8 {
                if let Some((nx, ny)) = offset(x, y, d, w, h) {
                    let j = ny * w + nx;
                    if mask.data()[j] && labels.data()[j] == 0 {
                        labels.data_mut()[j] = count;
                        queue.push_back(j);
                    }
                }
            }
        }
    }
    Components {
        count: count as usize,
        labels,
    }
}
