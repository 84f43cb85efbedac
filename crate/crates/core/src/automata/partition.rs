//! Hopcroft partition refinement shared by `Dfa` and `Dfao` minimization.

use std::collections::VecDeque;

/// Coarsest partition of `0..n` that refines `labels` and is stable under
/// every letter. `trans[s * sigma + a]` is the successor of `s` on `a`.
/// Returns a block index per state.
pub(crate) fn refine(n: usize, sigma: usize, trans: &[u32], labels: &[u32]) -> Vec<u32> {
    if n == 0 {
        return Vec::new();
    }
    debug_assert_eq!(trans.len(), n * sigma);

    // predecessor lists, bucketed by (letter, target)
    let mut inv_off = vec![0u32; sigma * n + 1];
    for s in 0..n {
        for a in 0..sigma {
            let t = trans[s * sigma + a] as usize;
            inv_off[a * n + t + 1] += 1;
        }
    }
    for i in 1..inv_off.len() {
        inv_off[i] += inv_off[i - 1];
    }
    let mut fill = inv_off.clone();
    let mut inv = vec![0u32; n * sigma];
    for s in 0..n {
        for a in 0..sigma {
            let t = trans[s * sigma + a] as usize;
            let slot = &mut fill[a * n + t];
            inv[*slot as usize] = s as u32;
            *slot += 1;
        }
    }

    // initial blocks by label
    let mut elems: Vec<u32> = (0..n as u32).collect();
    elems.sort_by_key(|&s| (labels[s as usize], s));
    let mut loc = vec![0usize; n];
    let mut block = vec![0u32; n];
    let mut bstart = Vec::new();
    let mut bend = Vec::new();
    for (pos, &s) in elems.iter().enumerate() {
        loc[s as usize] = pos;
        if pos == 0 || labels[s as usize] != labels[elems[pos - 1] as usize] {
            if pos > 0 {
                bend.push(pos);
            }
            bstart.push(pos);
        }
        block[s as usize] = (bstart.len() - 1) as u32;
    }
    bend.push(n);
    let mut bmark = vec![0usize; bstart.len()];

    let mut in_w = vec![false; bstart.len() * sigma];
    let mut work = VecDeque::new();
    let largest = (0..bstart.len())
        .max_by_key(|&b| bend[b] - bstart[b])
        .unwrap_or(0);
    for b in 0..bstart.len() {
        if b == largest {
            continue;
        }
        for a in 0..sigma {
            in_w[b * sigma + a] = true;
            work.push_back((b as u32, a as u32));
        }
    }

    let mut splitter = Vec::new();
    let mut touched = Vec::new();
    while let Some((b, a)) = work.pop_front() {
        let (b, a) = (b as usize, a as usize);
        in_w[b * sigma + a] = false;
        splitter.clear();
        splitter.extend_from_slice(&elems[bstart[b]..bend[b]]);
        for &s in &splitter {
            let key = a * n + s as usize;
            for &p in &inv[inv_off[key] as usize..inv_off[key + 1] as usize] {
                let p = p as usize;
                let y = block[p] as usize;
                let boundary = bstart[y] + bmark[y];
                if loc[p] >= boundary {
                    let other = elems[boundary] as usize;
                    elems.swap(loc[p], boundary);
                    loc[other] = loc[p];
                    loc[p] = boundary;
                    if bmark[y] == 0 {
                        touched.push(y);
                    }
                    bmark[y] += 1;
                }
            }
        }
        for &y in &touched {
            let marked = bmark[y];
            bmark[y] = 0;
            let size = bend[y] - bstart[y];
            if marked == size {
                continue;
            }
            let z = bstart.len();
            bstart.push(bstart[y]);
            bend.push(bstart[y] + marked);
            bmark.push(0);
            bstart[y] += marked;
            for pos in bstart[z]..bend[z] {
                block[elems[pos] as usize] = z as u32;
            }
            in_w.resize(bstart.len() * sigma, false);
            let smaller = if marked <= size - marked { z } else { y };
            for c in 0..sigma {
                let target = if in_w[y * sigma + c] { z } else { smaller };
                if !in_w[target * sigma + c] {
                    in_w[target * sigma + c] = true;
                    work.push_back((target as u32, c as u32));
                }
            }
        }
        touched.clear();
    }
    block
}

/// Renumbers the states reachable from `initial` in breadth-first order,
/// visiting letters in increasing order. Returns the old-to-new map
/// (`u32::MAX` for unreachable states) and the visit order.
pub(crate) fn bfs_order(n: usize, sigma: usize, trans: &[u32], initial: u32) -> (Vec<u32>, Vec<u32>) {
    let mut map = vec![u32::MAX; n];
    let mut order = Vec::new();
    map[initial as usize] = 0;
    order.push(initial);
    let mut head = 0;
    while head < order.len() {
        let s = order[head] as usize;
        head += 1;
        for a in 0..sigma {
            let t = trans[s * sigma + a];
            if map[t as usize] == u32::MAX {
                map[t as usize] = order.len() as u32;
                order.push(t);
            }
        }
    }
    (map, order)
}
