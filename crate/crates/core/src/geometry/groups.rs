use std::collections::BTreeMap;

use super::intersect::IntersectionRecord;
use super::layout::{EdgeId, GraphLayout};

/// Partitions edges into morphing groups: connected components of the
/// "shares a crossing" relation. Groups are sorted by their smallest edge id
/// and each group lists its edges in ascending id order.
pub fn morphing_groups(layout: &GraphLayout, records: &[IntersectionRecord]) -> Vec<Vec<EdgeId>> {
    let ids: Vec<EdgeId> = layout.edges().iter().map(|e| e.id).collect();
    let index: BTreeMap<EdgeId, usize> = ids.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let mut parent: Vec<usize> = (0..ids.len()).collect();

    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }

    for r in records {
        let a = find(&mut parent, index[&r.edge]);
        let b = find(&mut parent, index[&r.opposite]);
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut groups: BTreeMap<usize, Vec<EdgeId>> = BTreeMap::new();
    for (i, &id) in ids.iter().enumerate() {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(id);
    }
    let mut out: Vec<Vec<EdgeId>> = groups.into_values().collect();
    for g in &mut out {
        g.sort();
    }
    out.sort_by_key(|g| g[0]);
    out
}
