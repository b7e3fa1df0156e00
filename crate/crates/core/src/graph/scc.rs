//! Strongly connected components (iterative Tarjan).

/// Components of the digraph given by successor lists, in reverse
/// topological order of the condensation: a component is listed before
/// every component that can reach it. Vertices within a component are sorted.
pub fn tarjan(succ: &[Vec<usize>]) -> Vec<Vec<usize>> {
    tarjan_subset(succ, None)
}

/// Tarjan restricted to the vertices with `keep[v] == true`; edges into
/// dropped vertices are ignored.
pub fn tarjan_subset(succ: &[Vec<usize>], keep: Option<&[bool]>) -> Vec<Vec<usize>> {
    const UNVISITED: usize = usize::MAX;
    let n = succ.len();
    let kept = |v: usize| keep.map_or(true, |k| k[v]);
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut components = Vec::new();
    let mut next_index = 0;
    // (vertex, position in its successor list)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNVISITED || !kept(root) {
            continue;
        }
        call.push((root, 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if let Some(&w) = succ[v].get(*pos) {
                *pos += 1;
                if !kept(w) {
                    continue;
                }
                if index[w] == UNVISITED {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                components.push(comp);
            }
        }
    }
    components
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_is_one_component() {
        let succ: Vec<Vec<usize>> = (0..6).map(|i| vec![(i + 1) % 6]).collect();
        assert_eq!(tarjan(&succ), vec![vec![0, 1, 2, 3, 4, 5]]);
    }

    #[test]
    fn reverse_topological_order() {
        // 0 <-> 1 -> 2 <-> 3
        let succ = vec![vec![1], vec![0, 2], vec![3], vec![2]];
        let comps = tarjan(&succ);
        assert_eq!(comps, vec![vec![2, 3], vec![0, 1]]);
    }

    #[test]
    fn isolated_and_subset() {
        let succ = vec![vec![1], vec![0], vec![]];
        assert_eq!(tarjan(&succ).len(), 2);
        let keep = [true, true, false];
        assert_eq!(tarjan_subset(&succ, Some(&keep)), vec![vec![0, 1]]);
    }

    #[test]
    fn deep_path_does_not_overflow() {
        let n = 200_000;
        let succ: Vec<Vec<usize>> = (0..n).map(|i| vec![(i + 1) % n]).collect();
        assert_eq!(tarjan(&succ).len(), 1);
    }
}
