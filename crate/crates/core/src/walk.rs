//! Single-step skeleton walking shared by pruning, arm extraction and tracing.

use crate::raster::Px;
use crate::skeleton::SkeletonMask;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    Next(Px),
    /// No open continuation: the walk is at an end.
    Stop,
    /// Two or more continuations that are not one segment.
    Fork(Vec<Px>),
}

/// Chooses where a walk standing on `cur` goes next. `blocked` marks pixels
/// already walked or otherwise off limits.
///
/// Two open neighbors that touch each other may still be one segment: a
/// one-pixel bump (one of them leads nowhere, and is taken first so it is not
/// stranded) or a staircase corner (both lead on to a shared pixel, and the
/// 4-neighbor is taken). Anything else is a fork.
pub fn next_step(sk: &SkeletonMask, cur: Px, blocked: impl Fn(Px) -> bool) -> Step {
    let mut open = [Px::default(); 8];
    let mut n = 0;
    for q in cur.neighbors8() {
        if sk.contains(q) && !blocked(q) {
            open[n] = q;
            n += 1;
        }
    }
    let open = &open[..n];
    match open.len() {
        0 => return Step::Stop,
        1 => return Step::Next(open[0]),
        _ => {}
    }
    // two open pixels that touch each other (more cannot, absent 2x2 blocks)
    if open.len() > 2 || !open[0].is_adjacent8(open[1]) {
        return Step::Fork(open.to_vec());
    }
    let (a, b) = (open[0], open[1]);
    let onward = |c: Px, other: Px| -> Vec<Px> {
        c.neighbors8()
            .filter(|&q| q != cur && q != other && sk.contains(q) && !blocked(q))
            .collect()
    };
    let (after_a, after_b) = (onward(a, b), onward(b, a));
    let choice = match (after_a.is_empty(), after_b.is_empty()) {
        (true, false) => a,
        (false, true) => b,
        (false, false) if !after_a.iter().any(|q| after_b.contains(q)) => {
            return Step::Fork(vec![a, b]);
        }
        _ => {
            if cur.is_adjacent4(a) || !cur.is_adjacent4(b) {
                a
            } else {
                b
            }
        }
    };
    Step::Next(choice)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::BinaryMask;

    fn sk(rows: &[&str]) -> SkeletonMask {
        SkeletonMask::from_mask(BinaryMask::from_ascii(rows))
    }

    /// Walks from `start` until it stops or forks, returning the visit order.
    fn walk(s: &SkeletonMask, start: Px) -> (Vec<Px>, Step) {
        let mut path = vec![start];
        loop {
            let cur = *path.last().unwrap();
            match next_step(s, cur, |q| path.contains(&q)) {
                Step::Next(q) => path.push(q),
                other => return (path, other),
            }
        }
    }

    #[test]
    fn staircase_is_walked_completely() {
        let s = sk(&["##....", ".##...", "..##..", "...###"]);
        let (path, end) = walk(&s, Px::new(0, 0));
        assert_eq!(end, Step::Stop);
        assert_eq!(path.len(), s.count());
        // 4-neighbors preferred: (0,0) -> (1,0) rather than (1,1)
        assert_eq!(path[1], Px::new(1, 0));
    }

    #[test]
    fn bump_pixel_is_not_stranded() {
        let s = sk(&["#####", "..#..", "....."]);
        let (path, end) = walk(&s, Px::new(0, 0));
        assert_eq!(end, Step::Stop);
        assert_eq!(path.len(), s.count());
    }

    #[test]
    fn junction_forks() {
        let s = sk(&["#####", "..#..", "..#..", "..#.."]);
        let (path, end) = walk(&s, Px::new(0, 0));
        assert!(matches!(end, Step::Fork(ref c) if c.len() == 2));
        assert_eq!(*path.last().unwrap(), Px::new(2, 0));

        let y = sk(&["#....#", ".#..#.", "..##..", "..#...", "..#..."]);
        let (path, end) = walk(&y, Px::new(2, 4));
        assert!(matches!(end, Step::Fork(_)), "{path:?}");
    }
}
