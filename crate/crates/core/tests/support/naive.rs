//! Deliberately simple mailbox chess rules used as an independent oracle for move generation,
//! FEN writing and perft. Shares no code with the library.

#![allow(dead_code)]

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Board {
    /// sq = rank * 8 + file; pieces as FEN chars, '.' empty.
    pub sq: [char; 64],
    pub white: bool,
    pub castle: [bool; 4], // K Q k q
    pub ep: Option<usize>,
    pub half: u32,
    pub full: u32,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct NMove {
    pub from: usize,
    pub to: usize,
    pub promo: Option<char>,
}

impl NMove {
    pub fn uci(&self) -> String {
        let n = |s: usize| format!("{}{}", (b'a' + (s % 8) as u8) as char, s / 8 + 1);
        let mut t = format!("{}{}", n(self.from), n(self.to));
        if let Some(p) = self.promo {
            t.push(p.to_ascii_lowercase());
        }
        t
    }
}

fn is_white(c: char) -> bool {
    c.is_ascii_uppercase()
}

fn on(f: i32, r: i32) -> bool {
    (0..8).contains(&f) && (0..8).contains(&r)
}

impl Board {
    pub fn from_fen(fen: &str) -> Board {
        let f: Vec<&str> = fen.split_whitespace().collect();
        let mut sq = ['.'; 64];
        for (i, row) in f[0].split('/').enumerate() {
            let rank = 7 - i;
            let mut file = 0;
            for c in row.chars() {
                if let Some(d) = c.to_digit(10) {
                    file += d as usize;
                } else {
                    sq[rank * 8 + file] = c;
                    file += 1;
                }
            }
        }
        let ep = if f[3] == "-" {
            None
        } else {
            let b = f[3].as_bytes();
            Some((b[1] - b'1') as usize * 8 + (b[0] - b'a') as usize)
        };
        Board {
            sq,
            white: f[1] == "w",
            castle: [
                f[2].contains('K'),
                f[2].contains('Q'),
                f[2].contains('k'),
                f[2].contains('q'),
            ],
            ep,
            half: f.get(4).map(|s| s.parse().unwrap()).unwrap_or(0),
            full: f.get(5).map(|s| s.parse().unwrap()).unwrap_or(1),
        }
    }

    pub fn to_fen(&self) -> String {
        let mut s = String::new();
        for rank in (0..8).rev() {
            let mut run = 0;
            for file in 0..8 {
                let c = self.sq[rank * 8 + file];
                if c == '.' {
                    run += 1;
                } else {
                    if run > 0 {
                        s += &run.to_string();
                        run = 0;
                    }
                    s.push(c);
                }
            }
            if run > 0 {
                s += &run.to_string();
            }
            if rank > 0 {
                s.push('/');
            }
        }
        s += if self.white { " w " } else { " b " };
        let mut c = String::new();
        for (i, ch) in ['K', 'Q', 'k', 'q'].iter().enumerate() {
            if self.castle[i] {
                c.push(*ch);
            }
        }
        if c.is_empty() {
            c.push('-');
        }
        s += &c;
        s.push(' ');
        match self.ep {
            Some(e) => s += &format!("{}{}", (b'a' + (e % 8) as u8) as char, e / 8 + 1),
            None => s.push('-'),
        }
        s += &format!(" {} {}", self.half, self.full);
        s
    }

    fn own(&self, c: char) -> bool {
        c != '.' && is_white(c) == self.white
    }

    fn enemy(&self, c: char) -> bool {
        c != '.' && is_white(c) != self.white
    }

    /// Is `target` attacked by side `by_white`?
    pub fn attacked(&self, target: usize, by_white: bool) -> bool {
        for s in 0..64 {
            let c = self.sq[s];
            if c == '.' || is_white(c) != by_white {
                continue;
            }
            let (f, r) = ((s % 8) as i32, (s / 8) as i32);
            let (tf, tr) = ((target % 8) as i32, (target / 8) as i32);
            let (df, dr) = (tf - f, tr - r);
            match c.to_ascii_lowercase() {
                'p' => {
                    let dir = if by_white { 1 } else { -1 };
                    if dr == dir && df.abs() == 1 {
                        return true;
                    }
                }
                'n' => {
                    if (df.abs() == 1 && dr.abs() == 2) || (df.abs() == 2 && dr.abs() == 1) {
                        return true;
                    }
                }
                'k' => {
                    if df.abs() <= 1 && dr.abs() <= 1 && (df, dr) != (0, 0) {
                        return true;
                    }
                }
                p => {
                    let straight = df == 0 || dr == 0;
                    let diag = df.abs() == dr.abs();
                    if (df, dr) == (0, 0) {
                        continue;
                    }
                    let ok = match p {
                        'r' => straight,
                        'b' => diag,
                        'q' => straight || diag,
                        _ => false,
                    };
                    if !ok {
                        continue;
                    }
                    let (sf, sr) = (df.signum(), dr.signum());
                    let (mut x, mut y) = (f + sf, r + sr);
                    let mut clear = true;
                    while (x, y) != (tf, tr) {
                        if self.sq[(y * 8 + x) as usize] != '.' {
                            clear = false;
                            break;
                        }
                        x += sf;
                        y += sr;
                    }
                    if clear {
                        return true;
                    }
                }
            }
        }
        false
    }

    fn king(&self, white: bool) -> usize {
        let k = if white { 'K' } else { 'k' };
        (0..64).find(|&s| self.sq[s] == k).expect("king")
    }

    fn pseudo(&self) -> Vec<NMove> {
        let mut out = Vec::new();
        for s in 0..64 {
            let c = self.sq[s];
            if !self.own(c) {
                continue;
            }
            let (f, r) = ((s % 8) as i32, (s / 8) as i32);
            let add = |to: usize, promo_rank: bool, out: &mut Vec<NMove>| {
                if promo_rank {
                    for p in ['q', 'r', 'b', 'n'] {
                        out.push(NMove { from: s, to, promo: Some(p) });
                    }
                } else {
                    out.push(NMove { from: s, to, promo: None });
                }
            };
            match c.to_ascii_lowercase() {
                'p' => {
                    let dir = if self.white { 1 } else { -1 };
                    let start = if self.white { 1 } else { 6 };
                    let last = if self.white { 7 } else { 0 };
                    let r1 = r + dir;
                    if on(f, r1) && self.sq[(r1 * 8 + f) as usize] == '.' {
                        add((r1 * 8 + f) as usize, r1 == last, &mut out);
                        let r2 = r + 2 * dir;
                        if r == start && self.sq[(r2 * 8 + f) as usize] == '.' {
                            add((r2 * 8 + f) as usize, false, &mut out);
                        }
                    }
                    for df in [-1, 1] {
                        let (x, y) = (f + df, r1);
                        if !on(x, y) {
                            continue;
                        }
                        let t = (y * 8 + x) as usize;
                        if self.enemy(self.sq[t]) || self.ep == Some(t) {
                            add(t, y == last, &mut out);
                        }
                    }
                }
                'n' | 'k' => {
                    let deltas: &[(i32, i32)] = if c.to_ascii_lowercase() == 'n' {
                        &[(1, 2), (2, 1), (2, -1), (1, -2), (-1, -2), (-2, -1), (-2, 1), (-1, 2)]
                    } else {
                        &[(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)]
                    };
                    for &(df, dr) in deltas {
                        let (x, y) = (f + df, r + dr);
                        if on(x, y) && !self.own(self.sq[(y * 8 + x) as usize]) {
                            add((y * 8 + x) as usize, false, &mut out);
                        }
                    }
                }
                p => {
                    let mut dirs = Vec::new();
                    if p == 'r' || p == 'q' {
                        dirs.extend([(1, 0), (-1, 0), (0, 1), (0, -1)]);
                    }
                    if p == 'b' || p == 'q' {
                        dirs.extend([(1, 1), (-1, 1), (1, -1), (-1, -1)]);
                    }
                    for (df, dr) in dirs {
                        let (mut x, mut y) = (f + df, r + dr);
                        while on(x, y) {
                            let t = (y * 8 + x) as usize;
                            if self.own(self.sq[t]) {
                                break;
                            }
                            add(t, false, &mut out);
                            if self.sq[t] != '.' {
                                break;
                            }
                            x += df;
                            y += dr;
                        }
                    }
                }
            }
        }
        // Castling.
        let (base, k_idx, q_idx, king) = if self.white { (0, 0, 1, 'K') } else { (56, 2, 3, 'k') };
        let rook = if self.white { 'R' } else { 'r' };
        if self.sq[base + 4] == king && !self.attacked(base + 4, !self.white) {
            if self.castle[k_idx]
                && self.sq[base + 7] == rook
                && self.sq[base + 5] == '.'
                && self.sq[base + 6] == '.'
                && !self.attacked(base + 5, !self.white)
            {
                out.push(NMove { from: base + 4, to: base + 6, promo: None });
            }
            if self.castle[q_idx]
                && self.sq[base] == rook
                && self.sq[base + 1] == '.'
                && self.sq[base + 2] == '.'
                && self.sq[base + 3] == '.'
                && !self.attacked(base + 3, !self.white)
            {
                out.push(NMove { from: base + 4, to: base + 2, promo: None });
            }
        }
        out
    }

    pub fn apply(&self, m: NMove) -> Board {
        let mut b = self.clone();
        let c = b.sq[m.from];
        let lower = c.to_ascii_lowercase();
        let captured = b.sq[m.to] != '.';
        b.half += 1;
        if lower == 'p' || captured {
            b.half = 0;
        }
        if lower == 'p' && Some(m.to) == self.ep {
            let victim = if self.white { m.to - 8 } else { m.to + 8 };
            b.sq[victim] = '.';
        }
        b.sq[m.to] = match m.promo {
            Some(p) => {
                if self.white {
                    p.to_ascii_uppercase()
                } else {
                    p
                }
            }
            None => c,
        };
        b.sq[m.from] = '.';
        if lower == 'k' && (m.to as i32 - m.from as i32).abs() == 2 {
            let (rf, rt) = if m.to > m.from { (m.from + 3, m.from + 1) } else { (m.from - 4, m.from - 1) };
            b.sq[rt] = b.sq[rf];
            b.sq[rf] = '.';
        }
        b.ep = None;
        if lower == 'p' && (m.to as i32 - m.from as i32).abs() == 16 {
            b.ep = Some((m.to + m.from) / 2);
        }
        for s in [m.from, m.to] {
            match s {
                0 => b.castle[1] = false,
                7 => b.castle[0] = false,
                4 => {
                    b.castle[0] = false;
                    b.castle[1] = false
                }
                56 => b.castle[3] = false,
                63 => b.castle[2] = false,
                60 => {
                    b.castle[2] = false;
                    b.castle[3] = false
                }
                _ => {}
            }
        }
        if !self.white {
            b.full += 1;
        }
        b.white = !self.white;
        b
    }

    pub fn legal(&self) -> Vec<NMove> {
        self.pseudo()
            .into_iter()
            .filter(|&m| {
                let b = self.apply(m);
                !b.attacked(b.king(self.white), b.white)
            })
            .collect()
    }

    pub fn perft(&self, depth: u32) -> u64 {
        if depth == 0 {
            return 1;
        }
        self.legal().into_iter().map(|m| self.apply(m).perft(depth - 1)).sum()
    }
}
