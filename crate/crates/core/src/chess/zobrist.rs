//! Fixed Zobrist keys, generated at compile time so hashes are identical on every platform.

const fn splitmix(state: u64) -> (u64, u64) {
    let s = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = s;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    (s, z ^ (z >> 31))
}

pub struct Keys {
    pub pieces: [[u64; 64]; 12],
    pub castling: [u64; 16],
    pub en_passant: [u64; 8],
    pub black_to_move: u64,
}

const fn build() -> Keys {
    let mut state = 0x2008_0000_c0ff_ee00u64;
    let mut pieces = [[0u64; 64]; 12];
    let mut p = 0;
    while p < 12 {
        let mut s = 0;
        while s < 64 {
            let (ns, v) = splitmix(state);
            state = ns;
            pieces[p][s] = v;
            s += 1;
        }
        p += 1;
    }
    let mut castling = [0u64; 16];
    let mut c = 1;
    while c < 16 {
        let (ns, v) = splitmix(state);
        state = ns;
        castling[c] = v;
        c += 1;
    }
    let mut en_passant = [0u64; 8];
    let mut f = 0;
    while f < 8 {
        let (ns, v) = splitmix(state);
        state = ns;
        en_passant[f] = v;
        f += 1;
    }
    let (_, black_to_move) = splitmix(state);
    Keys {
        pieces,
        castling,
        en_passant,
        black_to_move,
    }
}

pub static KEYS: Keys = build();
