/**
 * Deterministic PRNG for reproducible weight synthesis.
 *
 * splitmix64 seeding feeding xoshiro256++, doubles built from the top 53
 * bits, normals via Box-Muller. Streams are stable across platforms, which
 * is all the exporter needs; they do not match any other library's streams.
 */

export class Rng {
  private s: BigUint64Array;
  private spare: number | null = null;

  constructor(seed: number) {
    this.s = new BigUint64Array(4);
    let x = BigInt(Math.trunc(seed)) & 0xffffffffffffffffn;
    for (let i = 0; i < 4; i++) {
      // splitmix64 step
      x = (x + 0x9e3779b97f4a7c15n) & 0xffffffffffffffffn;
      let z = x;
      z = ((z ^ (z >> 30n)) * 0xbf58476d1ce4e5b9n) & 0xffffffffffffffffn;
      z = ((z ^ (z >> 27n)) * 0x94d049bb133111ebn) & 0xffffffffffffffffn;
      this.s[i] = z ^ (z >> 31n);
    }
  }

  private nextU64(): bigint {
    const s = this.s;
    const rotl = (v: bigint, k: bigint) =>
      ((v << k) | (v >> (64n - k))) & 0xffffffffffffffffn;
    const result = (rotl((s[0] + s[3]) & 0xffffffffffffffffn, 23n) + s[0]) &
      0xffffffffffffffffn;
    const t = (s[1] << 17n) & 0xffffffffffffffffn;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 45n);
    return result;
  }

  /** Uniform double in [0, 1). */
  next(): number {
    return Number(this.nextU64() >> 11n) * 2 ** -53;
  }

  uniform(lo: number, hi: number): number {
    return lo + (hi - lo) * this.next();
  }

  /** Standard normal via Box-Muller. */
  normal(): number {
    if (this.spare !== null) {
      const v = this.spare;
      this.spare = null;
      return v;
    }
    let u = 0;
    while (u === 0) u = this.next();
    const v = this.next();
    const r = Math.sqrt(-2 * Math.log(u));
    this.spare = r * Math.sin(2 * Math.PI * v);
    return r * Math.cos(2 * Math.PI * v);
  }

  /** Random integer in [0, n). */
  int(n: number): number {
    return Math.floor(this.next() * n);
  }

  shuffle(n: number): number[] {
    const idx = Array.from({ length: n }, (_, i) => i);
    for (let i = n - 1; i > 0; i--) {
      const j = this.int(i + 1);
      [idx[i], idx[j]] = [idx[j], idx[i]];
    }
    return idx;
  }
}
