/** Seeded deterministic jitter: the same sequence id always lands on the same
 * horizontal offset, keeping screenshots and golden tests stable. */

function fnv1a(text: string): number {
  let hash = 0x811c9dc5;
  for (let i = 0; i < text.length; i++) {
    hash ^= text.charCodeAt(i);
    hash = Math.imul(hash, 0x01000193);
  }
  return hash >>> 0;
}

/** Uniform-ish value in [-1, 1], derived only from the key. */
export function jitterFor(key: string): number {
  return (fnv1a(key) / 0xffffffff) * 2 - 1;
}
