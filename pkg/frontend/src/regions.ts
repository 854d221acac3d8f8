/**
 * Region annotations: spans of the recording marked as positive (target
 * speaking) or negative (target silent).
 *
 * All times snap to a 10 ms grid so payloads stay canonical, and POS
 * regions are kept mutually non-overlapping at edit time.
 */

export type Polarity = "POS" | "NEG";

export interface RegionAnnotation {
  start_s: number;
  end_s: number;
  polarity: Polarity;
}

export const GRID_S = 0.01;

/** Snap a time to the 10 ms grid (round-half-up in grid units). */
export function snap(t: number): number {
  return Math.round(t / GRID_S) * GRID_S;
}

/** Build a region from a drag; endpoints swap when dragged backwards. */
export function regionFromDrag(
  a: number,
  b: number,
  polarity: Polarity,
  durationS: number,
): RegionAnnotation | null {
  let start = snap(Math.max(0, Math.min(a, b)));
  let end = snap(Math.min(durationS, Math.max(a, b)));
  if (end - start < GRID_S / 2) return null; // degenerate drag
  return { start_s: round2grid(start), end_s: round2grid(end), polarity };
}

/** Kill float residue: represent grid times exactly at 2 decimals. */
function round2grid(t: number): number {
  return Math.round(t * 100) / 100;
}

export function overlaps(a: RegionAnnotation, b: RegionAnnotation): boolean {
  return a.start_s < b.end_s && b.start_s < a.end_s;
}

/**
 * Insert a region into a set, enforcing the POS non-overlap invariant:
 * a new POS region is trimmed against existing POS regions and dropped
 * if nothing remains. NEG regions may overlap anything.
 */
export function addRegion(
  regions: RegionAnnotation[],
  incoming: RegionAnnotation,
): RegionAnnotation[] {
  let candidate = { ...incoming };
  if (candidate.polarity === "POS") {
    for (const r of regions) {
      if (r.polarity !== "POS" || !overlaps(candidate, r)) continue;
      // trim the side that pokes into the existing region
      if (candidate.start_s < r.start_s && candidate.end_s > r.end_s) {
        candidate.end_s = r.start_s; // swallowed both sides: keep the left part
      } else if (candidate.start_s < r.start_s) {
        candidate.end_s = Math.min(candidate.end_s, r.start_s);
      } else {
        candidate.start_s = Math.max(candidate.start_s, r.end_s);
      }
      if (candidate.end_s - candidate.start_s < GRID_S / 2) return regions;
    }
  }
  const next = [...regions, candidate];
  next.sort((x, y) => x.start_s - y.start_s || x.end_s - y.end_s);
  return next;
}

export function removeRegion(
  regions: RegionAnnotation[],
  index: number,
): RegionAnnotation[] {
  return regions.filter((_, i) => i !== index);
}

export function positiveRegions(regions: RegionAnnotation[]): RegionAnnotation[] {
  return regions.filter((r) => r.polarity === "POS");
}

export function totalPositiveSeconds(regions: RegionAnnotation[]): number {
  return positiveRegions(regions).reduce((s, r) => s + (r.end_s - r.start_s), 0);
}

/** Local validation mirrored from the server's rules. */
export function validateRegions(
  regions: RegionAnnotation[],
  durationS: number,
  minPosS = 0.5,
): string | null {
  if (positiveRegions(regions).length === 0) {
    return "label at least one positive region";
  }
  for (const r of regions) {
    if (r.start_s < 0 || r.end_s > durationS + 1e-9 || r.end_s <= r.start_s) {
      return `region [${r.start_s}, ${r.end_s}] is out of range`;
    }
  }
  const pos = positiveRegions(regions);
  for (let i = 0; i < pos.length; i++) {
    for (let j = i + 1; j < pos.length; j++) {
      if (overlaps(pos[i], pos[j])) return "positive regions overlap";
    }
  }
  if (totalPositiveSeconds(regions) < minPosS) {
    return `need at least ${minPosS} s of positive labeling`;
  }
  return null;
}

/** Wire payload: the region list itself, polarities preserved. */
export function toPayload(regions: RegionAnnotation[]): RegionAnnotation[] {
  return regions.map((r) => ({
    start_s: round2grid(snap(r.start_s)),
    end_s: round2grid(snap(r.end_s)),
    polarity: r.polarity,
  }));
}

export function fromPayload(payload: RegionAnnotation[]): RegionAnnotation[] {
  return toPayload(payload);
}

/** Grid-level equality, the round-trip fidelity relation. */
export function sameOnGrid(
  a: RegionAnnotation[],
  b: RegionAnnotation[],
): boolean {
  if (a.length !== b.length) return false;
  const key = (r: RegionAnnotation) =>
    `${Math.round(r.start_s * 100)}:${Math.round(r.end_s * 100)}:${r.polarity}`;
  const ka = a.map(key).sort();
  const kb = b.map(key).sort();
  return ka.every((k, i) => k === kb[i]);
}
