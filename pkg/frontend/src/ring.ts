/** Bounded, time-ordered history buffer for strip charts. */

export interface Sample {
  t: number;
  value: number;
}

export class TimeSeriesRing {
  private samples: Sample[] = [];

  constructor(
    readonly windowSeconds: number = 120,
    readonly maxSamples: number = 120 * 50 + 64,
  ) {}

  /** Append one sample; out-of-order times are rejected to keep the buffer sorted. */
  push(t: number, value: number): void {
    const last = this.samples[this.samples.length - 1];
    if (last !== undefined && t < last.t) return;
    this.samples.push({ t, value });
    const cutoff = t - this.windowSeconds;
    let drop = 0;
    while (drop < this.samples.length && this.samples[drop].t < cutoff) drop++;
    const excess = this.samples.length - drop - this.maxSamples;
    if (excess > 0) drop += excess;
    if (drop > 0) this.samples = this.samples.slice(drop);
  }

  get length(): number {
    return this.samples.length;
  }

  get latest(): Sample | undefined {
    return this.samples[this.samples.length - 1];
  }

  /** Snapshot of the current contents, oldest first. */
  view(): readonly Sample[] {
    return this.samples;
  }

  clear(): void {
    this.samples = [];
  }
}
