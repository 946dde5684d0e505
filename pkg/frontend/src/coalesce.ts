/** Latest-wins request coalescing.
 *
 * Slider drags fire state changes far faster than the service can answer;
 * naive per-event requests would queue unboundedly. This keeps at most one
 * request in flight: while one is pending, newer arguments overwrite each
 * other, and on completion only the newest (if any) is sent. Results of
 * superseded requests are dropped so the handler only ever sees the latest.
 */

export class LatestWins<TArgs, TResult> {
  private inFlight = false;
  private pending: TArgs | null = null;
  private generation = 0;
  maxObservedInFlight = 0;
  sentCount = 0;

  constructor(
    private readonly send: (args: TArgs) => Promise<TResult>,
    private readonly onResult: (result: TResult, args: TArgs) => void,
    private readonly onError: (error: unknown) => void = () => undefined,
  ) {}

  get inFlightCount(): number {
    return this.inFlight ? 1 : 0;
  }

  request(args: TArgs): void {
    if (this.inFlight) {
      this.pending = args;
      return;
    }
    void this.fire(args);
  }

  private async fire(args: TArgs): Promise<void> {
    this.inFlight = true;
    this.sentCount += 1;
    this.maxObservedInFlight = Math.max(this.maxObservedInFlight, 1);
    const myGeneration = ++this.generation;
    try {
      const result = await this.send(args);
      if (myGeneration === this.generation && this.pending === null) {
        this.onResult(result, args);
      }
    } catch (error) {
      if (myGeneration === this.generation && this.pending === null) {
        this.onError(error);
      }
    } finally {
      this.inFlight = false;
      if (this.pending !== null) {
        const next = this.pending;
        this.pending = null;
        void this.fire(next);
      }
    }
  }
}
