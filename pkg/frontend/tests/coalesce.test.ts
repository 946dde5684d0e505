import { describe, expect, it } from "vitest";

import { LatestWins } from "../src/coalesce";

interface Deferred {
  args: number;
  resolve: (value: string) => void;
  reject: (error: Error) => void;
}

function instrumented() {
  const queue: Deferred[] = [];
  let concurrent = 0;
  let maxConcurrent = 0;
  const results: string[] = [];
  const errors: unknown[] = [];
  const coalescer = new LatestWins<number, string>(
    (args) => new Promise<string>((resolve, reject) => {
      concurrent += 1;
      maxConcurrent = Math.max(maxConcurrent, concurrent);
      queue.push({
        args,
        resolve: (v) => { concurrent -= 1; resolve(v); },
        reject: (e) => { concurrent -= 1; reject(e); },
      });
    }),
    (result) => results.push(result),
    (error) => errors.push(error),
  );
  return { coalescer, queue, results, errors, maxConcurrent: () => maxConcurrent };
}

const tick = () => new Promise<void>((r) => setTimeout(r, 0));

describe("latest-wins coalescer", () => {
  it("sends immediately when idle", async () => {
    const { coalescer, queue, results } = instrumented();
    coalescer.request(1);
    expect(queue).toHaveLength(1);
    queue[0].resolve("r1");
    await tick();
    expect(results).toEqual(["r1"]);
  });

  it("keeps at most one request in flight during a burst", async () => {
    const { coalescer, queue, results, maxConcurrent } = instrumented();
    for (let offset = 0; offset < 10; offset++) {
      coalescer.request(offset);
    }
    expect(queue).toHaveLength(1);        // only the first went out
    expect(coalescer.inFlightCount).toBe(1);
    queue[0].resolve("r0");
    await tick();
    // the nine intermediate requests collapsed into one trailing send
    expect(queue).toHaveLength(2);
    expect(queue[1].args).toBe(9);
    queue[1].resolve("r9");
    await tick();
    expect(results).toEqual(["r9"]);      // superseded result was dropped
    expect(maxConcurrent()).toBe(1);
    expect(coalescer.sentCount).toBe(2);
  });

  it("drops results of superseded requests", async () => {
    const { coalescer, queue, results } = instrumented();
    coalescer.request(1);
    coalescer.request(2);
    queue[0].resolve("stale");
    await tick();
    queue[1].resolve("fresh");
    await tick();
    expect(results).toEqual(["fresh"]);
  });

  it("reports errors only for the latest request", async () => {
    const { coalescer, queue, results, errors } = instrumented();
    coalescer.request(1);
    coalescer.request(2);
    queue[0].reject(new Error("stale failure"));
    await tick();
    expect(errors).toHaveLength(0);       // superseded: stays silent
    queue[1].resolve("ok");
    await tick();
    expect(results).toEqual(["ok"]);
    coalescer.request(3);
    queue[2].reject(new Error("real failure"));
    await tick();
    expect(errors).toHaveLength(1);
  });
});
