import { describe, expect, it } from "vitest";

import { playAllTones, playTone } from "../src/audio.js";
import type { Tone } from "../src/types.js";
import { FakeToneContext, asToneContext } from "./fakes.js";

const TONES: Tone[] = [
  { frequency: 880.0, pan: 1.0, duration_ms: 300 },
  { frequency: 464.3753136657043, pan: -1.0, duration_ms: 300 },
  { frequency: 382.0071960140274, pan: 1.0, duration_ms: 300 },
];

describe("playTone", () => {
  it("uses the served frequency, pan and duration verbatim", () => {
    const fake = new FakeToneContext();
    playTone(asToneContext(fake), TONES[1]!);
    const played = fake.played();
    expect(played).toHaveLength(1);
    expect(played[0]!.frequency).toBe(464.3753136657043);
    expect(played[0]!.pan).toBe(-1.0);
    expect(played[0]!.duration_ms).toBe(300);
  });

  it("keeps a zero pan centered at the frequency floor", () => {
    const fake = new FakeToneContext();
    playTone(asToneContext(fake), { frequency: 220.0, pan: 0.0, duration_ms: 300 });
    const played = fake.played()[0]!;
    expect(played.frequency).toBe(220.0);
    expect(played.pan).toBe(0.0);
  });

  it("wires oscillator through panner and gain to the destination", () => {
    const fake = new FakeToneContext();
    playTone(asToneContext(fake), TONES[0]!);
    expect(fake.oscillators[0]!.connected).toBe(fake.panners[0]);
    expect(fake.panners[0]!.connected).toBe(fake.gains[0]);
    expect(fake.gains[0]!.connected).toBe(fake.destination);
  });
});

describe("playAllTones", () => {
  it("schedules tones back to back in served order", () => {
    const fake = new FakeToneContext();
    playAllTones(asToneContext(fake), TONES);
    const played = fake.played();
    expect(played.map((p) => p.frequency)).toEqual(TONES.map((t) => t.frequency));
    expect(played[0]!.start).toBe(0);
    expect(played[1]!.start).toBeCloseTo(0.3, 12);
    expect(played[2]!.start).toBeCloseTo(0.6, 12);
  });
});
